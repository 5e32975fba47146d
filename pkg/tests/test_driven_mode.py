import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from balanced_coupling.driven_mode import (
    CosineRampEnvelope,
    DriveWaveform,
    FrameSpec,
    ModeState,
    TrajectoryTooShortError,
    analytic_balanced,
    analytic_unbalanced,
    drive_z,
    evolve,
    evolve_xy,
    ripple_metrics,
    time_grid,
)

W0 = 2 * math.pi
G = 2 * math.pi * 0.1


def test_drive_z_balanced_at_zero():
    assert drive_z(0.0, DriveWaveform.balanced_drive(0.3, 2.0)) == 0.3


def test_drive_z_cosine_half_cycle():
    assert drive_z(math.pi / 2, DriveWaveform.linear(0.3, 2.0)) == pytest.approx(-0.3, abs=1e-15)


@given(t=st.floats(0, 50), phi=st.floats(-math.pi, math.pi), gd=st.floats(0.0, 3.0))
def test_balanced_drive_is_rotating_field(t, phi, gd):
    z = drive_z(t, DriveWaveform.balanced_drive(gd, 1.7, phi))
    assert z == pytest.approx(gd * np.exp(1j * (1.7 * t + phi)), abs=1e-12)


def test_waveform_rejects_negative_strength():
    with pytest.raises(ValueError):
        DriveWaveform(-1.0, 0.0, 1.0)


def test_rwa_counterpart_keeps_corotating_part():
    w = DriveWaveform(0.4, 0.1, 2.0, 0.3)
    c = w.rwa_counterpart()
    assert c.balanced and c.G_d == pytest.approx(0.25)


def test_mode_state_rejects_nan():
    with pytest.raises(ValueError):
        ModeState(complex("nan"))


def test_time_grid_covers_span():
    t = time_grid((0.0, 1.0), 0.3)
    assert t[0] == 0.0 and t[-1] == 1.0 and np.all(np.diff(t) <= 0.3 + 1e-15)
    with pytest.raises(ValueError):
        time_grid((1.0, 0.0), 0.1)
    with pytest.raises(ValueError):
        time_grid((0.0, 1.0), 0.0)


def test_free_evolution_lab_frame():
    tr = evolve(1.0 + 0.5j, W0, DriveWaveform.linear(0.0, W0), FrameSpec(0.0), (0.0, 5.0), 0.01)
    ref = (1.0 + 0.5j) * np.exp(-1j * W0 * tr.t)
    assert np.max(np.abs(tr.a - ref) / np.abs(ref)) < 1e-9


def test_free_evolution_corotating_frame():
    tr = evolve(0.3 - 0.2j, W0, DriveWaveform.linear(0.0, W0), FrameSpec(W0), (0.0, 5.0), 0.01)
    np.testing.assert_allclose(tr.a, 0.3 - 0.2j, atol=1e-13)


def test_unbalanced_closed_form_trivial_values():
    assert analytic_unbalanced(0.0, G, W0) == 0
    assert analytic_unbalanced(1.0, 0.2 * math.pi, W0) == pytest.approx(0.1j * math.pi, abs=1e-14)


def test_unbalanced_closed_form_oracle():
    # 40-digit mpmath evaluation of the closed form.
    assert analytic_unbalanced(0.25, G, W0) == pytest.approx(-0.05 + 0.078539816339744830962j, abs=1e-15)


@pytest.mark.parametrize("method,tol", [("adaptive", 1e-9), ("rk4", 1e-6)])
def test_unbalanced_numeric_matches_closed_form(method, tol):
    tr = evolve(0.0, W0, DriveWaveform.linear(G, W0), FrameSpec(W0), (0.0, 10.0), 0.005, method=method)
    ref = analytic_unbalanced(tr.t, G, W0)
    assert np.max(np.abs(tr.a - ref)) / np.max(np.abs(ref)) < tol


def test_balanced_closed_form_slope():
    a = analytic_balanced(np.array([0.0, 1.0, 2.0]), 0.3)
    np.testing.assert_allclose(np.diff(np.abs(a)), 0.3, rtol=1e-14)


@pytest.mark.parametrize("detuning", [0.0, 0.3, -0.7])
@pytest.mark.parametrize("phi", [0.0, 1.1])
def test_balanced_numeric_matches_closed_form(detuning, phi):
    wd = W0 - detuning
    w = DriveWaveform.balanced_drive(G, wd, phi)
    tr = evolve(0.0, W0, w, FrameSpec(wd), (0.0, 10.0), 0.01)
    ref = analytic_balanced(tr.t, G, detuning, phi)
    assert np.max(np.abs(tr.a - ref)) < 1e-8


def test_frames_are_consistent():
    w = DriveWaveform(G, 0.3 * G, 0.9 * W0, 0.4)
    lab = evolve(0.2, W0, w, FrameSpec(0.0), (0.0, 6.0), 0.01)
    rot = evolve(0.2, W0, w, FrameSpec(0.9 * W0), (0.0, 6.0), 0.01)
    np.testing.assert_allclose(rot.a, lab.a * np.exp(1j * 0.9 * W0 * lab.t), atol=1e-9)


def test_real_quadrature_path_agrees():
    w = DriveWaveform(G, 0.5 * G, W0, 0.2)
    tr = evolve(0.1 + 0.2j, W0, w, FrameSpec(0.0), (0.0, 5.0), 0.005)
    t, x, y = evolve_xy(0.1, 0.2, W0, w, (0.0, 5.0), 0.005)
    np.testing.assert_allclose(x + 1j * y, tr.a, atol=1e-8)


def test_unknown_method():
    with pytest.raises(ValueError):
        evolve(0.0, W0, DriveWaveform.linear(G, W0), FrameSpec(W0), (0.0, 1.0), 0.01, method="euler")


def test_ramped_drive_is_smooth_start():
    env = CosineRampEnvelope(2.0)
    assert env(0.0) == 0.0 and env(2.0) == 1.0 and env(5.0) == 1.0
    w = DriveWaveform.balanced_drive(G, W0, envelope=env)
    tr = evolve(0.0, W0, w, FrameSpec(W0), (0.0, 6.0), 0.01)
    # After the ramp the amplitude grows at rate G_d; the ramp contributes G_d * ramp / 2.
    assert abs(tr.a[-1]) == pytest.approx(G * (6.0 - 1.0), rel=1e-8)


def test_ripple_unbalanced():
    tr = evolve(0.0, W0, DriveWaveform.linear(G, W0), FrameSpec(W0), (0.0, 10.0), 0.002)
    rm = ripple_metrics(tr)
    assert rm.amplitude == pytest.approx(G / (2 * W0), rel=0.01)
    assert rm.frequency == pytest.approx(2 * W0 / (2 * math.pi), rel=0.01)


def test_ripple_balanced_is_zero():
    w = DriveWaveform.balanced_drive(G, W0)
    tr = evolve(0.0, W0, w, FrameSpec(W0), (0.0, 10.0), 0.002)
    assert ripple_metrics(tr).amplitude < 1e-9 * G * 10.0


def test_ripple_needs_enough_periods():
    tr = evolve(0.0, W0, DriveWaveform.linear(G, W0), FrameSpec(W0), (0.0, 0.5), 0.01)
    with pytest.raises(TrajectoryTooShortError):
        ripple_metrics(tr)


@given(gx=st.floats(0.0, 0.5), gy=st.floats(0.0, 0.5), phi=st.floats(-3, 3), a0r=st.floats(-1, 1), a0i=st.floats(-1, 1))
def test_linearity_in_drive(gx, gy, phi, a0r, a0i):
    a0 = complex(a0r, a0i)
    w = DriveWaveform(gx, gy, W0, phi)
    both = evolve(a0, W0, w, FrameSpec(W0), (0.0, 2.0), 0.05).a
    free = evolve(a0, W0, w.scaled(0.0), FrameSpec(W0), (0.0, 2.0), 0.05).a
    driven = evolve(0.0, W0, w, FrameSpec(W0), (0.0, 2.0), 0.05).a
    np.testing.assert_allclose(both, free + driven, atol=1e-10)

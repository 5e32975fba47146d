import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from balanced_coupling.circuit_model import CoupledCircuitParams, ModeRates, normalize_coupled
from balanced_coupling.coupled_modes import (
    InstabilityError,
    build_m,
    build_m_algebraic,
    coupling_rates,
    eigenvalues_full,
    eigenvalues_rwa,
    rotating_frame_generator,
    rwa_relative_error,
    spectrum_sweep,
)


def test_decoupled_spectrum():
    r = ModeRates(10.0, 9.0, 0.0, 0.0)
    mm = build_m(r)
    np.testing.assert_allclose(np.diag(mm.display).real, [10, 9, -10, -9])
    np.testing.assert_allclose(eigenvalues_full(mm).omegas, [-10, -9, 9, 10], atol=1e-13)


def test_balanced_is_block_diagonal():
    mm = build_m(coupling_rates("balanced", 10.0, 9.0, 0.6))
    assert not np.any(mm.m[:2, 2:]) and not np.any(mm.m[2:, :2])


def test_free_rotation_generator():
    mm = build_m_algebraic(20.0, 0.0, 0.0, 0.0)
    np.testing.assert_allclose(mm.display, np.diag([10, 10, -10, -10]))


def test_degenerate_uncoupled_diagonal():
    mm = build_m_algebraic(20.0, 0.0, 0.0, 0.0)
    assert len(set(np.abs(np.diag(mm.display)).round(12))) == 1


def test_oracle_spectrum_equal_couplings():
    # Roots of l^4 - 200 l^2 + 9984, the characteristic polynomial at omega = 10, g_- = g_+ = 0.2.
    s = eigenvalues_full(build_m(ModeRates(10.0, 10.0, 0.2, 0.2)))
    np.testing.assert_allclose(s.positive, [math.sqrt(104), math.sqrt(96)], rtol=1e-14)
    np.testing.assert_allclose(s.omegas, [-math.sqrt(104), -math.sqrt(96), math.sqrt(96), math.sqrt(104)], rtol=1e-14)


def test_rwa_substitution():
    s = eigenvalues_rwa(20.0, 0.0, 0.2)
    np.testing.assert_allclose(s.omegas, [-10.2, -9.8, 9.8, 10.2], rtol=1e-15)
    np.testing.assert_allclose(eigenvalues_full(build_m(ModeRates(10.0, 10.0, 0.2, 0.0))).omegas, s.omegas, rtol=1e-14)


def test_rwa_splitting_on_resonance():
    s = eigenvalues_rwa(20.0, 0.0, 0.37).positive
    assert s[0] - s[1] == pytest.approx(0.74, rel=1e-14)


def test_rwa_error_grows_with_coupling():
    e = [rwa_relative_error(coupling_rates("capacitive", 10.0, 10.0, g)) for g in (0.1, 0.2, 1.0)]
    assert e[0] < 1e-3
    assert e[0] < e[1] < e[2]
    assert rwa_relative_error(coupling_rates("capacitive", 10.0, 10.0, 1.0)) > rwa_relative_error(coupling_rates("capacitive", 10.0, 10.0, 0.2))


def test_rwa_error_monotone_scan():
    gs = np.linspace(0.02, 1.5, 40)
    e = [rwa_relative_error(coupling_rates("inductive", 10.0, 10.0, g)) for g in gs]
    assert np.all(np.diff(e) > 0)


def test_balanced_rwa_error_vanishes():
    assert rwa_relative_error(coupling_rates("balanced", 10.0, 9.3, 2.0)) < 1e-15


def test_antibalanced_has_no_exchange():
    r = coupling_rates("antibalanced", 10.0, 9.0, 0.4)
    assert r.g_minus == 0.0 and r.g_plus == pytest.approx(0.4)


def test_unknown_kind():
    with pytest.raises(ValueError):
        coupling_rates("magic", 1.0, 1.0, 0.1)


def test_instability_detected():
    with pytest.raises(InstabilityError):
        eigenvalues_full(build_m(ModeRates(1.0, 1.0, 0.0, 1.5)))


def test_from_circuit():
    n = normalize_coupled(CoupledCircuitParams(0.4e-12, 0.4e-12, 2e-9, 2e-9, 10e-15, -50e-12))
    a = build_m(n).m
    b = build_m(n.rates).m
    np.testing.assert_array_equal(a, b)
    with pytest.raises(TypeError):
        build_m((1, 2, 3, 4))


def test_rotating_frame_coefficients():
    r = ModeRates(10.0, 9.0, 0.3, 0.2)
    mm = build_m(r)
    t = 0.37
    gen = rotating_frame_generator(mm, 10.0, 9.0, t)
    np.testing.assert_allclose(np.diag(gen), 0.0, atol=1e-14)
    assert gen[0, 1] == pytest.approx(-1j * 0.3 * np.exp(1j * 1.0 * t))
    assert gen[0, 3] == pytest.approx(1j * 0.2 * np.exp(1j * 19.0 * t))


def test_rotating_frame_static_for_balanced_resonant():
    mm = build_m(coupling_rates("balanced", 10.0, 10.0, 0.4))
    a = rotating_frame_generator(mm, 10.0, 10.0, 0.0)
    b = rotating_frame_generator(mm, 10.0, 10.0, 1.234)
    np.testing.assert_allclose(a, b, atol=1e-14)


def test_spectrum_sweep_columns():
    rates = [coupling_rates("capacitive", 10.0, 10.0, g) for g in (0.0, 0.5)]
    out = spectrum_sweep(rates)
    assert out["rel_err"][0] == 0.0
    assert out["omega_plus_full"][1] > out["omega_minus_full"][1]


rate = st.floats(1.0, 20.0)
small = st.floats(-0.4, 0.4)


@given(wa=rate, wb=rate, gm=small, gp=small)
def test_explicit_equals_algebraic(wa, wb, gm, gp):
    r = ModeRates(wa, wb, gm, gp)
    np.testing.assert_allclose(build_m(r).m, build_m_algebraic(r.S, r.Delta, gm, gp).m, atol=1e-14)


@given(wa=rate, wb=rate, gm=small)
def test_rwa_exact_without_gplus(wa, wb, gm):
    r = ModeRates(wa, wb, gm, 0.0)
    full = eigenvalues_full(build_m(r)).omegas
    rwa = eigenvalues_rwa(r.S, r.Delta, gm).omegas
    np.testing.assert_allclose(full, rwa, rtol=1e-12, atol=1e-12 * max(wa, wb))


@given(wa=rate, wb=rate, gm=small, gp=small)
def test_spectrum_symmetric_and_symplectic(wa, wb, gm, gp):
    mm = build_m(ModeRates(wa, wb, gm, gp))
    try:
        s = eigenvalues_full(mm).omegas
    except InstabilityError:
        return
    np.testing.assert_allclose(s, -s[::-1], atol=1e-12 * max(wa, wb))
    # The product of the positive frequencies is fixed by the determinant.
    assert np.prod(s) == pytest.approx(np.linalg.det(mm.display).real, rel=1e-9)


def test_thousand_random_balanced_circuits():
    rng = np.random.default_rng(42)
    worst = 0.0
    for _ in range(1000):
        wa, wb = rng.uniform(1, 20, 2)
        gm = rng.uniform(-0.5, 0.5) * min(wa, wb)
        r = ModeRates(wa, wb, gm, 0.0)
        full = eigenvalues_full(build_m(r)).positive
        rwa = eigenvalues_rwa(r.S, r.Delta, gm).positive
        worst = max(worst, float(np.max(np.abs(full - rwa) / np.abs(full))))
    assert worst < 1e-12

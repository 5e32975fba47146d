import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from balanced_coupling.constants import TWO_PI
from balanced_coupling.mist_sim import (
    DispersiveRegimeWarning,
    MistTransmon,
    NoRootError,
    PulseSpec,
    ReadoutConfig,
    default_panels,
    dispersive_shift,
    drive_epsilon,
    effective_qubit_drive,
    match_capacitive_coupling,
    mist_transmon,
    resonator_response,
    series_coupling,
    simulate_leakage,
    simulate_point,
    solve_ej,
    sweep,
    total_coupling,
)
from balanced_coupling.transmon import CouplingSpec, lowering

WR = TWO_PI * 6.0
WQ = TWO_PI * 4.5
E_C = TWO_PI * 0.2

# Regression baseline from the first run: matched capacitive g_c at 4.5 GHz, zero gate charge.
MATCHED_GC_4P5 = 0.7284467666867522
BALANCED_CHI_4P5 = -0.009145778549304963

SMALL = ReadoutConfig(
    qubit_freqs=(TWO_PI * 4.3, TWO_PI * 4.7),
    n_g_grid=(-0.5, -0.25, 0.0),
    photon_numbers=(5.0, 40.0),
    pulse=PulseSpec(duration=30.0, ramp=2.0, ringdown=10.0),
    n_levels=14,
    n_max=24,
    dt=0.02,
    label="small",
)


@pytest.fixture(scope="module")
def transmon45():
    return mist_transmon(WQ, E_C, 0.0, 22, 30)


def test_pulse_validation_and_envelope():
    with pytest.raises(ValueError):
        PulseSpec(duration=0.0)
    with pytest.raises(ValueError):
        PulseSpec(duration=10.0, ramp=6.0)
    with pytest.raises(ValueError):
        PulseSpec(ringdown=-1.0)
    p = PulseSpec(duration=20.0, ramp=2.0, ringdown=5.0)
    np.testing.assert_allclose(p.envelope([0.0, 1.0, 2.0, 10.0, 19.0, 20.0, 24.0]), [0, 0.5, 1, 1, 0.5, 0, 0], atol=1e-15)
    assert p.t_end == 25.0


def test_config_validation():
    with pytest.raises(ValueError):
        ReadoutConfig(kappa=0.0)
    with pytest.raises(ValueError):
        ReadoutConfig(n_levels=5)
    with pytest.raises(ValueError):
        ReadoutConfig(photon_numbers=(-1.0,))


def test_free_resonator_decay():
    r = resonator_response(WR, 0.1, 0.0, alpha0=0.3 - 0.4j)
    t = np.linspace(0, 50, 11)
    np.testing.assert_allclose(r.alpha(t), (0.3 - 0.4j) * np.exp((-1j * WR - 0.05) * t), atol=1e-14)


def test_resonant_steady_state():
    kappa = 1 / 15
    eps = drive_epsilon(kappa, 20.0)
    r = resonator_response(WR, kappa, eps, PulseSpec(duration=600.0))
    assert r.steady_state_photons == pytest.approx(20.0, rel=1e-14)
    assert abs(r.slow_amplitude(590.0)) == pytest.approx(2 * eps / kappa, rel=1e-6)


@pytest.mark.parametrize("detune", [0.0, 0.03])
def test_resonator_matches_ode(detune):
    kappa = 1 / 15
    pulse = PulseSpec(duration=40.0, ramp=4.0, ringdown=20.0)
    r = resonator_response(WR, kappa, 0.2 + 0.1j, pulse, omega_d=WR + detune, alpha0=0.1j)

    def rhs(t, y):
        a = y[0] + 1j * y[1]
        da = -r.rate * a - 1j * r.epsilon * pulse.envelope(t)
        return [da.real, da.imag]

    grid = np.linspace(0, pulse.t_end, 241)
    sol = solve_ivp(rhs, (0, pulse.t_end), [0.0, 0.1], t_eval=grid, method="DOP853", rtol=1e-12, atol=1e-14, max_step=0.1)
    np.testing.assert_allclose(r.slow_amplitude(grid), sol.y[0] + 1j * sol.y[1], atol=1e-9)


def test_drive_operator_basics():
    rng = np.random.default_rng(1)
    q = rng.normal(size=(5, 5))
    q = q + q.T
    phi = rng.normal(size=(5, 5))
    phi = phi + phi.T
    d = effective_qubit_drive(q, phi, CouplingSpec(0.2, 0.0))
    np.testing.assert_allclose(d.A, -0.2j * q)
    np.testing.assert_array_equal(d.hamiltonian(0.0), 0.0)
    alpha = 0.3 - 0.7j
    np.testing.assert_allclose(d.hamiltonian(alpha), alpha.real * d.P + alpha.imag * d.R, atol=1e-14)
    h = d.hamiltonian(alpha)
    np.testing.assert_allclose(h, h.conj().T, atol=1e-14)


def test_stripping_removes_targeted_elements():
    rng = np.random.default_rng(2)
    q = rng.normal(size=(6, 6)) + 0j
    d = effective_qubit_drive(q, q, CouplingSpec(0.2, 0.1), strip_k1=True, strip_k3=True)
    k = np.arange(5)
    assert not np.any(d.A[k, k + 1])
    assert not np.any(d.A[np.arange(3) + 3, np.arange(3)])
    assert np.all(d.A[k + 1, k] != 0)


def test_balanced_harmonic_drive_is_rotating_only():
    b = lowering(2)
    Q = -1j * (b - b.conj().T)
    Phi = b + b.conj().T
    bal = effective_qubit_drive(Q, Phi, CouplingSpec(0.2, -0.2))
    assert not np.any(bal.counter_rotating_part())
    cap = effective_qubit_drive(Q, Phi, CouplingSpec(0.2, 0.0))
    assert np.any(cap.counter_rotating_part())


def test_solve_ej_hits_frequency(transmon45):
    assert transmon45.energies[1] == pytest.approx(WQ, rel=1e-12)
    assert transmon45.E_J / E_C == pytest.approx(69.3, abs=0.1)
    assert solve_ej(WQ, E_C) == pytest.approx(transmon45.E_J, rel=1e-12)


def test_operators_hermitian(transmon45):
    np.testing.assert_allclose(transmon45.Q, transmon45.Q.conj().T, atol=1e-12)
    np.testing.assert_allclose(transmon45.Phi, transmon45.Phi.conj().T, atol=1e-12)


def test_chi_quadratic_in_coupling(transmon45):
    a = dispersive_shift(transmon45, CouplingSpec(0.01, 0.0), WR).chi
    b = dispersive_shift(transmon45, CouplingSpec(0.02, 0.0), WR).chi
    assert b / a == pytest.approx(4.0, rel=1e-12)
    assert dispersive_shift(transmon45, CouplingSpec(0.0, 0.0), WR).chi == 0.0


def test_chi_two_level_limit():
    E = np.array([0.0, TWO_PI * 5.9])
    Q = np.array([[0, -1j], [1j, 0]])
    t = MistTransmon(E[1], 1.0, 1.0, 0.0, E, Q, np.array([[0, 1], [1, 0]], dtype=complex))
    g = 0.05
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DispersiveRegimeWarning)
        chi = dispersive_shift(t, CouplingSpec(g, 0.0), WR).chi
    assert chi == pytest.approx(g**2 / (E[1] - WR), rel=0.1)


def test_dispersive_warning(transmon45):
    with pytest.warns(DispersiveRegimeWarning):
        dispersive_shift(transmon45, CouplingSpec(1.0, 0.0), WR)


def test_balanced_and_capacitive_chi_differ(transmon45):
    g = total_coupling(0.05, WQ, WR)
    bal = dispersive_shift(transmon45, CouplingSpec.from_total(g, -1.0), WR).chi
    cap = dispersive_shift(transmon45, CouplingSpec(g, 0.0), WR).chi
    assert abs(bal - cap) > 0.1 * abs(cap)
    assert bal == pytest.approx(BALANCED_CHI_4P5, rel=1e-9)


def test_match_fixed_point(transmon45):
    target = dispersive_shift(transmon45, CouplingSpec(0.4, 0.0), WR).chi
    assert match_capacitive_coupling(transmon45, WR, target, 0.3) == pytest.approx(0.4, rel=1e-10)


def test_match_scaling(transmon45):
    target = dispersive_shift(transmon45, CouplingSpec(0.3, 0.0), WR).chi
    g2 = match_capacitive_coupling(transmon45, WR, 2 * target, 0.3)
    assert g2 / 0.3 == pytest.approx(math.sqrt(2), rel=0.05)


def test_match_balanced_target_regression(transmon45):
    g = total_coupling(0.05, WQ, WR)
    target = dispersive_shift(transmon45, CouplingSpec.from_total(g, -1.0), WR).chi
    g_c = match_capacitive_coupling(transmon45, WR, target, g)
    assert g_c == pytest.approx(MATCHED_GC_4P5, rel=1e-9)


def test_match_unreachable(transmon45):
    with pytest.raises(NoRootError):
        match_capacitive_coupling(transmon45, WR, 1.0, 0.1)
    with pytest.raises(ValueError):
        match_capacitive_coupling(transmon45, WR, -0.01, 0.0)


def test_series_coupling_match():
    cfg = ReadoutConfig(match_reference=(0.15, 3.0))
    sc = series_coupling(cfg, WQ)
    assert sc.coupling.g_l == 0.0
    assert sc.chi_mismatch < 1e-9


def test_total_coupling_split():
    c = CouplingSpec.from_total(0.9, 3.0)
    assert abs(c.g_c) + abs(c.g_l) == pytest.approx(0.9)
    assert c.g_l / c.g_c == pytest.approx(3.0)


def test_zero_drive_point():
    cfg = SMALL.with_(photon_numbers=(0.0, 0.0))
    r = simulate_point(cfg, WQ, -0.3, CouplingSpec(0.5, -0.5))
    assert np.max(np.abs(r.leakage)) < 1e-10
    assert r.norm_error < 1e-12


def test_zero_coupling_point():
    r = simulate_point(SMALL, WQ, -0.3, CouplingSpec(0.0, 0.0))
    assert np.max(np.abs(r.leakage)) < 1e-10


def test_point_norm_and_reproducibility():
    c = CouplingSpec.from_total(total_coupling(0.05, WQ, WR), -1.0)
    a = simulate_point(SMALL, WQ, -0.1, c)
    b = simulate_point(SMALL, WQ, -0.1, c)
    assert a.norm_error < 1e-6
    np.testing.assert_array_equal(a.leakage, b.leakage)
    assert a.leakage.shape == (2, 2)
    assert np.all(a.leakage >= 0)


def test_leakage_independent_of_other_columns():
    c = CouplingSpec(total_coupling(0.05, WQ, WR), 0.0)
    both = simulate_point(SMALL, WQ, 0.0, c).leakage
    one = simulate_point(SMALL.with_(photon_numbers=(40.0,)), WQ, 0.0, c).leakage
    np.testing.assert_allclose(one[0], both[1], atol=1e-13)


def test_stripping_reduces_leakage_at_strong_drive():
    cfg = ReadoutConfig(photon_numbers=(80.0,))
    c = CouplingSpec(total_coupling(0.05, WQ, WR), 0.0)
    full = simulate_point(cfg, WQ, 0.0, c).leakage[0]
    stripped = simulate_point(cfg.with_(strip_k1=True, strip_k3=True), WQ, 0.0, c).leakage[0]
    assert stripped[1] < 0.1 * full[1]


def test_ng_average_is_arithmetic_mean():
    cfg = SMALL.with_(qubit_freqs=(WQ,))
    m = simulate_leakage(cfg)
    sc = series_coupling(cfg, WQ)
    manual = np.mean([simulate_point(cfg, WQ, ng, sc.coupling).leakage for ng in cfg.n_g_grid], axis=0)
    np.testing.assert_allclose(m.mean[0], manual, rtol=1e-14, atol=1e-18)
    cols = m.columns()
    assert len(cols["leakage_mean"]) == 1 * 2 * 2


def test_sweep_singleton_matches_serial():
    cfg = SMALL.with_(qubit_freqs=(WQ,), n_g_grid=(-0.2,))
    [a] = sweep([cfg], workers=1)
    b = simulate_leakage(cfg)
    np.testing.assert_array_equal(a.mean, b.mean)


def test_sweep_order_and_workers(tmp_path):
    cfg = SMALL
    perm = cfg.with_(qubit_freqs=cfg.qubit_freqs[::-1], n_g_grid=cfg.n_g_grid[::-1], label="perm")
    a, p = sweep([cfg, perm], workers=2, checkpoint_dir=tmp_path)
    np.testing.assert_allclose(a.mean, p.mean[::-1], rtol=1e-14, atol=1e-18)
    [b] = sweep([cfg], workers=1)
    np.testing.assert_array_equal(a.mean, b.mean)
    # A rerun loads every point from the checkpoints.
    calls = []
    [c] = sweep([cfg], workers=1, checkpoint_dir=tmp_path, progress=lambda d, n: calls.append(d))
    np.testing.assert_array_equal(a.mean, c.mean)
    assert calls == []
    assert (tmp_path / "manifest.json").exists()


def test_sweep_rejects_duplicate_labels():
    with pytest.raises(ValueError):
        sweep([SMALL, SMALL])


def test_default_panels():
    labels = [c.label for c in default_panels()]
    assert labels == ["a_balanced", "a_capacitive", "b_ratio3", "b_capacitive", "c_full", "c_stripped"]
    panels = {c.label: c for c in default_panels()}
    assert panels["b_capacitive"].match_reference == (0.15, 3.0)
    assert panels["c_stripped"].stripped and not panels["c_full"].stripped


@given(n=st.floats(0.0, 200.0), kappa=st.floats(0.01, 1.0))
def test_epsilon_gives_photon_number(n, kappa):
    r = resonator_response(WR, kappa, drive_epsilon(kappa, n))
    assert r.steady_state_photons == pytest.approx(n, rel=1e-12, abs=1e-12)

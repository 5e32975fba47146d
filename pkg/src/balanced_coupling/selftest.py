"""Quick built-in checks of limiting cases with exactly known answers.

``run_selftest`` runs every registered check and reports one line each. The
checks are cheap (a few seconds in total) and need no test framework, so a
fresh install can be verified with ``balanced-coupling selftest``.
"""

from __future__ import annotations

import math
import time
from typing import Callable

import numpy as np

from . import bloch_tls, circuit_model, coupled_modes, driven_mode, mist_sim, transmission_lines, transmon
from .constants import TWO_PI

__all__ = ["CHECKS", "run_selftest"]

CHECKS: list = []


def check(name: str) -> Callable:
    def register(fn):
        CHECKS.append((name, fn))
        return fn

    return register


def _close(a, b, tol):
    return bool(np.all(np.abs(np.asarray(a) - np.asarray(b)) <= tol))


# circuit_model


@check("circuit: no drive coupling leaves the bare resonator")
def _undriven_circuit():
    e = circuit_model.effective_drive_params(circuit_model.DrivenCircuitParams(C=1e-9, L=1e-6))
    return e.G_x == 0 and e.G_y == 0 and e.C_prime == 1e-9 and math.isclose(e.omega0, 1 / math.sqrt(1e-15), rel_tol=1e-15)


@check("circuit: C_d = C doubles the loaded capacitance")
def _loaded_circuit():
    e = circuit_model.effective_drive_params(circuit_model.DrivenCircuitParams(C=1e-9, L=1e-6, C_d=1e-9))
    return e.C_prime == 2e-9 and math.isclose(e.omega0, 1 / math.sqrt(2e-15), rel_tol=1e-15)


@check("circuit: uncoupled resonators have zero coupling rates")
def _uncoupled():
    n = circuit_model.normalize_coupled(circuit_model.CoupledCircuitParams(0.4e-12, 0.5e-12, 2e-9, 3e-9))
    return n.g_c == 0 and n.g_l == 0 and n.L_a_prime == 2e-9 and n.C_b_prime == 0.5e-12


@check("circuit: symmetric circuit has equal partial impedances and frequencies")
def _symmetric():
    n = circuit_model.normalize_coupled(circuit_model.CoupledCircuitParams(0.4e-12, 0.4e-12, 2e-9, 2e-9, 10e-15, -50e-12))
    return n.Z_a_prime == n.Z_b_prime and n.omega_a_prime == n.omega_b_prime


@check("circuit: purely capacitive coupling has balance residual 1")
def _residual_one():
    n = circuit_model.normalize_coupled(circuit_model.CoupledCircuitParams(0.4e-12, 0.4e-12, 2e-9, 2e-9, 10e-15, 0.0))
    return math.isclose(circuit_model.balance_residual(n), 1.0, rel_tol=1e-14)


@check("circuit: balancing without C_g is refused")
def _no_cg():
    try:
        circuit_model.solve_balanced_mutual(circuit_model.CoupledCircuitParams(0.4e-12, 0.4e-12, 2e-9, 2e-9))
    except circuit_model.NoSolutionError:
        return True
    return False


# driven_mode


@check("drive: balanced drive at t = 0 is G_d")
def _z0():
    return driven_mode.drive_z(0.0, driven_mode.DriveWaveform.balanced_drive(0.3, 2.0)) == 0.3


@check("drive: cosine drive at half a cycle is -G_x")
def _zhalf():
    w = driven_mode.DriveWaveform.linear(0.3, 2.0)
    return _close(driven_mode.drive_z(math.pi / 2.0, w), -0.3, 1e-15)


@check("drive: balanced drive is a rotating field")
def _zrot():
    w = driven_mode.DriveWaveform.balanced_drive(0.3, 2.0, 0.4)
    t = np.linspace(0.1, 5.0, 17)
    return _close(driven_mode.drive_z(t, w), 0.3 * np.exp(1j * (2.0 * t + 0.4)), 1e-15)


@check("drive: free evolution in the lab frame")
def _free_lab():
    w = driven_mode.DriveWaveform.linear(0.0, 1.0)
    tr = driven_mode.evolve(1.0 + 0.5j, TWO_PI, w, driven_mode.FrameSpec(0.0), (0.0, 3.0), 0.01)
    ref = (1.0 + 0.5j) * np.exp(-1j * TWO_PI * tr.t)
    return float(np.max(np.abs(tr.a - ref) / np.abs(ref))) < 1e-9


@check("drive: free evolution in the co-rotating frame is constant")
def _free_rot():
    w = driven_mode.DriveWaveform.linear(0.0, 1.0)
    tr = driven_mode.evolve(1.0 + 0.5j, TWO_PI, w, driven_mode.FrameSpec(TWO_PI), (0.0, 3.0), 0.01)
    return _close(tr.a, 1.0 + 0.5j, 1e-12)


@check("drive: closed forms vanish at t = 0")
def _closed_zero():
    return driven_mode.analytic_unbalanced(0.0, 0.2 * math.pi, TWO_PI) == 0 and driven_mode.analytic_balanced(0.0, 0.3, 0.1) == 0


@check("drive: one full fast period leaves only the secular term")
def _secular():
    return _close(driven_mode.analytic_unbalanced(1.0, 0.2 * math.pi, TWO_PI), 0.1j * math.pi, 1e-14)


@check("drive: resonant balanced amplitude grows at rate G_d")
def _slope():
    t = np.array([1.0, 2.0])
    a = np.abs(driven_mode.analytic_balanced(t, 0.3, 0.0))
    return math.isclose(a[1] - a[0], 0.3, rel_tol=1e-14)


@check("drive: balanced trajectory has no ripple")
def _no_ripple():
    w = driven_mode.DriveWaveform.balanced_drive(0.1 * TWO_PI, TWO_PI)
    tr = driven_mode.evolve(0.0, TWO_PI, w, driven_mode.FrameSpec(TWO_PI), (0.0, 10.0), 0.005)
    return driven_mode.ripple_metrics(tr).amplitude < 1e-9 * w.G_d * 10.0


# bloch_tls


@check("tls: zero field leaves the Bloch vector fixed")
def _still():
    t = np.linspace(0, 3, 31)
    rho = bloch_tls.precess(np.array([0.6, 0.0, 0.8]), lambda tt: np.zeros(3), t)
    return _close(rho, [0.6, 0.0, 0.8], 1e-14)


@check("tls: balanced drive has no nutation")
def _no_nutation():
    w = driven_mode.DriveWaveform.balanced_drive(0.1 * TWO_PI, TWO_PI)
    t = np.linspace(0.0, 12.0, 601)
    tr = bloch_tls.tls_drive(bloch_tls.BlochState.ground(), TWO_PI, w, driven_mode.FrameSpec(TWO_PI), t)
    return bloch_tls.nutation_amplitude(tr) < 1e-8


@check("tls: zero drive has zero nutation")
def _zero_nutation():
    w = driven_mode.DriveWaveform.linear(0.0, TWO_PI)
    t = np.linspace(0.0, 1.0, 11)
    tr = bloch_tls.tls_drive(bloch_tls.BlochState.ground(), TWO_PI, w, driven_mode.FrameSpec(TWO_PI), t)
    return bloch_tls.nutation_amplitude(tr) == 0.0


@check("tls: shifting the drive phase by pi mirrors the transverse components")
def _mirror():
    t = np.linspace(0.0, 4.0, 201)
    fr = driven_mode.FrameSpec(TWO_PI)
    g = bloch_tls.BlochState.ground()
    a = bloch_tls.tls_drive(g, TWO_PI, driven_mode.DriveWaveform.balanced_drive(0.5, TWO_PI, 0.3), fr, t).rho
    b = bloch_tls.tls_drive(g, TWO_PI, driven_mode.DriveWaveform.balanced_drive(0.5, TWO_PI, 0.3 + math.pi), fr, t).rho
    return _close(a[:, :2], -b[:, :2], 1e-8) and _close(a[:, 2], b[:, 2], 1e-8)


# coupled_modes


@check("modes: no coupling gives the partial frequencies")
def _uncoupled_spectrum():
    r = circuit_model.ModeRates(10.0, 9.0, 0.0, 0.0)
    return _close(coupled_modes.eigenvalues_full(coupled_modes.build_m(r)).omegas, [-10, -9, 9, 10], 1e-13)


@check("modes: balanced coupling is block diagonal and exactly co-rotating")
def _balanced_modes():
    r = coupled_modes.coupling_rates("balanced", 10.0, 9.5, 0.8)
    m = coupled_modes.build_m(r).m
    full = coupled_modes.eigenvalues_full(coupled_modes.build_m(r)).omegas
    rwa = coupled_modes.eigenvalues_rwa(r.S, r.Delta, r.g_minus).omegas
    return not np.any(m[:2, 2:]) and not np.any(m[2:, :2]) and _close(full, rwa, 1e-13) and coupled_modes.rwa_relative_error(r) < 1e-14


@check("modes: resonant co-rotating branches split by 2 g_minus")
def _splitting():
    s = coupled_modes.eigenvalues_rwa(20.0, 0.0, 0.3).positive
    return math.isclose(s[0] - s[1], 0.6, rel_tol=1e-14)


@check("modes: algebraic and explicit mode matrices agree")
def _algebraic():
    r = circuit_model.ModeRates(10.0, 9.0, 0.3, 0.2)
    a = coupled_modes.build_m(r).m
    b = coupled_modes.build_m_algebraic(r.S, r.Delta, r.g_minus, r.g_plus).m
    return _close(a, b, 1e-14)


# transmission_lines


def _lines(L_g, C_g):
    return transmission_lines.LineParams.from_impedances(50.0, 50.0, 1e8, 1e8, L_g, C_g)


@check("lines: coupling impedance at the geometric mean gives kappa = 0")
def _kappa_zero():
    return transmission_lines.kappa_chi(_lines(2.5e-7, 1e-10), TWO_PI * 5e9).kappa == 0.0


@check("lines: uncoupled lines have kappa = chi = 0")
def _uncoupled_lines():
    kc = transmission_lines.kappa_chi(_lines(0.0, 0.0), TWO_PI * 5e9)
    return kc.kappa == 0.0 and kc.chi == 0.0


@check("lines: zero length propagates as the identity")
def _zero_length():
    x = np.array([1.0, 0.2j, -0.3, 0.5])
    return _close(transmission_lines.propagate(x, _lines(2.5e-7, 1e-10), TWO_PI * 5e9, 0.0), x, 1e-15)


@check("lines: matched coupler isolates the fourth port")
def _isolation():
    r = transmission_lines.coupler_response(_lines(2.5e-7, 1e-10), TWO_PI * 5e9, 0.01)
    return abs(r.isolated) < 1e-12


@check("lines: uncoupled section transmits a pure phase")
def _pure_phase():
    r = transmission_lines.coupler_response(_lines(0.0, 0.0), TWO_PI * 5e9, 0.037)
    return math.isclose(abs(r.through), 1.0, rel_tol=1e-13) and abs(r.coupled) < 1e-13


# transmon


@check("transmon: E_J = E_C gives lambda = 1/(3 sqrt 8)")
def _lam_unit():
    return math.isclose(transmon.plasma_lambda(1.0, 1.0).lam, 1.0 / (3.0 * math.sqrt(8.0)), rel_tol=1e-15)


@check("transmon: doubling E_J divides lambda by sqrt 2")
def _lam_scaling():
    a = transmon.plasma_lambda(50.0, 1.0).lam
    b = transmon.plasma_lambda(100.0, 1.0).lam
    return math.isclose(a / b, math.sqrt(2.0), rel_tol=1e-14)


@check("transmon: lambda = 0 leaves the bare lowering operator")
def _bare():
    return _close(transmon.dressed_operators((0.0, 12)).b_bar, transmon.lowering(12), 0.0)


@check("transmon: harmonic balanced coupling cancels the k+1 strip element")
def _harmonic_null():
    e = transmon.strip_matrix_elements((0.0, 12), 3, 20, transmon.CouplingSpec(1.0, -1.0))
    return abs(e.elem_k1_n1) < 1e-14


@check("transmon: harmonic k+1 null sits at g_l/g_c = -1")
def _harmonic_ratio():
    return math.isclose(transmon.zero_crossing_ratio((0.0, 12), 3, "k+1"), -1.0, rel_tol=1e-14)


@check("transmon: harmonic limit has no non-co-rotating terms")
def _harmonic_terms():
    h = transmon.non_rwa_hamiltonian(0.0, 1.0)
    return not h["strip2"] and not h["strip4"] and bool(h["rwa"])


@check("transmon: deep transmon ground energy barely depends on gate charge")
def _dispersion():
    ej = 163.0
    e0 = transmon.charge_basis_spectrum(transmon.TransmonModel(ej, 1.0, 0.0), levels=2).energies[0]
    e5 = transmon.charge_basis_spectrum(transmon.TransmonModel(ej, 1.0, 0.5), levels=2).energies[0]
    return abs(e5 - e0) / abs(e0) < 1e-4


# mist_sim


@check("mist: undriven resonator decays freely")
def _free_resonator():
    r = mist_sim.resonator_response(TWO_PI * 6.0, 0.1, 0.0, alpha0=1.0 + 0.5j)
    t = np.linspace(0.0, 40.0, 9)
    return _close(r.alpha(t), (1.0 + 0.5j) * np.exp((-1j * TWO_PI * 6.0 - 0.05) * t), 1e-13)


@check("mist: resonant steady state holds 4 |eps|^2 / kappa^2 photons")
def _steady():
    eps = mist_sim.drive_epsilon(0.1, 7.0)
    r = mist_sim.resonator_response(TWO_PI * 6.0, 0.1, eps)
    return math.isclose(r.steady_state_photons, 4 * eps**2 / 0.01, rel_tol=1e-14)


@check("mist: capacitive drive acts only through the charge operator")
def _capacitive_drive():
    rng = np.random.default_rng(0)
    q = rng.normal(size=(4, 4))
    phi = rng.normal(size=(4, 4))
    a = mist_sim.effective_qubit_drive(q, phi, transmon.CouplingSpec(0.2, 0.0)).A
    return _close(a, -0.2j * q, 0.0) and not np.any(mist_sim.effective_qubit_drive(q, phi, transmon.CouplingSpec(0.0, 0.0)).A)


@check("mist: zero drive gives zero leakage with conserved norm")
def _zero_drive():
    cfg = mist_sim.ReadoutConfig(photon_numbers=(0.0,), n_levels=12, n_max=20)
    wq = TWO_PI * 4.5
    r = mist_sim.simulate_point(cfg, wq, 0.0, transmon.CouplingSpec(0.1, 0.0))
    return float(np.max(np.abs(r.leakage))) < 1e-10 and r.norm_error < 1e-12


def run_selftest(report: Callable[[str], None] = print) -> bool:
    """Run every check; report ``PASS``/``FAIL`` lines and return overall success."""
    ok_all = True
    t0 = time.perf_counter()
    for name, fn in CHECKS:
        try:
            ok = bool(fn())
            detail = ""
        except Exception as exc:  # a raising check is a failing check
            ok = False
            detail = f" ({type(exc).__name__}: {exc})"
        ok_all &= ok
        report(f"{'PASS' if ok else 'FAIL'}  {name}{detail}")
    report(f"{sum(1 for _ in CHECKS)} checks in {time.perf_counter() - t0:.2f} s: {'all passed' if ok_all else 'FAILURES'}")
    return ok_all

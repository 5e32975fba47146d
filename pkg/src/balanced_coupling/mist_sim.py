"""Semiclassical readout of a transmon: measurement-induced state transitions.

The simulation has two steps.

1. The readout resonator is a damped linear oscillator with a classical drive.
   Its amplitude ``alpha(t)`` has a closed form for the pulse used here.
2. ``alpha(t)`` replaces the resonator operator in the coupling
   ``g_c Q_q Q_r - g_l Phi_q Phi_r``, so the exact charge-basis transmon sees
   ``H_d(t) = alpha A + conj(alpha) A^dag`` with ``A = -i g_c Q_q - g_l Phi_q``.

Units are ``hbar = 1``, time in ns, angular frequencies in rad/ns.
Leakage is the population outside the two lowest transmon eigenstates once
the resonator has rung down after the pulse. It is averaged over gate charge.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from .constants import TWO_PI
from .splitting import KAHAN_LI_6, evolve_split, stage_times
from .sweep import CheckpointStore, parallel_map, stable_hash
from .transmon import CouplingSpec, TransmonModel, charge_basis_spectrum

__all__ = [
    "PulseSpec",
    "ReadoutConfig",
    "ResonatorResponse",
    "MistTransmon",
    "EffectiveDrive",
    "ChiResult",
    "PointResult",
    "LeakageMap",
    "DispersiveRegimeWarning",
    "NormDriftError",
    "NoRootError",
    "resonator_response",
    "drive_epsilon",
    "mist_transmon",
    "effective_qubit_drive",
    "dispersive_shift",
    "match_capacitive_coupling",
    "series_coupling",
    "simulate_point",
    "simulate_leakage",
    "total_coupling",
    "default_panels",
    "config_to_dict",
    "sweep",
]

NORM_TOL = 1e-6


class DispersiveRegimeWarning(UserWarning):
    """A perturbative energy denominator is not large compared with the coupling."""


class NormDriftError(RuntimeError):
    """The state norm drifted beyond tolerance."""


class NoRootError(ValueError):
    """The requested dispersive shift cannot be reached with capacitive coupling."""


@dataclass(frozen=True)
class PulseSpec:
    """Flat-top readout pulse with raised-cosine edges, then a free ring-down window (ns)."""

    duration: float = 200.0
    ramp: float = 2.0
    ringdown: float = 120.0

    def __post_init__(self):
        if not self.duration > 0:
            raise ValueError(f"pulse duration must be positive, got {self.duration!r}")
        if not (self.ramp > 0 and 2 * self.ramp <= self.duration):
            raise ValueError(f"ramp must be in (0, duration/2], got {self.ramp!r}")
        if self.ringdown < 0:
            raise ValueError(f"ringdown must be non-negative, got {self.ringdown!r}")

    @property
    def t_end(self) -> float:
        return self.duration + self.ringdown

    def segments(self):
        """``(start, end, c, d)`` with envelope ``c + d cos(pi (t - start)/ramp)`` on each piece."""
        T, r = self.duration, self.ramp
        return [
            (0.0, r, 0.5, -0.5),
            (r, T - r, 1.0, 0.0),
            (T - r, T, 0.5, 0.5),
            (T, math.inf, 0.0, 0.0),
        ]

    def envelope(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        w = math.pi / self.ramp
        for s0, s1, c, d in self.segments():
            sel = (t >= s0) & (t < s1)
            out = np.where(sel, c + d * np.cos(w * (t - s0)), out)
        return out


@dataclass(frozen=True)
class ReadoutConfig:
    """One leakage series: coupling choice, grids and numerics.

    ``match_reference`` turns the series into a capacitive one whose ``g_c``
    reproduces, at each qubit frequency, the dispersive shift of the coupling
    ``(theta, ratio_gl_gc)`` given there.
    """

    omega_r: float = TWO_PI * 6.0
    kappa: float = 1.0 / 15.0
    theta: float = 0.05
    ratio_gl_gc: float = 0.0
    match_reference: Optional[tuple] = None
    strip_k1: bool = False
    strip_k3: bool = False
    E_C: float = TWO_PI * 0.2
    qubit_freqs: tuple = tuple(TWO_PI * np.linspace(4.0, 5.0, 10))
    n_g_grid: tuple = tuple(np.linspace(-0.5, 0.0, 20))
    photon_numbers: tuple = (1.0, 5.0, 10.0, 20.0, 40.0, 80.0)
    pulse: PulseSpec = field(default_factory=PulseSpec)
    n_levels: int = 22
    n_max: int = 30
    dt: float = 0.01
    label: str = "series"

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError(f"kappa must be positive, got {self.kappa!r}")
        if not self.omega_r > 0:
            raise ValueError(f"omega_r must be positive, got {self.omega_r!r}")
        if not self.theta >= 0:
            raise ValueError(f"theta must be non-negative, got {self.theta!r}")
        if self.n_levels < 10:
            raise ValueError(f"at least 10 transmon levels are needed, got {self.n_levels}")
        if any(n < 0 for n in self.photon_numbers):
            raise ValueError("photon numbers must be non-negative")
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt!r}")

    @property
    def stripped(self) -> bool:
        return self.strip_k1 or self.strip_k3

    def with_(self, **kw) -> "ReadoutConfig":
        return replace(self, **kw)


# Step 1: resonator --------------------------------------------------------------


def drive_epsilon(kappa: float, n_photons: float) -> float:
    """Resonant drive amplitude whose steady state holds ``n_photons``: ``(kappa/2) sqrt(n)``."""
    return 0.5 * kappa * math.sqrt(n_photons)


@dataclass(frozen=True)
class ResonatorResponse:
    """``alpha(t) = A(t) exp(-i omega_d t)`` for ``d alpha/dt = -(i omega_r + kappa/2) alpha - i eps(t) exp(-i omega_d t)``.

    ``eps(t) = epsilon * envelope(t)`` and ``alpha(0) = alpha0``.
    """

    omega_r: float
    kappa: float
    epsilon: complex
    pulse: PulseSpec
    omega_d: float
    alpha0: complex = 0.0

    @property
    def rate(self) -> complex:
        return 0.5 * self.kappa + 1j * (self.omega_r - self.omega_d)

    @property
    def steady_state_photons(self) -> float:
        return float(abs(self.epsilon / self.rate) ** 2)

    def slow_amplitude(self, t) -> np.ndarray:
        """``A(t)``, the amplitude in the frame rotating at the drive frequency."""
        t = np.asarray(t, dtype=float)
        lam = self.rate
        w = math.pi / self.pulse.ramp
        out = np.empty(t.shape, dtype=complex)
        a_start = complex(self.alpha0)
        for s0, s1, c, d in self.pulse.segments():
            sel = (t >= s0) & (t < s1)
            if np.any(sel):
                out[sel] = self._segment(a_start, t[sel] - s0, lam, w, c, d)
            if math.isfinite(s1):
                a_start = complex(self._segment(a_start, np.array([s1 - s0]), lam, w, c, d)[0])
        return out

    def _segment(self, a0, tau, lam, w, c, d):
        decay = np.exp(-lam * tau)
        val = a0 * decay
        if c != 0.0:
            val = val - 1j * self.epsilon * c * (-np.expm1(-lam * tau)) / lam
        if d != 0.0:
            fp = (np.exp(1j * w * tau) - decay) / (lam + 1j * w)
            fm = (np.exp(-1j * w * tau) - decay) / (lam - 1j * w)
            val = val - 1j * self.epsilon * d * 0.5 * (fp + fm)
        return val

    def alpha(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return self.slow_amplitude(t) * np.exp(-1j * self.omega_d * t)


def resonator_response(
    omega_r: float,
    kappa: float,
    epsilon: complex,
    pulse: PulseSpec = PulseSpec(),
    omega_d: Optional[float] = None,
    alpha0: complex = 0.0,
) -> ResonatorResponse:
    if not kappa > 0:
        raise ValueError(f"kappa must be positive, got {kappa!r}")
    return ResonatorResponse(omega_r, kappa, epsilon, pulse, omega_r if omega_d is None else omega_d, alpha0)


# Step 2: transmon ---------------------------------------------------------------


@dataclass(frozen=True)
class MistTransmon:
    """Exact transmon levels (energies relative to the ground state) with ``Q_q`` and ``Phi_q``."""

    omega_q: float
    E_J: float
    E_C: float
    n_g: float
    energies: np.ndarray
    Q: np.ndarray
    Phi: np.ndarray


def _e01(E_J, E_C, n_max):
    s = charge_basis_spectrum(TransmonModel(E_J, E_C, 0.0, n_max=n_max), levels=2, check=False)
    return s.energies[1] - s.energies[0]


def solve_ej(omega_q: float, E_C: float, n_max: int = 30) -> float:
    """``E_J`` for which the exact 0-1 splitting at zero gate charge equals ``omega_q``."""
    guess = (omega_q + E_C) ** 2 / (8.0 * E_C)
    f = lambda ej: _e01(ej, E_C, n_max) - omega_q
    lo, hi = 0.5 * guess, 2.0 * guess
    return brentq(f, lo, hi, xtol=1e-14 * guess, rtol=4 * np.finfo(float).eps, maxiter=200)


def mist_transmon(omega_q: float, E_C: float, n_g: float, n_levels: int, n_max: int = 30, E_J=None) -> MistTransmon:
    if E_J is None:
        E_J = solve_ej(omega_q, E_C, n_max)
    m = TransmonModel(E_J, E_C, n_g, n_max=n_max)
    s = charge_basis_spectrum(m, levels=n_levels, check=True)
    return MistTransmon(
        omega_q, E_J, E_C, n_g, s.energies - s.energies[0], s.q_matrix(E_J, E_C), s.flux_matrix(E_J, E_C)
    )


@dataclass(frozen=True)
class EffectiveDrive:
    """``H_d = alpha A + conj(alpha) A^dag = Re(alpha) P + Im(alpha) R``."""

    A: np.ndarray

    @property
    def P(self) -> np.ndarray:
        return self.A + self.A.conj().T

    @property
    def R(self) -> np.ndarray:
        return 1j * (self.A - self.A.conj().T)

    def hamiltonian(self, alpha: complex) -> np.ndarray:
        return alpha * self.A + np.conj(alpha) * self.A.conj().T

    def counter_rotating_part(self) -> np.ndarray:
        """Elements of ``A`` that lower the transmon while absorbing a drive quantum."""
        return np.triu(self.A, 1)


def effective_qubit_drive(Q: np.ndarray, Phi: np.ndarray, c: CouplingSpec, strip_k1: bool = False, strip_k3: bool = False) -> EffectiveDrive:
    """Classical-field drive operator from the transmon ``Q_q``, ``Phi_q`` (eigenbasis).

    ``strip_k1`` zeroes ``A[k, k+1]`` (the ``|k> -> |k+1>`` step that also emits
    a drive quantum) and ``strip_k3`` zeroes ``A[k+3, k]`` for every ``k``.
    """
    A = -1j * c.g_c * np.asarray(Q, dtype=complex) - c.g_l * np.asarray(Phi, dtype=complex)
    A = A.copy()
    n = A.shape[0]
    k = np.arange(n)
    if strip_k1:
        A[k[:-1], k[:-1] + 1] = 0.0
    if strip_k3 and n > 3:
        A[k[:-3] + 3, k[:-3]] = 0.0
    return EffectiveDrive(A)


def total_coupling(theta: float, omega_q: float, omega_r: float) -> float:
    """``g = (theta/2) sqrt(omega_q omega_r)``."""
    return 0.5 * theta * math.sqrt(omega_q * omega_r)


@dataclass(frozen=True)
class ChiResult:
    chi: float
    chi0: float
    chi1: float
    min_denominator: float


def _level_shift(E, B, k, omega_r, g_scale, weights_tol=1e-12):
    d_up = E[k] - E - omega_r  # absorbs nothing, emits a photon: B_jk
    d_dn = E[k] - E + omega_r
    n_up = np.abs(B[:, k]) ** 2
    n_dn = np.abs(B[k, :]) ** 2
    shift = float(np.sum(n_up / d_up) + np.sum(n_dn / d_dn))
    big = max(n_up.max(), n_dn.max(), np.finfo(float).tiny)
    rel = np.concatenate([np.abs(d_up)[n_up > weights_tol * big], np.abs(d_dn)[n_dn > weights_tol * big]])
    return shift, float(rel.min()) if rel.size else math.inf


def dispersive_shift(t: MistTransmon, c: CouplingSpec, omega_r: float) -> ChiResult:
    """Second-order shift of the 0-1 transition per resonator photon, ``chi = (chi_1 - chi_0) / 2``.

    ``chi_k`` sums over all retained levels ``j`` both the photon-emitting
    and the photon-absorbing virtual transitions of ``B = -g_l Phi + i g_c Q``:
    ``|B_jk|^2/(E_k - E_j - omega_r) + |B_kj|^2/(E_k - E_j + omega_r)``. In the
    two-level, co-rotating-only limit this is ``g^2 / (omega_q - omega_r)``.
    Emits ``DispersiveRegimeWarning`` when a contributing denominator is below
    ten times ``|g_c| + |g_l|``.
    """
    B = -c.g_l * t.Phi + 1j * c.g_c * t.Q
    g = abs(c.g_c) + abs(c.g_l)
    chi0, m0 = _level_shift(t.energies, B, 0, omega_r, g)
    chi1, m1 = _level_shift(t.energies, B, 1, omega_r, g)
    mind = min(m0, m1)
    if g > 0 and mind < 10.0 * g:
        warnings.warn(
            f"energy denominator {mind:.4g} rad/ns is below 10 g = {10 * g:.4g} rad/ns "
            f"at omega_q/2pi = {t.omega_q / TWO_PI:.4g} GHz",
            DispersiveRegimeWarning,
            stacklevel=2,
        )
    return ChiResult(0.5 * (chi1 - chi0), chi0, chi1, mind)


def match_capacitive_coupling(t: MistTransmon, omega_r: float, target_chi: float, g_guess: float, rtol: float = 1e-12) -> float:
    """Capacitive ``g_c > 0`` with ``dispersive_shift == target_chi`` (bracketed root search)."""
    if not g_guess > 0:
        raise ValueError(f"g_guess must be positive, got {g_guess!r}")

    def f(g):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", DispersiveRegimeWarning)
            return dispersive_shift(t, CouplingSpec(g, 0.0), omega_r).chi - target_chi

    lo, hi = 0.0, g_guess
    f_hi = f(hi)
    f_lo = -target_chi
    for _ in range(60):
        if f_lo * f_hi <= 0:
            break
        lo, f_lo = hi, f_hi
        hi *= 2.0
        f_hi = f(hi)
    else:
        raise NoRootError(f"no capacitive coupling reaches chi = {target_chi!r} rad/ns")
    if f_hi == 0.0:
        return hi
    return brentq(f, lo, hi, xtol=1e-15 * g_guess, rtol=rtol, maxiter=200)


@dataclass(frozen=True)
class SeriesCoupling:
    """Coupling used by a series at one qubit frequency, with its dispersive shift."""

    omega_q: float
    coupling: CouplingSpec
    chi: float
    chi_target: float
    min_denominator: float

    @property
    def chi_mismatch(self) -> float:
        if self.chi_target == 0.0:
            return 0.0
        return abs(self.chi - self.chi_target) / abs(self.chi_target)


def series_coupling(cfg: ReadoutConfig, omega_q: float, E_J: Optional[float] = None) -> SeriesCoupling:
    """Resolve the coupling of ``cfg`` at ``omega_q``; matching uses zero gate charge."""
    t0 = mist_transmon(omega_q, cfg.E_C, 0.0, cfg.n_levels, cfg.n_max, E_J)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DispersiveRegimeWarning)
        if cfg.match_reference is None:
            g = total_coupling(cfg.theta, omega_q, cfg.omega_r)
            c = CouplingSpec.from_total(g, cfg.ratio_gl_gc)
            res = dispersive_shift(t0, c, cfg.omega_r)
            return SeriesCoupling(omega_q, c, res.chi, res.chi, res.min_denominator)
        theta_ref, ratio_ref = cfg.match_reference
        g_ref = total_coupling(theta_ref, omega_q, cfg.omega_r)
        ref = dispersive_shift(t0, CouplingSpec.from_total(g_ref, ratio_ref), cfg.omega_r)
        g_c = match_capacitive_coupling(t0, cfg.omega_r, ref.chi, g_ref)
        c = CouplingSpec(g_c, 0.0)
        res = dispersive_shift(t0, c, cfg.omega_r)
        return SeriesCoupling(omega_q, c, res.chi, ref.chi, res.min_denominator)


@dataclass(frozen=True)
class PointResult:
    """Leakage at one (qubit frequency, gate charge) for every photon number and initial state.

    ``leakage[i, s]`` is for ``photon_numbers[i]`` and initial state ``|s>``.
    """

    omega_q: float
    n_g: float
    leakage: np.ndarray
    norm_error: float


def simulate_point(cfg: ReadoutConfig, omega_q: float, n_g: float, coupling: CouplingSpec, E_J: Optional[float] = None) -> PointResult:
    """Evolve ``|0>`` and ``|1>`` under every photon number of ``cfg`` at one grid point."""
    t = mist_transmon(omega_q, cfg.E_C, n_g, cfg.n_levels, cfg.n_max, E_J)
    drive = effective_qubit_drive(t.Q, t.Phi, coupling, cfg.strip_k1, cfg.strip_k3)
    nph = np.asarray(cfg.photon_numbers, dtype=float)
    N = len(t.energies)
    psi0 = np.zeros((N, 2 * len(nph)), dtype=complex)
    psi0[0, 0::2] = 1.0
    psi0[1, 1::2] = 1.0
    scale = np.repeat(np.sqrt(nph), 2)
    # Undriven columns evolve by phases only, with no round-off from basis changes.
    psi = psi0 * np.exp(-1j * t.energies * cfg.pulse.t_end)[:, None]
    driven = scale > 0
    if np.any(driven) and np.any(drive.A):
        hs, ts = stage_times(cfg.pulse.t_end, cfg.dt, KAHAN_LI_6)
        # Unit-photon response; each column is scaled by sqrt(n).
        unit = resonator_response(cfg.omega_r, cfg.kappa, drive_epsilon(cfg.kappa, 1.0), cfg.pulse)
        a = unit.alpha(ts)
        P = drive.P
        use_p = bool(np.max(np.abs(P)) > 1e-13 * np.max(np.abs(drive.R)))
        psi[:, driven] = evolve_split(
            t.energies, drive.R, P if use_p else None, a.imag, a.real if use_p else None, hs, scale[driven], psi0[:, driven]
        )
    pops = np.abs(psi) ** 2
    norm_err = float(np.max(np.abs(pops.sum(axis=0) - 1.0)))
    if norm_err > NORM_TOL:
        raise NormDriftError(f"norm drift {norm_err:.3e} at omega_q/2pi = {omega_q / TWO_PI:.6g} GHz, n_g = {n_g:.6g}")
    leak = pops[2:].sum(axis=0)
    return PointResult(omega_q, n_g, leak.reshape(len(nph), 2), norm_err)


@dataclass(frozen=True)
class LeakageMap:
    """Gate-charge averaged leakage, shape ``(n_freqs, n_photons, 2)``."""

    label: str
    qubit_freqs: np.ndarray
    photon_numbers: np.ndarray
    mean: np.ndarray
    std: np.ndarray
    couplings: tuple
    max_norm_error: float

    @classmethod
    def from_points(cls, cfg: ReadoutConfig, couplings, points) -> "LeakageMap":
        """``points[i][j]`` is the result at ``qubit_freqs[i]``, ``n_g_grid[j]``."""
        arr = np.array([[p.leakage for p in row] for row in points])  # (f, g, n, 2)
        return cls(
            cfg.label,
            np.asarray(cfg.qubit_freqs, dtype=float),
            np.asarray(cfg.photon_numbers, dtype=float),
            arr.mean(axis=1),
            arr.std(axis=1),
            tuple(couplings),
            float(max(p.norm_error for row in points for p in row)),
        )

    def columns(self) -> dict:
        nf, nn = len(self.qubit_freqs), len(self.photon_numbers)
        fi, ni, si = np.meshgrid(np.arange(nf), np.arange(nn), np.arange(2), indexing="ij")
        fi, ni, si = fi.ravel(), ni.ravel(), si.ravel()
        cp = self.couplings
        return {
            "omega_q_ghz": self.qubit_freqs[fi] / TWO_PI,
            "photon_number": self.photon_numbers[ni],
            "initial_state": si,
            "leakage_mean": self.mean[fi, ni, si],
            "leakage_std_over_ng": self.std[fi, ni, si],
            "g_c_ghz": np.array([cp[i].coupling.g_c for i in fi]) / TWO_PI,
            "g_l_ghz": np.array([cp[i].coupling.g_l for i in fi]) / TWO_PI,
            "chi_mhz": np.array([cp[i].chi for i in fi]) / TWO_PI * 1e3,
            "chi_target_mhz": np.array([cp[i].chi_target for i in fi]) / TWO_PI * 1e3,
        }


def simulate_leakage(cfg: ReadoutConfig) -> LeakageMap:
    """Serial leakage map for one series (see ``sweep`` for the parallel, checkpointed version)."""
    couplings = []
    rows = []
    for wq in cfg.qubit_freqs:
        ej = solve_ej(wq, cfg.E_C, cfg.n_max)
        sc = series_coupling(cfg, wq, ej)
        couplings.append(sc)
        rows.append([simulate_point(cfg, wq, ng, sc.coupling, ej) for ng in cfg.n_g_grid])
    return LeakageMap.from_points(cfg, couplings, rows)


def default_panels(base: Optional[ReadoutConfig] = None) -> list:
    """The six series of the capacitive-versus-balanced comparison.

    ``a``: balanced ``g_l/g_c = -1`` at ``theta = 0.05`` and its matched capacitive
    partner. ``b``: ``g_l/g_c = 3`` at total ``theta = 0.15`` and its partner.
    ``c``: capacitive ``theta = 0.05`` with and without the two targeted
    strip-changing elements.
    """
    base = base or ReadoutConfig()
    return [
        base.with_(label="a_balanced", theta=0.05, ratio_gl_gc=-1.0),
        base.with_(label="a_capacitive", theta=0.05, ratio_gl_gc=0.0, match_reference=(0.05, -1.0)),
        base.with_(label="b_ratio3", theta=0.15, ratio_gl_gc=3.0),
        base.with_(label="b_capacitive", theta=0.15, ratio_gl_gc=0.0, match_reference=(0.15, 3.0)),
        base.with_(label="c_full", theta=0.05, ratio_gl_gc=0.0),
        base.with_(label="c_stripped", theta=0.05, ratio_gl_gc=0.0, strip_k1=True, strip_k3=True),
    ]


def config_to_dict(cfg: ReadoutConfig) -> dict:
    """Plain-data view of a config (floats kept exact), used for hashing and manifests."""
    d = {}
    for k in cfg.__dataclass_fields__:
        v = getattr(cfg, k)
        if isinstance(v, PulseSpec):
            v = {"duration": v.duration, "ramp": v.ramp, "ringdown": v.ringdown}
        elif isinstance(v, tuple):
            v = [float(x) for x in v]
        elif isinstance(v, (np.floating, np.integer)):
            v = v.item()
        d[k] = v
    return d


def _point_task(args):
    cfg, wq, ng, g_c, g_l, e_j = args
    r = simulate_point(cfg, wq, ng, CouplingSpec(g_c, g_l), e_j)
    return {"leakage": r.leakage.tolist(), "norm_error": r.norm_error}


def sweep(
    configs: Sequence[ReadoutConfig],
    workers: Optional[int] = None,
    checkpoint_dir=None,
    progress=None,
) -> list:
    """Leakage maps for several series over their (qubit frequency, gate charge) grids.

    Couplings and matched dispersive shifts are resolved first, in the calling
    process. Grid points then run as independent tasks; each finished point is
    checkpointed under a key that hashes its full input, so an interrupted
    sweep resumes where it stopped. Output order follows ``configs`` and the
    grids, whatever order tasks finish in.
    """
    configs = list(configs)
    labels = [c.label for c in configs]
    if len(set(labels)) != len(labels):
        raise ValueError(f"series labels must be unique, got {labels}")
    store = CheckpointStore(checkpoint_dir) if checkpoint_dir is not None else None
    ej_cache: dict = {}
    resolved = []
    tasks, keys, index = [], [], []
    for ci, cfg in enumerate(configs):
        cfg_hash = stable_hash(config_to_dict(cfg))
        couplings = []
        for fi, wq in enumerate(cfg.qubit_freqs):
            ek = (float(wq), float(cfg.E_C), int(cfg.n_max))
            if ek not in ej_cache:
                ej_cache[ek] = solve_ej(wq, cfg.E_C, cfg.n_max)
            sc = series_coupling(cfg, wq, ej_cache[ek])
            couplings.append(sc)
            for gi, ng in enumerate(cfg.n_g_grid):
                tasks.append((cfg, float(wq), float(ng), sc.coupling.g_c, sc.coupling.g_l, ej_cache[ek]))
                keys.append(f"{cfg.label}_{fi:03d}_{gi:03d}_{cfg_hash}_" + stable_hash([float(wq), float(ng), sc.coupling.g_c, sc.coupling.g_l]))
                index.append((ci, fi, gi))
        resolved.append(couplings)
    out = parallel_map(_point_task, tasks, keys, workers=workers, store=store, progress=progress)
    grids = [
        [[None] * len(cfg.n_g_grid) for _ in cfg.qubit_freqs] for cfg in configs
    ]
    for (ci, fi, gi), payload, task in zip(index, out, tasks):
        grids[ci][fi][gi] = PointResult(task[1], task[2], np.asarray(payload["leakage"]), payload["norm_error"])
    return [LeakageMap.from_points(cfg, resolved[ci], grids[ci]) for ci, cfg in enumerate(configs)]

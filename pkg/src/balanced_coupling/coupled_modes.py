"""Normal modes of two coupled resonators.

The mode vector is ``X = (a, b, a*, b*)`` and ``dX/dt = m X``, with

    i m = [[ w_a,  g_-,   0,   -g_+],
           [ g_-,  w_b,  -g_+,  0  ],
           [ 0,    g_+,  -w_a, -g_- ],
           [ g_+,  0,    -g_-, -w_b]]

The eigenvalues of ``i m`` are the normal-mode frequencies. Setting the
inner off-diagonal blocks (``g_+``) to zero gives the co-rotating-only
spectrum, which is exact for balanced coupling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit_model import ModeRates, NormalizedCoupled

__all__ = [
    "InstabilityError",
    "ModeMatrix",
    "Spectrum",
    "build_m",
    "build_m_algebraic",
    "eigenvalues_full",
    "eigenvalues_rwa",
    "rwa_relative_error",
    "rotating_frame_generator",
    "spectrum_sweep",
    "coupling_rates",
]

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)

IMAG_TOL = 1e-9


class InstabilityError(ArithmeticError):
    """The mode matrix has complex normal-mode frequencies."""


@dataclass(frozen=True)
class ModeMatrix:
    m: np.ndarray

    @property
    def display(self) -> np.ndarray:
        """``i m``, the real matrix of rates."""
        return 1j * self.m


@dataclass(frozen=True)
class Spectrum:
    omegas: np.ndarray

    @property
    def positive(self) -> np.ndarray:
        """The two positive-branch frequencies in decreasing order."""
        return self.omegas[::-1][:2]


def _rates(n) -> ModeRates:
    if isinstance(n, ModeRates):
        return n
    if isinstance(n, NormalizedCoupled):
        return n.rates
    raise TypeError(f"expected NormalizedCoupled or ModeRates, got {type(n).__name__}")


def build_m(n: NormalizedCoupled | ModeRates) -> ModeMatrix:
    """Mode matrix written out entry by entry."""
    r = _rates(n)
    wa, wb, gm, gp = r.omega_a, r.omega_b, r.g_minus, r.g_plus
    disp = np.array(
        [
            [wa, gm, 0.0, -gp],
            [gm, wb, -gp, 0.0],
            [0.0, gp, -wa, -gm],
            [gp, 0.0, -gm, -wb],
        ],
        dtype=complex,
    )
    return ModeMatrix(-1j * disp)


def build_m_algebraic(S: float, Delta: float, g_minus: float, g_plus: float) -> ModeMatrix:
    """Mode matrix from Kronecker products of Pauli matrices."""
    inner = g_minus * PAULI_X + 0.5 * Delta * PAULI_Z + 0.5 * S * PAULI_I
    return ModeMatrix(-1j * (np.kron(PAULI_Z, inner) - 1j * g_plus * np.kron(PAULI_Y, PAULI_X)))


def eigenvalues_full(mm: ModeMatrix) -> Spectrum:
    """Sorted real eigenvalues of ``i m``."""
    ev = np.linalg.eigvals(mm.display)
    scale = max(np.max(np.abs(ev)), np.finfo(float).tiny)
    if np.max(np.abs(ev.imag)) > IMAG_TOL * scale:
        raise InstabilityError(f"complex normal-mode frequencies: {ev!r}")
    return Spectrum(np.sort(ev.real))


def eigenvalues_rwa(S: float, Delta: float, g_minus: float) -> Spectrum:
    """``+/-(S/2 +/- sqrt(g_-^2 + Delta^2/4))``, sorted."""
    root = np.hypot(g_minus, 0.5 * Delta)
    hi, lo = 0.5 * S + root, 0.5 * S - root
    return Spectrum(np.sort(np.array([hi, lo, -lo, -hi])))


def rwa_relative_error(n: NormalizedCoupled | ModeRates) -> float:
    """Largest relative deviation of the co-rotating-only positive branches from the full ones."""
    r = _rates(n)
    full = eigenvalues_full(build_m(r)).positive
    rwa = eigenvalues_rwa(r.S, r.Delta, r.g_minus).positive
    return float(np.max(np.abs(full - rwa) / np.abs(full)))


def rotating_frame_generator(mm: ModeMatrix, omega_a: float, omega_b: float, t: float) -> np.ndarray:
    """Generator for ``(a_bar, b_bar, a_bar*, b_bar*)`` with ``a_bar = a exp(i omega_a t)``."""
    ph = np.array([omega_a, omega_b, -omega_a, -omega_b])
    d = np.exp(1j * ph * t)
    return (d[:, None] * mm.m) / d[None, :] + np.diag(1j * ph)


def coupling_rates(kind: str, omega_a: float, omega_b: float, g: float) -> ModeRates:
    """Rates for a coupling of total strength ``g``.

    ``capacitive``: ``g_c = g``; ``inductive``: ``g_l = g``;
    ``balanced``: ``g_c = -g_l = g/2``; ``antibalanced``: ``g_c = g_l = g/2``.
    """
    if kind == "capacitive":
        return ModeRates.from_gc_gl(omega_a, omega_b, g, 0.0)
    if kind == "inductive":
        return ModeRates.from_gc_gl(omega_a, omega_b, 0.0, g)
    if kind == "balanced":
        return ModeRates.from_gc_gl(omega_a, omega_b, 0.5 * g, -0.5 * g)
    if kind == "antibalanced":
        return ModeRates.from_gc_gl(omega_a, omega_b, 0.5 * g, 0.5 * g)
    raise ValueError(f"unknown coupling kind {kind!r}")


def spectrum_sweep(rates_list) -> dict:
    """Positive-branch full and co-rotating-only frequencies over a list of ``ModeRates``."""
    cols = {k: [] for k in ("omega_plus_full", "omega_minus_full", "omega_plus_rwa", "omega_minus_rwa", "rel_err")}
    for r in rates_list:
        full = eigenvalues_full(build_m(r)).positive
        rwa = eigenvalues_rwa(r.S, r.Delta, r.g_minus).positive
        cols["omega_plus_full"].append(full[0])
        cols["omega_minus_full"].append(full[1])
        cols["omega_plus_rwa"].append(rwa[0])
        cols["omega_minus_rwa"].append(rwa[1])
        cols["rel_err"].append(float(np.max(np.abs(full - rwa) / np.abs(full))))
    return {k: np.asarray(v) for k, v in cols.items()}

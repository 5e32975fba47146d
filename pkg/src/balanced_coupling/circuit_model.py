"""Lumped-element circuits reduced to normalized Hamiltonian quantities.

Two circuits are handled: a single LC resonator driven through a capacitor
and a mutual inductance, and two LC resonators coupled through a capacitor
and a mutual inductance. Inputs are SI values.

The coupled circuit is reduced internally in units of ``C_a`` and ``L_a``
(so impedances are in units of ``sqrt(L_a / C_a)`` and frequencies in units
of ``1 / sqrt(L_a C_a)``). This keeps pF / nH inputs at order one while the
2x2 matrices are inverted; results are converted back to SI on return.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .constants import HBAR

__all__ = [
    "CircuitDomainError",
    "NoSolutionError",
    "DrivenCircuitParams",
    "EffectiveDriveParams",
    "CoupledCircuitParams",
    "NormalizedCoupled",
    "ModeRates",
    "effective_drive_params",
    "normalize_coupled",
    "balance_residual",
    "solve_balanced_mutual",
    "capacitance_matrix",
    "inductance_matrix",
    "inverse_capacitance_matrix",
    "inverse_inductance_matrix",
]


class CircuitDomainError(ValueError):
    """Circuit parameters outside the physical domain."""


class NoSolutionError(ValueError):
    """A design inversion has no root in its bracket."""


@dataclass(frozen=True)
class DrivenCircuitParams:
    """Resonator ``L || C`` driven by ``V_d(t)`` through ``C_d`` and ``I_d(t)`` through ``M_d``.

    ``V_d`` and ``I_d`` are the scales of the drive voltage and current; the
    time dependence is carried separately by dimensionless waveforms.
    ``M_d`` uses the same sense convention as the coupled circuit's ``L_g``.
    """

    C: float
    L: float
    C_d: float = 0.0
    M_d: float = 0.0
    V_d: float = 0.0
    I_d: float = 0.0

    def validate(self) -> None:
        if not self.C > 0:
            raise CircuitDomainError(f"C must be positive, got {self.C!r}")
        if not self.L > 0:
            raise CircuitDomainError(f"L must be positive, got {self.L!r}")
        if self.C_d < 0:
            raise CircuitDomainError(f"C_d must be non-negative, got {self.C_d!r}")
        if abs(self.M_d) >= self.L:
            raise CircuitDomainError(
                f"|M_d| must be smaller than L (|M_d| = {abs(self.M_d)!r}, L = {self.L!r})"
            )


@dataclass(frozen=True)
class EffectiveDriveParams:
    C_prime: float
    omega0: float
    Z_prime: float
    G_x: float
    G_y: float
    Phi_zpf: float
    Q_zpf: float


def effective_drive_params(p: DrivenCircuitParams, hbar: float = HBAR) -> EffectiveDriveParams:
    """Loaded capacitance, frequency, impedance and drive strengths (J) of a driven resonator."""
    p.validate()
    if not hbar > 0:
        raise CircuitDomainError(f"hbar must be positive, got {hbar!r}")
    C_prime = p.C + p.C_d
    omega0 = 1.0 / math.sqrt(p.L * C_prime)
    Z_prime = math.sqrt(p.L / C_prime)
    Phi_zpf = math.sqrt(hbar * Z_prime / 2.0)
    Q_zpf = math.sqrt(hbar / (2.0 * Z_prime))
    G_x = (p.M_d / p.L) * Phi_zpf * p.I_d
    G_y = (p.C_d / C_prime) * Q_zpf * p.V_d
    return EffectiveDriveParams(C_prime, omega0, Z_prime, G_x, G_y, Phi_zpf, Q_zpf)


@dataclass(frozen=True)
class CoupledCircuitParams:
    """Two LC resonators coupled by ``C_g`` and mutual inductance ``L_g`` (signed).

    A positive ``L_g`` means a positive ``dI_a/dt`` induces a positive
    contribution to ``V_b``.
    """

    C_a: float
    C_b: float
    L_a: float
    L_b: float
    C_g: float = 0.0
    L_g: float = 0.0

    def validate(self) -> None:
        for name in ("C_a", "C_b", "L_a", "L_b"):
            value = getattr(self, name)
            if not value > 0:
                raise CircuitDomainError(f"{name} must be positive, got {value!r}")
        if self.C_g < 0:
            raise CircuitDomainError(f"C_g must be non-negative, got {self.C_g!r}")
        det = self.L_a * self.L_b - self.L_g**2
        if not det > 0:
            raise CircuitDomainError(
                f"inductance matrix is not positive definite: det T_L = {det!r}"
            )

    def with_mutual(self, L_g: float) -> "CoupledCircuitParams":
        return CoupledCircuitParams(self.C_a, self.C_b, self.L_a, self.L_b, self.C_g, L_g)


@dataclass(frozen=True)
class ModeRates:
    """Partial frequencies and the two coupling aspects, all in rad/s."""

    omega_a: float
    omega_b: float
    g_minus: float
    g_plus: float

    @property
    def S(self) -> float:
        return self.omega_a + self.omega_b

    @property
    def Delta(self) -> float:
        return self.omega_a - self.omega_b

    @classmethod
    def from_gc_gl(cls, omega_a: float, omega_b: float, g_c: float, g_l: float) -> "ModeRates":
        return cls(omega_a, omega_b, g_c - g_l, g_c + g_l)


@dataclass(frozen=True)
class NormalizedCoupled:
    """Effective elements of the coupled circuit.

    The mutual terms are stored as inverses (``inv_L_g_prime = 1/L_g'``,
    ``inv_C_g_prime = 1/C_g'``) so the uncoupled circuit is regular.
    """

    L_a_prime: float
    L_b_prime: float
    inv_L_g_prime: float
    C_a_prime: float
    C_b_prime: float
    inv_C_g_prime: float
    Z_a_prime: float
    Z_b_prime: float
    omega_a_prime: float
    omega_b_prime: float
    g_c: float
    g_l: float

    @property
    def g_plus(self) -> float:
        return self.g_c + self.g_l

    @property
    def g_minus(self) -> float:
        return self.g_c - self.g_l

    @property
    def L_g_prime(self) -> float:
        return math.inf if self.inv_L_g_prime == 0 else 1.0 / self.inv_L_g_prime

    @property
    def C_g_prime(self) -> float:
        return math.inf if self.inv_C_g_prime == 0 else 1.0 / self.inv_C_g_prime

    @property
    def rates(self) -> ModeRates:
        return ModeRates(self.omega_a_prime, self.omega_b_prime, self.g_minus, self.g_plus)


def capacitance_matrix(p: CoupledCircuitParams) -> np.ndarray:
    return np.array([[p.C_a + p.C_g, -p.C_g], [-p.C_g, p.C_b + p.C_g]])


def inductance_matrix(p: CoupledCircuitParams) -> np.ndarray:
    return np.array([[p.L_a, p.L_g], [p.L_g, p.L_b]])


def inverse_capacitance_matrix(n: NormalizedCoupled) -> np.ndarray:
    return np.array(
        [[1.0 / n.C_a_prime, n.inv_C_g_prime], [n.inv_C_g_prime, 1.0 / n.C_b_prime]]
    )


def inverse_inductance_matrix(n: NormalizedCoupled) -> np.ndarray:
    return np.array(
        [[1.0 / n.L_a_prime, -n.inv_L_g_prime], [-n.inv_L_g_prime, 1.0 / n.L_b_prime]]
    )


def normalize_coupled(p: CoupledCircuitParams) -> NormalizedCoupled:
    """Invert ``T_L`` and ``T_C`` and form impedances, partial frequencies and couplings.

    Partial frequencies are ``1/sqrt(L_i' C_i')``.
    """
    p.validate()
    c0, l0 = p.C_a, p.L_a
    z0 = math.sqrt(l0 / c0)
    w0 = 1.0 / math.sqrt(l0 * c0)
    Ca, Cb, Cg = p.C_a / c0, p.C_b / c0, p.C_g / c0
    La, Lb, Lg = p.L_a / l0, p.L_b / l0, p.L_g / l0

    det_l = La * Lb - Lg * Lg
    det_c = Ca * Cb + Cg * (Ca + Cb)
    if not det_l > 0:
        raise CircuitDomainError(f"T_L is singular: det = {det_l * l0 * l0!r}")
    if not det_c > 0:
        raise CircuitDomainError(f"T_C is singular: det = {det_c * c0 * c0!r}")

    La_p = det_l / Lb
    Lb_p = det_l / La
    inv_Lg_p = Lg / det_l
    Ca_p = det_c / (Cb + Cg)
    Cb_p = det_c / (Ca + Cg)
    inv_Cg_p = Cg / det_c

    Za = math.sqrt(La_p / Ca_p)
    Zb = math.sqrt(Lb_p / Cb_p)
    wa = 1.0 / math.sqrt(La_p * Ca_p)
    wb = 1.0 / math.sqrt(Lb_p * Cb_p)
    zab = math.sqrt(Za * Zb)
    g_c = 0.5 * inv_Cg_p / zab
    g_l = 0.5 * zab * inv_Lg_p

    return NormalizedCoupled(
        L_a_prime=La_p * l0,
        L_b_prime=Lb_p * l0,
        inv_L_g_prime=inv_Lg_p / l0,
        C_a_prime=Ca_p * c0,
        C_b_prime=Cb_p * c0,
        inv_C_g_prime=inv_Cg_p / c0,
        Z_a_prime=Za * z0,
        Z_b_prime=Zb * z0,
        omega_a_prime=wa * w0,
        omega_b_prime=wb * w0,
        g_c=g_c * w0,
        g_l=g_l * w0,
    )


def balance_residual(n: NormalizedCoupled) -> float:
    """``g_+ / sqrt(g_c^2 + g_l^2)``; zero exactly for balanced coupling (and for no coupling)."""
    norm = math.hypot(n.g_c, n.g_l)
    if norm == 0.0:
        return 0.0
    return n.g_plus / norm


def solve_balanced_mutual(p: CoupledCircuitParams) -> float:
    """Mutual inductance ``L_g`` that balances the capacitive coupling of ``p``.

    ``p.L_g`` is ignored. The root is bracketed in ``(-sqrt(L_a L_b), 0)``.
    """
    if not p.C_g > 0:
        raise NoSolutionError("balancing needs a capacitive coupling, got C_g = %r" % p.C_g)
    p.with_mutual(0.0).validate()
    l_max = math.sqrt(p.L_a * p.L_b)

    def residual(u: float) -> float:
        return balance_residual(normalize_coupled(p.with_mutual(u * l_max)))

    lo, hi = -1.0 + 1e-12, -1e-300
    f_lo, f_hi = residual(lo), residual(hi)
    if not f_lo * f_hi < 0:
        raise NoSolutionError(
            f"no sign change of the balance residual in L_g in (-{l_max!r}, 0): "
            f"f(lo) = {f_lo!r}, f(hi) = {f_hi!r}"
        )
    u = brentq(residual, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
    return u * l_max

"""Two coupled transmission lines and the directional coupler they form.

Fields vary as ``exp(-i omega t)`` so positive wave vectors move right.
``C_a`` and ``C_b`` are the total per-length capacitances of each line (to
ground plus the mutual ``C_g``), which are the diagonal entries of the
per-length capacitance matrix. Use ``LineParams.from_ground_capacitances``
to start from the to-ground values instead.

Wave amplitudes are

    a_+/- = V_a / sqrt(Z_a) +/- sqrt(Z_a) I_a
    b_+/- = V_b / sqrt(Z_b) -/+ sqrt(Z_b) I_b

so ``a_+`` and ``b_-`` move right while ``b_+`` and ``a_-`` move left.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

__all__ = [
    "LineParams",
    "KappaChi",
    "CouplerResponse",
    "kappa_chi",
    "vi_generator",
    "wave_basis",
    "wave_generator",
    "propagate",
    "coupler_response",
]


@dataclass(frozen=True)
class LineParams:
    """Per-length line constants (H/m, F/m)."""

    L_a: float
    L_b: float
    C_a: float
    C_b: float
    L_g: float = 0.0
    C_g: float = 0.0

    def __post_init__(self):
        for name in ("L_a", "L_b", "C_a", "C_b"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)!r}")
        for name in ("L_g", "C_g"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative, got {getattr(self, name)!r}")

    @classmethod
    def from_ground_capacitances(cls, L_a, L_b, C_a_ground, C_b_ground, L_g=0.0, C_g=0.0) -> "LineParams":
        return cls(L_a, L_b, C_a_ground + C_g, C_b_ground + C_g, L_g, C_g)

    @classmethod
    def from_impedances(cls, Z_a, Z_b, v_a, v_b, L_g=0.0, C_g=0.0) -> "LineParams":
        """Lines given by characteristic impedance (ohm) and phase velocity (m/s)."""
        return cls(Z_a / v_a, Z_b / v_b, 1.0 / (Z_a * v_a), 1.0 / (Z_b * v_b), L_g, C_g)

    @property
    def Z_a(self) -> float:
        return math.sqrt(self.L_a / self.C_a)

    @property
    def Z_b(self) -> float:
        return math.sqrt(self.L_b / self.C_b)

    @property
    def v_a(self) -> float:
        return 1.0 / math.sqrt(self.L_a * self.C_a)

    @property
    def v_b(self) -> float:
        return 1.0 / math.sqrt(self.L_b * self.C_b)

    @property
    def Z_g(self) -> float:
        """Coupling impedance ``sqrt(L_g / C_g)``."""
        if self.C_g == 0.0:
            return math.inf
        return math.sqrt(self.L_g / self.C_g)


@dataclass(frozen=True)
class KappaChi:
    kappa: float
    chi: float
    beta_a: float
    beta_b: float


def _check_omega(omega):
    if not omega > 0:
        raise ValueError(f"omega must be positive, got {omega!r}")


def kappa_chi(p: LineParams, omega: float) -> KappaChi:
    """Counter-propagating (``kappa``) and co-moving (``chi``) coupling per length."""
    _check_omega(omega)
    zg = math.sqrt(p.Z_a * p.Z_b)
    lt = p.L_g / zg
    ct = p.C_g * zg
    return KappaChi(0.5 * omega * (lt - ct), 0.5 * omega * (lt + ct), omega / p.v_a, omega / p.v_b)


def vi_generator(p: LineParams, omega: float) -> np.ndarray:
    """``D`` with ``d/dx (V_a, I_a, V_b, I_b) = D (V_a, I_a, V_b, I_b)``."""
    _check_omega(omega)
    m = np.array(
        [
            [0.0, p.L_a, 0.0, p.L_g],
            [p.C_a, 0.0, -p.C_g, 0.0],
            [0.0, p.L_g, 0.0, p.L_b],
            [-p.C_g, 0.0, p.C_b, 0.0],
        ]
    )
    return 1j * omega * m


def wave_basis(p: LineParams) -> np.ndarray:
    """``B`` with ``(a_+, b_+, a_-, b_-) = B (V_a, I_a, V_b, I_b)``."""
    sa, sb = math.sqrt(p.Z_a), math.sqrt(p.Z_b)
    return np.array(
        [
            [1 / sa, sa, 0.0, 0.0],
            [0.0, 0.0, 1 / sb, -sb],
            [1 / sa, -sa, 0.0, 0.0],
            [0.0, 0.0, 1 / sb, sb],
        ]
    )


def wave_generator(p: LineParams, omega: float) -> np.ndarray:
    """Real ``K`` with ``d/dx (a_+, b_+, a_-, b_-) = i K (a_+, b_+, a_-, b_-)``."""
    kc = kappa_chi(p, omega)
    ba, bb, k, c = kc.beta_a, kc.beta_b, kc.kappa, kc.chi
    return np.array(
        [
            [ba, -c, 0.0, k],
            [c, -bb, -k, 0.0],
            [0.0, -k, -ba, c],
            [k, 0.0, -c, bb],
        ]
    )


def propagate(state0, p: LineParams, omega: float, length: float) -> np.ndarray:
    """Wave amplitudes at ``x = length`` given those at ``x = 0``."""
    if length < 0:
        raise ValueError(f"length must be non-negative, got {length!r}")
    t = expm(1j * wave_generator(p, omega) * length)
    return t @ np.asarray(state0, dtype=complex)


@dataclass(frozen=True)
class CouplerResponse:
    through: complex
    coupled: complex
    isolated: complex
    reflected: complex

    @property
    def isolation_dB(self) -> float:
        mag = abs(self.isolated)
        return -math.inf if mag == 0.0 else 20.0 * math.log10(mag)


def coupler_response(p: LineParams, omega: float, length: float) -> CouplerResponse:
    """Port amplitudes of a coupled section for a unit ``a_+`` wave entering at ``x = 0``.

    All four ports are matched, so no wave enters except the injected one:
    ``a_+(0) = 1``, ``b_-(0) = 0``, ``a_-(L) = 0``, ``b_+(L) = 0``. Outputs are
    ``through = a_+(L)``, ``coupled = b_+(0)``, ``isolated = b_-(L)`` and
    ``reflected = a_-(0)``.
    """
    if length < 0:
        raise ValueError(f"length must be non-negative, got {length!r}")
    t = expm(1j * wave_generator(p, omega) * length)
    # x(0) = e0 + u1 e1 + u2 e2 with conditions on rows 1 (b_+) and 2 (a_-) at x = L.
    lhs = t[np.ix_([1, 2], [1, 2])]
    rhs = -t[[1, 2], 0]
    u1, u2 = np.linalg.solve(lhs, rhs)
    x0 = np.array([1.0, u1, u2, 0.0], dtype=complex)
    xl = t @ x0
    return CouplerResponse(complex(xl[0]), complex(u1), complex(xl[3]), complex(u2))

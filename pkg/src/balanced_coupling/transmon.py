"""Transmon models: the quartic oscillator to first order in its nonlinearity,
and the exact charge-basis Hamiltonian used to check it.

Quartic model
    ``H = omega_p [b^dag b + 1/2 - lam ((b + b^dag)/sqrt 2)^4]`` with
    ``omega_p = sqrt(8 E_C E_J)/hbar`` and ``lam = E_C/(3 hbar omega_p)``.
    The dimensionless operators are ``Phi_q = b + b^dag`` and
    ``Q_q = -i (b - b^dag)``, so ``[Phi_q, Q_q] = 2i``. Dressed operators are
    the bare ones rotated into the eigenbasis, kept to first order in ``lam``.

Charge basis
    ``H = 4 E_C (n - n_g)^2 - (E_J/2) sum_n (|n><n+1| + h.c.)`` on charge
    states ``-n_max..n_max``. The phase operator is its sawtooth
    ``<m|phi|n> = i (-1)^(m-n) / (m-n)``, zero on the diagonal, which keeps
    ``[phi, n] = i``. In this normalization ``Q_q = 2 (n - n_g) (2E_C/E_J)^(1/4)``
    and ``Phi_q = phi (E_J/2E_C)^(1/4)``.

The quartic model has no gate charge; only the charge-basis model does.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

__all__ = [
    "TruncationError",
    "TransmonModel",
    "PlasmaLambda",
    "DressedOperators",
    "CouplingSpec",
    "StripElements",
    "ChargeBasisSpectrum",
    "plasma_lambda",
    "ej_over_ec_from_lambda",
    "lowering",
    "dressed_operators",
    "perturbative_eigenvectors",
    "strip_matrix_elements",
    "zero_crossing_ratio",
    "zero_crossing_closed_form",
    "non_rwa_hamiltonian",
    "coupling_matrix",
    "charge_basis_spectrum",
    "charge_operator",
    "phase_operator",
    "oscillator_wavefunctions",
    "charge_to_phase_wavefunctions",
]

TOP_GUARD = 4
CONVERGENCE_RTOL = 1e-10


class TruncationError(ValueError):
    """A truncated basis is too small for the requested quantity."""


@dataclass(frozen=True)
class PlasmaLambda:
    omega_p: float
    lam: float
    ej_over_ec: float


def plasma_lambda(E_J: float, E_C: float, hbar: float = 1.0) -> PlasmaLambda:
    if not (E_J > 0 and E_C > 0):
        raise ValueError(f"E_J and E_C must be positive, got E_J={E_J!r}, E_C={E_C!r}")
    if not hbar > 0:
        raise ValueError(f"hbar must be positive, got {hbar!r}")
    omega_p = math.sqrt(8.0 * E_C * E_J) / hbar
    return PlasmaLambda(omega_p, E_C / (3.0 * hbar * omega_p), E_J / E_C)


def ej_over_ec_from_lambda(lam: float) -> float:
    """Invert ``lam = E_C / (3 sqrt(8 E_J E_C))``: ``E_J/E_C = 1/(72 lam^2)``."""
    if not lam > 0:
        raise ValueError(f"lam must be positive, got {lam!r}")
    return 1.0 / (72.0 * lam * lam)


@dataclass(frozen=True)
class TransmonModel:
    """Energies in units with ``hbar = 1`` unless ``hbar`` is given."""

    E_J: float
    E_C: float
    n_g: float = 0.0
    dim: int = 30
    n_max: int = 20
    hbar: float = 1.0

    def __post_init__(self):
        plasma_lambda(self.E_J, self.E_C, self.hbar)
        if self.dim < 8:
            raise TruncationError(f"oscillator dimension must be at least 8, got {self.dim}")
        if self.n_max < 10:
            raise TruncationError(f"charge cutoff must be at least 10, got {self.n_max}")

    @classmethod
    def from_lambda(cls, lam: float, E_C: float = 1.0, **kw) -> "TransmonModel":
        return cls(E_J=E_C * ej_over_ec_from_lambda(lam), E_C=E_C, **kw)

    @property
    def omega_p(self) -> float:
        return plasma_lambda(self.E_J, self.E_C, self.hbar).omega_p

    @property
    def lam(self) -> float:
        return plasma_lambda(self.E_J, self.E_C, self.hbar).lam


def _lam_dim(m) -> tuple:
    if isinstance(m, TransmonModel):
        return m.lam, m.dim
    lam, dim = m
    return float(lam), int(dim)


def lowering(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)


@dataclass(frozen=True)
class DressedOperators:
    b_bar: np.ndarray
    phi_bar: np.ndarray
    q_bar: np.ndarray
    lam: float

    @property
    def dim(self) -> int:
        return self.b_bar.shape[0]


def dressed_operators(m: TransmonModel | tuple) -> DressedOperators:
    """First-order dressed lowering, flux and charge operators.

    ``m`` is a ``TransmonModel`` or a ``(lam, dim)`` pair. The orderings
    ``b (b^dag b)`` and ``(b^dag b) b^dag`` are kept as written rather than
    normal-ordered.
    """
    lam, dim = _lam_dim(m)
    if dim < 8:
        raise TruncationError(f"oscillator dimension must be at least 8, got {dim}")
    b = lowering(dim)
    bd = b.conj().T
    num = bd @ b
    b3 = b @ b @ b
    bd3 = bd @ bd @ bd
    b_bar = b + 0.25 * lam * bd3 - 0.5 * lam * b3 + 1.5 * lam * (num @ bd)
    phi_bar = b + bd - 0.25 * lam * (b3 + bd3) + 1.5 * lam * (b @ num + num @ bd)
    iq_bar = b - bd - 0.75 * lam * (b3 - bd3) - 1.5 * lam * (b @ num - num @ bd)
    return DressedOperators(b_bar, phi_bar, -1j * iq_bar, lam)


def perturbative_eigenvectors(lam: float, dim: int, levels: int) -> np.ndarray:
    """Columns are the first-order eigenstates ``|k>`` for ``k < levels`` in the bare Fock basis."""
    if levels + TOP_GUARD > dim:
        raise TruncationError(f"levels {levels} need dim >= {levels + TOP_GUARD}, got {dim}")
    v = np.zeros((dim, levels))
    for k in range(levels):
        v[k, k] = 1.0
        if k >= 4:
            v[k - 4, k] -= 0.25 * lam * math.sqrt(k * (k - 1) * (k - 2) * (k - 3)) / 4.0
        v[k + 4, k] += 0.25 * lam * math.sqrt((k + 1) * (k + 2) * (k + 3) * (k + 4)) / 4.0
        if k >= 2:
            v[k - 2, k] -= 0.25 * lam * (2 * k - 1) * math.sqrt(k * (k - 1))
        v[k + 2, k] += 0.25 * lam * (2 * k + 3) * math.sqrt((k + 1) * (k + 2))
    return v


@dataclass(frozen=True)
class CouplingSpec:
    """Capacitive (``g_c``) and inductive (``g_l``) coupling rates."""

    g_c: float
    g_l: float

    @property
    def balanced(self) -> bool:
        return math.isclose(self.g_c, -self.g_l, rel_tol=1e-12, abs_tol=0.0)

    @classmethod
    def from_ratio(cls, g_c: float, ratio_gl_gc: float) -> "CouplingSpec":
        return cls(g_c, ratio_gl_gc * g_c)

    @classmethod
    def from_total(cls, g: float, ratio_gl_gc: float) -> "CouplingSpec":
        """Split ``g = |g_c| + |g_l|`` at the given ratio, with ``g_c >= 0``."""
        g_c = g / (1.0 + abs(ratio_gl_gc))
        return cls(g_c, ratio_gl_gc * g_c)


@dataclass(frozen=True)
class StripElements:
    elem_k1_n1: complex
    elem_k3_nm1: complex


def _check_level(k: int, dim: int):
    if k < 0:
        raise ValueError(f"level must be non-negative, got {k}")
    if k + TOP_GUARD >= dim:
        raise TruncationError(
            f"level {k} touches the top {TOP_GUARD} levels of a dimension-{dim} basis"
        )


def strip_matrix_elements(m: TransmonModel | tuple, k: int, n: int, c: CouplingSpec) -> StripElements:
    """Amplitudes of ``|k,n> -> |k+1,n+1>`` and ``|k,n> -> |k+3,n-1>``.

    The dressed coupling is ``(-g_l Phi - i g_c Q) a + (-g_l Phi + i g_c Q) a^dag``.
    """
    ops = dressed_operators(m)
    _check_level(k, ops.dim)
    if n < 0:
        raise ValueError(f"photon number must be non-negative, got {n}")
    up = -c.g_l * ops.phi_bar + 1j * c.g_c * ops.q_bar
    down = -c.g_l * ops.phi_bar - 1j * c.g_c * ops.q_bar
    return StripElements(
        complex(math.sqrt(n + 1) * up[k + 1, k]),
        complex(math.sqrt(n) * down[k + 3, k]),
    )


def zero_crossing_ratio(m: TransmonModel | tuple, k: int, transition: str = "k+1") -> float:
    """Ratio ``g_l/g_c`` at which the chosen strip-changing amplitude vanishes.

    The amplitude is linear in ``(g_c, g_l)``; the two coefficients are read
    from ``strip_matrix_elements``. ``transition`` is ``"k+1"`` or ``"k+3"``.
    """
    if transition not in ("k+1", "k+3"):
        raise ValueError(f"transition must be 'k+1' or 'k+3', got {transition!r}")
    field = "elem_k1_n1" if transition == "k+1" else "elem_k3_nm1"
    a_c = getattr(strip_matrix_elements(m, k, 1, CouplingSpec(1.0, 0.0)), field)
    a_l = getattr(strip_matrix_elements(m, k, 1, CouplingSpec(0.0, 1.0)), field)
    scale = max(abs(a_c), abs(a_l))
    if scale == 0.0:
        raise ArithmeticError(f"the {transition} amplitude vanishes identically at level {k}")
    if abs(a_l) <= 1e-15 * scale:
        raise ArithmeticError(f"the {transition} amplitude has no null at finite g_l/g_c")
    r = -a_c / a_l
    return float(r.real)


def zero_crossing_closed_form(lam: float, k: int, transition: str = "k+1") -> float:
    if transition == "k+1":
        s = 1.5 * lam * (k + 1)
        return (-1.0 + s) / (1.0 + s)
    if transition == "k+3":
        return 3.0
    raise ValueError(f"transition must be 'k+1' or 'k+3', got {transition!r}")


# Dressed lowering operator as monomials: name -> (coefficient / lam, excitation change).
_B_BAR_TERMS = {"b": (None, -1), "bd^3": (0.25, 3), "b^3": (-0.5, -3), "(bd b) bd": (1.5, 1)}
_ADJOINT = {"b": "bd", "bd^3": "b^3", "b^3": "bd^3", "(bd b) bd": "b (bd b)"}


def non_rwa_hamiltonian(m: TransmonModel | tuple | float, g: float) -> dict:
    """Balanced coupling ``g_c = -g_l = g/2`` split by how many excitations each term adds.

    With balanced coupling the dressed coupling is ``g (b_bar^dag a + b_bar a^dag)``.
    Each entry maps ``(transmon monomial, resonator operator)`` to its
    coefficient. ``"rwa"`` holds excitation-conserving terms, ``"strip2"`` and
    ``"strip4"`` the terms changing the excitation number by 2 and 4.
    """
    lam = m if isinstance(m, (int, float)) else _lam_dim(m)[0]
    out = {"rwa": {}, "strip2": {}, "strip4": {}}
    for name, (coef, dexc) in _B_BAR_TERMS.items():
        c = g if coef is None else g * lam * coef
        if c == 0.0:
            continue
        # b_bar a^dag and its adjoint b_bar^dag a.
        for op, ex, res in ((name, dexc, "a^dag"), (_ADJOINT[name], -dexc, "a")):
            total = ex + (1 if res == "a^dag" else -1)
            key = {0: "rwa", 2: "strip2", 4: "strip4"}[abs(total)]
            out[key][(op, res)] = c
    return out


def coupling_matrix(m: TransmonModel | tuple, c: CouplingSpec, n_photons: int) -> np.ndarray:
    """Dressed coupling on the (transmon dim) x (resonator ``n_photons``) product space."""
    ops = dressed_operators(m)
    a = lowering(n_photons)
    down = -c.g_l * ops.phi_bar - 1j * c.g_c * ops.q_bar
    up = -c.g_l * ops.phi_bar + 1j * c.g_c * ops.q_bar
    return np.kron(down, a) + np.kron(up, a.conj().T)


# Charge basis ---------------------------------------------------------------


def charge_operator(n_max: int, n_g: float = 0.0) -> np.ndarray:
    return np.diag(np.arange(-n_max, n_max + 1, dtype=float) - n_g)


def phase_operator(n_max: int) -> np.ndarray:
    """Sawtooth phase in the charge basis, ``<m|phi|n> = i (-1)^(m-n)/(m-n)``."""
    idx = np.arange(-n_max, n_max + 1)
    d = idx[:, None] - idx[None, :]
    safe = np.where(d == 0, 1, d)
    return np.where(d == 0, 0.0, 1j * (-1.0) ** np.abs(d) / safe)


@dataclass(frozen=True)
class ChargeBasisSpectrum:
    """Lowest eigenpairs and operators in the eigenbasis.

    Eigenvector phases are fixed so that ``n_matrix[k+1, k]`` is ``i`` times a
    positive number, as for ``Q_q`` of a harmonic oscillator.
    """

    energies: np.ndarray
    vectors: np.ndarray
    n_matrix: np.ndarray
    phi_matrix: np.ndarray
    n_max: int

    def q_matrix(self, E_J: float, E_C: float) -> np.ndarray:
        """``Q_q`` in the eigenbasis."""
        return 2.0 * (2.0 * E_C / E_J) ** 0.25 * self.n_matrix

    def flux_matrix(self, E_J: float, E_C: float) -> np.ndarray:
        """``Phi_q`` in the eigenbasis."""
        return (E_J / (2.0 * E_C)) ** 0.25 * self.phi_matrix


def _diagonalize(E_J, E_C, n_g, n_max, levels):
    n = np.arange(-n_max, n_max + 1, dtype=float)
    return eigh_tridiagonal(
        4.0 * E_C * (n - n_g) ** 2,
        -0.5 * E_J * np.ones(2 * n_max),
        select="i",
        select_range=(0, levels - 1),
    )


def charge_basis_spectrum(m: TransmonModel, levels: int = 10, check: bool = True) -> ChargeBasisSpectrum:
    """Exact transmon eigenpairs for the ``levels`` lowest states.

    With ``check``, the top retained energy must move by less than ``1e-10``
    (relative) when ``n_max`` grows by 5.
    """
    if levels > 2 * m.n_max + 1:
        raise TruncationError(f"{levels} levels need n_max >= {(levels - 1) // 2}")
    w, v = _diagonalize(m.E_J, m.E_C, m.n_g, m.n_max, levels)
    if check:
        w2, _ = _diagonalize(m.E_J, m.E_C, m.n_g, m.n_max + 5, levels)
        top = abs(w2[-1] - w[-1]) / max(abs(w2[-1]), np.finfo(float).tiny)
        if top > CONVERGENCE_RTOL:
            raise TruncationError(
                f"top level moved by {top:.2e} (relative) when n_max grew from {m.n_max} to {m.n_max + 5}"
            )
    nop = np.arange(-m.n_max, m.n_max + 1, dtype=float) - m.n_g
    nm = v.T @ (nop[:, None] * v)
    # Make n[k+1, k] positive, then rotate state k by (-i)^k.
    for k in range(1, levels):
        if nm[k, k - 1] < 0:
            v[:, k] = -v[:, k]
            nm[k, :] = -nm[k, :]
            nm[:, k] = -nm[:, k]
    vc = v * ((-1j) ** np.arange(levels))[None, :]
    nmat = vc.conj().T @ (nop[:, None] * vc)
    pmat = vc.conj().T @ phase_operator(m.n_max) @ vc
    nmat = 0.5 * (nmat + nmat.conj().T)
    pmat = 0.5 * (pmat + pmat.conj().T)
    return ChargeBasisSpectrum(w, vc, nmat, pmat, m.n_max)


def oscillator_wavefunctions(phi: np.ndarray, width: float, levels: int) -> np.ndarray:
    """Harmonic eigenfunctions ``psi_k(phi)`` of length scale ``width``, shape ``(len(phi), levels)``.

    Computed with the stable three-term recurrence for normalized Hermite functions.
    """
    x = np.asarray(phi, dtype=float) / width
    out = np.empty((x.size, levels))
    out[:, 0] = np.pi ** -0.25 * np.exp(-0.5 * x * x)
    if levels > 1:
        out[:, 1] = math.sqrt(2.0) * x * out[:, 0]
    for k in range(2, levels):
        out[:, k] = math.sqrt(2.0 / k) * x * out[:, k - 1] - math.sqrt((k - 1) / k) * out[:, k - 2]
    return out / math.sqrt(width)


def charge_to_phase_wavefunctions(vectors: np.ndarray, n_max: int, phi: np.ndarray) -> np.ndarray:
    """``psi(phi) = sum_n c_n exp(i n phi) / sqrt(2 pi)`` for each column of ``vectors``."""
    n = np.arange(-n_max, n_max + 1)
    basis = np.exp(1j * np.outer(phi, n)) / math.sqrt(2.0 * math.pi)
    return basis @ vectors

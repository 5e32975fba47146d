"""Driven two-level system as a moment on the Bloch sphere.

The resonator Hamiltonian is projected onto two levels by ``a_bar -> sigma_-``
(``hbar = 1``), with ``sigma_- = [[0, 1], [0, 0]]``. The first basis state is
the ground state, so ``rho = (<sx>, <sy>, <sz>) = +z`` at the ground state.
Writing ``H = h . sigma`` gives the Bloch equation ``d rho/dt = rho x Omega``
with ``Omega = -2 h``. In a frame rotating at ``omega_r``,

    Omega(t) = (2 Re w, -2 Im w, omega0 - omega_r),   w = z(t) exp(-i omega_r t).

The projection keeps no drive term along ``sigma_z``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .driven_mode import DriveWaveform, FrameSpec, drive_z
from .integrators import integrate

__all__ = [
    "BlochState",
    "BlochTrajectory",
    "SIGMA_X",
    "SIGMA_Y",
    "SIGMA_Z",
    "SIGMA_MINUS",
    "precess",
    "tls_field",
    "tls_drive",
    "rwa_rabi_solution",
    "rotate",
    "nutation_amplitude",
    "SpanTooShortError",
]

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
SIGMA_MINUS = np.array([[0, 1], [0, 0]], dtype=complex)

TLS_RTOL = 1e-11
TLS_ATOL = 1e-13


class SpanTooShortError(ValueError):
    """The trajectory covers fewer Rabi periods than the metric needs."""


@dataclass(frozen=True)
class BlochState:
    rho: tuple

    def __post_init__(self):
        v = np.asarray(self.rho, dtype=float)
        if v.shape != (3,) or not np.all(np.isfinite(v)):
            raise ValueError(f"Bloch vector must be 3 finite numbers, got {self.rho!r}")

    @property
    def vector(self) -> np.ndarray:
        return np.asarray(self.rho, dtype=float)

    @classmethod
    def ground(cls) -> "BlochState":
        return cls((0.0, 0.0, 1.0))


@dataclass(frozen=True)
class BlochTrajectory:
    t: np.ndarray
    rho: np.ndarray  # shape (len(t), 3)
    omega0: float
    waveform: DriveWaveform
    frame: FrameSpec

    def columns(self) -> dict:
        return {"t": self.t, "rho_x": self.rho[:, 0], "rho_y": self.rho[:, 1], "rho_z": self.rho[:, 2]}


def _vec(state) -> np.ndarray:
    return state.vector if isinstance(state, BlochState) else np.asarray(state, dtype=float)


def precess(state0, field: Callable, t_eval, rtol: float = TLS_RTOL, atol: float = TLS_ATOL, max_step=np.inf) -> np.ndarray:
    """Solve ``d rho/dt = rho x Omega(t)`` for a field ``Omega(t)`` (3-vector, rad/time)."""
    t_eval = np.asarray(t_eval, dtype=float)
    return integrate(
        lambda t, r: np.cross(r, field(t)), _vec(state0), t_eval, rtol=rtol, atol=atol, max_step=max_step
    )


def tls_field(omega0: float, w: DriveWaveform, frame: FrameSpec = FrameSpec()) -> Callable:
    """Effective field ``Omega(t)`` of the projected two-level Hamiltonian."""
    wr = frame.omega_r

    def field(t):
        z = complex(drive_z(t, w)) * np.exp(-1j * wr * t)
        return np.array([2.0 * z.real, -2.0 * z.imag, omega0 - wr])

    return field


def _expect(psi: np.ndarray) -> np.ndarray:
    c = np.conj(psi)
    sx = 2.0 * np.real(c[..., 0] * psi[..., 1])
    sy = 2.0 * np.imag(c[..., 0] * psi[..., 1])
    sz = np.abs(psi[..., 0]) ** 2 - np.abs(psi[..., 1]) ** 2
    return np.stack([sx, sy, sz], axis=-1)


def _spinor(rho: np.ndarray) -> np.ndarray:
    """A pure state with Bloch vector ``rho`` (|rho| = 1)."""
    x, y, z = rho / np.linalg.norm(rho)
    theta = math.acos(max(-1.0, min(1.0, z)))
    phi = math.atan2(y, x)
    return np.array([math.cos(theta / 2), np.exp(1j * phi) * math.sin(theta / 2)], dtype=complex)


def tls_drive(
    state0,
    omega0: float,
    w: DriveWaveform,
    frame: FrameSpec = FrameSpec(),
    t_eval=None,
    method: str = "schrodinger",
) -> BlochTrajectory:
    """Driven two-level dynamics; returns ``<sigma>`` along ``t_eval``.

    ``method="schrodinger"`` evolves the two-component state vector;
    ``method="bloch"`` integrates the Bloch equation for the same Hamiltonian.
    Both need a unit initial vector.
    """
    t_eval = np.asarray(t_eval, dtype=float)
    rho0 = _vec(state0)
    wr = frame.omega_r
    max_step = 0.1 * math.pi / max(abs(omega0), abs(w.omega_d), abs(wr), 1e-300)
    if method == "bloch":
        rho = precess(rho0, tls_field(omega0, w, frame), t_eval, max_step=max_step)
    elif method == "schrodinger":
        det = omega0 - wr

        def rhs(t, psi):
            z = complex(drive_z(t, w)) * np.exp(-1j * wr * t)
            # H = det |e><e| - z sigma_- - conj(z) sigma_+
            h0 = -z * psi[1]
            h1 = det * psi[1] - np.conj(z) * psi[0]
            return -1j * np.array([h0, h1])

        psi = integrate(rhs, _spinor(rho0), t_eval, rtol=TLS_RTOL, atol=TLS_ATOL, max_step=max_step)
        rho = _expect(psi)
    else:
        raise ValueError(f"unknown method {method!r}")
    return BlochTrajectory(t_eval, rho, omega0, w, frame)


def rotate(v: np.ndarray, axis: np.ndarray, angle) -> np.ndarray:
    """Rodrigues rotation of ``v`` about unit ``axis`` by ``angle`` (array-broadcast over angle)."""
    k = axis / np.linalg.norm(axis)
    angle = np.asarray(angle, dtype=float)[..., None]
    kv = np.cross(k, v)
    return v * np.cos(angle) + kv * np.sin(angle) + k * np.dot(k, v) * (1.0 - np.cos(angle))


def rwa_rabi_solution(state0, G_d: float, phi_d: float, detuning: float, t) -> np.ndarray:
    """Bloch trajectory for a constant field in the frame rotating at the drive frequency.

    The field is ``(2 G_d cos phi_d, -2 G_d sin phi_d, detuning)``; the moment
    turns clockwise about it at the field's magnitude.
    """
    field = np.array([2 * G_d * math.cos(phi_d), -2 * G_d * math.sin(phi_d), detuning])
    mag = np.linalg.norm(field)
    v = _vec(state0)
    t = np.asarray(t, dtype=float)
    if mag == 0.0:
        return np.broadcast_to(v, t.shape + (3,)).copy()
    return rotate(v, field, -mag * t)


def nutation_amplitude(traj: BlochTrajectory, min_rabi_periods: float = 2.0) -> float:
    """RMS distance between ``traj`` and its co-rotating-only counterpart.

    The counterpart is recomputed with the balanced drive
    ``G_d = (G_x + G_y) / 2`` in the same frame and on the same time grid.
    """
    w = traj.waveform
    if w.G_d == 0.0:
        return 0.0
    span = traj.t[-1] - traj.t[0]
    rabi_period = 2.0 * math.pi / (2.0 * w.G_d)
    if span < min_rabi_periods * rabi_period:
        raise SpanTooShortError(
            f"trajectory spans {span / rabi_period:.3g} Rabi periods, need {min_rabi_periods}"
        )
    ref = tls_drive(traj.rho[0], traj.omega0, w.rwa_counterpart(), traj.frame, traj.t)
    d = traj.rho - ref.rho
    return float(np.sqrt(np.mean(np.sum(d * d, axis=1))))

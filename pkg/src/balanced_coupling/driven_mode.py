"""A single driven resonator in the lab frame and in a rotating frame.

Units follow ``hbar = 1``: drive strengths are angular frequencies and the
mode amplitude ``a = X + iY`` is dimensionless. The rotating-frame amplitude
is ``a_bar = a exp(i omega_r t)`` and obeys

    d a_bar / dt = -i (omega0 - omega_r) a_bar + i conj(z(t)) exp(i omega_r t)

with the complex drive ``z(t) = envelope(t) (G_x x(t) + i G_y y(t))``,
``x = cos(omega_d t + phi_d)``, ``y = sin(omega_d t + phi_d)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .integrators import DEFAULT_ATOL, DEFAULT_RTOL, integrate, rk4_fixed

__all__ = [
    "StepEnvelope",
    "CosineRampEnvelope",
    "DriveWaveform",
    "ModeState",
    "FrameSpec",
    "ModeTrajectory",
    "RippleMetrics",
    "TrajectoryTooShortError",
    "drive_z",
    "time_grid",
    "evolve",
    "evolve_xy",
    "analytic_unbalanced",
    "analytic_balanced",
    "ripple_metrics",
]

BALANCE_RTOL = 1e-12


class TrajectoryTooShortError(ValueError):
    """The trajectory does not cover enough fast periods for the requested metric."""


@dataclass(frozen=True)
class StepEnvelope:
    """Switch-on at ``t_on``: 0 before, 1 after."""

    t_on: float = 0.0

    def __call__(self, t):
        return np.where(np.asarray(t) >= self.t_on, 1.0, 0.0)


@dataclass(frozen=True)
class CosineRampEnvelope:
    """Raised-cosine rise over ``ramp`` starting at ``t_on``, then flat at 1."""

    ramp: float
    t_on: float = 0.0

    def __post_init__(self):
        if not self.ramp > 0:
            raise ValueError(f"ramp must be positive, got {self.ramp!r}")

    def __call__(self, t):
        u = np.clip((np.asarray(t, dtype=float) - self.t_on) / self.ramp, 0.0, 1.0)
        return 0.5 * (1.0 - np.cos(np.pi * u))


@dataclass(frozen=True)
class DriveWaveform:
    """Magnetic (``G_x``) and electric (``G_y``) drive components at one frequency."""

    G_x: float
    G_y: float
    omega_d: float
    phi_d: float = 0.0
    envelope: Callable = field(default_factory=StepEnvelope)

    def __post_init__(self):
        if self.G_x < 0 or self.G_y < 0:
            raise ValueError(f"drive strengths must be non-negative, got G_x={self.G_x!r}, G_y={self.G_y!r}")

    @classmethod
    def balanced_drive(cls, G_d: float, omega_d: float, phi_d: float = 0.0, envelope=None) -> "DriveWaveform":
        return cls(G_d, G_d, omega_d, phi_d, envelope if envelope is not None else StepEnvelope())

    @classmethod
    def linear(cls, G: float, omega_d: float, phi_d: float = 0.0, envelope=None) -> "DriveWaveform":
        """Purely magnetic (cosine) drive of strength ``G``."""
        return cls(G, 0.0, omega_d, phi_d, envelope if envelope is not None else StepEnvelope())

    @property
    def balanced(self) -> bool:
        return math.isclose(self.G_x, self.G_y, rel_tol=BALANCE_RTOL, abs_tol=0.0)

    @property
    def G_d(self) -> float:
        """Strength of the co-rotating part of the drive."""
        return 0.5 * (self.G_x + self.G_y)

    def rwa_counterpart(self) -> "DriveWaveform":
        """Balanced drive carrying only the co-rotating part of this one."""
        return DriveWaveform(self.G_d, self.G_d, self.omega_d, self.phi_d, self.envelope)

    def scaled(self, factor: float) -> "DriveWaveform":
        return DriveWaveform(factor * self.G_x, factor * self.G_y, self.omega_d, self.phi_d, self.envelope)


def drive_z(t, w: DriveWaveform):
    """Complex drive ``z(t) = envelope(t) (G_x x(t) + i G_y y(t))``."""
    t = np.asarray(t, dtype=float)
    ph = w.omega_d * t + w.phi_d
    return w.envelope(t) * (w.G_x * np.cos(ph) + 1j * w.G_y * np.sin(ph))


@dataclass(frozen=True)
class ModeState:
    a: complex

    def __post_init__(self):
        if not np.isfinite(complex(self.a)):
            raise ValueError(f"mode amplitude must be finite, got {self.a!r}")


@dataclass(frozen=True)
class FrameSpec:
    """Rotating-frame angular frequency; 0 is the lab frame."""

    omega_r: float = 0.0


@dataclass(frozen=True)
class ModeTrajectory:
    t: np.ndarray
    a: np.ndarray
    omega0: float
    waveform: DriveWaveform
    frame: FrameSpec

    def columns(self) -> dict:
        return {"t": self.t, "re_a": self.a.real, "im_a": self.a.imag, "abs_a": np.abs(self.a)}


def time_grid(t_span, dt: float) -> np.ndarray:
    """Uniform grid from ``t_span[0]`` to ``t_span[1]`` with spacing as close to ``dt`` as fits."""
    t0, t1 = float(t_span[0]), float(t_span[1])
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt!r}")
    if not t1 > t0:
        raise ValueError(f"t_span must be increasing, got {t_span!r}")
    n = max(1, int(math.ceil((t1 - t0) / dt - 1e-9)))
    return np.linspace(t0, t1, n + 1)


def _rhs(omega0: float, w: DriveWaveform, omega_r: float):
    det = omega0 - omega_r

    def f(t, a):
        return -1j * det * a + 1j * np.conj(drive_z(t, w)) * np.exp(1j * omega_r * t)

    return f


def evolve(
    state0: ModeState | complex,
    omega0: float,
    w: DriveWaveform,
    frame: FrameSpec = FrameSpec(),
    t_span=(0.0, 1.0),
    dt: float = 1e-3,
    method: str = "adaptive",
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
) -> ModeTrajectory:
    """Integrate the mode amplitude in the frame ``frame``, sampled every ``dt``.

    ``method="adaptive"`` uses the 8th-order Dormand-Prince stepper at
    ``rtol``; ``method="rk4"`` takes 8 fixed RK4 substeps per sample.
    """
    a0 = complex(state0.a if isinstance(state0, ModeState) else state0)
    t = time_grid(t_span, dt)
    rhs = _rhs(omega0, w, frame.omega_r)
    # The step limit keeps the stepper from striding over a switch-on edge.
    max_step = 0.1 * math.pi / max(abs(omega0), abs(w.omega_d), abs(frame.omega_r), 1e-300)
    if method == "adaptive":
        a = integrate(rhs, np.array(a0), t, rtol=rtol, atol=atol, max_step=max_step)
    elif method == "rk4":
        a = rk4_fixed(rhs, np.array(a0, dtype=complex), t, substeps=8)
    else:
        raise ValueError(f"unknown method {method!r}")
    return ModeTrajectory(t, np.asarray(a, dtype=complex), omega0, w, frame)


def evolve_xy(x0: float, y0: float, omega0: float, w: DriveWaveform, t_span, dt: float, substeps: int = 8):
    """Lab-frame motion written for the real quadratures ``a = X + iY`` (fixed-step RK4).

    Returns ``(t, X, Y)``. This is a second code path for the same dynamics,
    using only real arithmetic.
    """
    t = time_grid(t_span, dt)

    def f(tt, s):
        ph = w.omega_d * tt + w.phi_d
        env = w.envelope(tt)
        return np.array(
            [omega0 * s[1] + env * w.G_y * math.sin(ph), -omega0 * s[0] + env * w.G_x * math.cos(ph)]
        )

    out = rk4_fixed(f, np.array([x0, y0], dtype=float), t, substeps=substeps)
    return t, out[:, 0], out[:, 1]


def analytic_unbalanced(t, G: float, omega0: float):
    """Rotating-frame amplitude for a resonant cosine drive of strength ``G`` switched on at 0."""
    t = np.asarray(t, dtype=float)
    return 0.5j * G * (t + np.expm1(2j * omega0 * t) / (2j * omega0))


def analytic_balanced(t, G_d: float, detuning: float = 0.0, phi_d: float = 0.0):
    """Amplitude under a balanced drive, in the frame rotating at the drive frequency.

    ``detuning = omega0 - omega_d``. The result is
    ``G_d exp(-i phi_d) (1 - exp(-i detuning t)) / detuning``, which tends to
    ``i G_d t exp(-i phi_d)`` on resonance.
    """
    t = np.asarray(t, dtype=float)
    phase = np.exp(-1j * phi_d)
    if detuning == 0.0:
        return 1j * G_d * t * phase
    return -G_d * phase * np.expm1(-1j * detuning * t) / detuning


@dataclass(frozen=True)
class RippleMetrics:
    amplitude: float
    frequency: float
    n_crossings: int


def ripple_metrics(traj: ModeTrajectory, min_fast_periods: float = 4.0) -> RippleMetrics:
    """Fast ripple on ``Re a_bar`` after a least-squares linear detrend.

    ``amplitude`` is the peak-to-peak excursion of the detrended real part.
    For the resonant cosine drive this equals the largest distance of the
    trajectory from its secular path, ``G / (2 omega0)``. ``frequency`` is in
    cycles per unit time, from interpolated zero crossings of the detrended,
    mean-removed signal; it is NaN when fewer than three crossings occur.
    """
    t = np.asarray(traj.t, dtype=float)
    span = t[-1] - t[0]
    fast_period = math.pi / abs(traj.omega0)
    if span < min_fast_periods * fast_period:
        raise TrajectoryTooShortError(
            f"trajectory spans {span / fast_period:.3g} fast periods, need {min_fast_periods}"
        )
    re = np.asarray(traj.a).real
    slope, intercept = np.polyfit(t - t[0], re, 1)
    r = re - (slope * (t - t[0]) + intercept)
    amp = float(r.max() - r.min())
    s = r - r.mean()
    idx = np.nonzero(np.signbit(s[:-1]) != np.signbit(s[1:]))[0]
    if len(idx) < 3 or amp == 0.0:
        return RippleMetrics(amp, float("nan"), int(len(idx)))
    tc = t[idx] - s[idx] * (t[idx + 1] - t[idx]) / (s[idx + 1] - s[idx])
    freq = (len(tc) - 1) / (2.0 * (tc[-1] - tc[0]))
    return RippleMetrics(amp, float(freq), int(len(idx)))

"""Time steppers shared by the classical dynamics modules.

``integrate`` is the adaptive default (scipy's 8th-order Dormand-Prince);
``rk4_fixed`` is a fixed-step classical Runge-Kutta kept for runs that must
be bit-reproducible across platforms and scipy versions.
"""

from __future__ import annotations

from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

RHS = Callable[[float, np.ndarray], np.ndarray]

DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-13


class IntegrationError(RuntimeError):
    """The stepper failed to meet its tolerance."""


def integrate(
    rhs: RHS,
    y0: np.ndarray,
    t_eval: np.ndarray,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    max_step: float = np.inf,
) -> np.ndarray:
    """Adaptive integration; returns the states at ``t_eval``, shape ``(len(t_eval),) + y0.shape``."""
    y0 = np.asarray(y0)
    t_eval = np.asarray(t_eval, dtype=float)
    shape = y0.shape
    sol = solve_ivp(
        lambda t, y: np.ravel(rhs(t, y.reshape(shape))),
        (t_eval[0], t_eval[-1]),
        y0.ravel(),
        method="DOP853",
        t_eval=t_eval,
        rtol=rtol,
        atol=atol,
        max_step=max_step,
    )
    if not sol.success:
        raise IntegrationError(sol.message)
    return sol.y.T.reshape((len(t_eval),) + shape)


def rk4_fixed(rhs: RHS, y0: np.ndarray, t_eval: np.ndarray, substeps: int = 1) -> np.ndarray:
    """Classical RK4 with ``substeps`` equal steps between consecutive output times."""
    if substeps < 1:
        raise ValueError("substeps must be >= 1")
    t_eval = np.asarray(t_eval, dtype=float)
    y = np.array(y0, dtype=np.result_type(np.asarray(y0), float))
    out = np.empty((len(t_eval),) + y.shape, dtype=y.dtype)
    out[0] = y
    for i in range(1, len(t_eval)):
        t = t_eval[i - 1]
        h = (t_eval[i] - t) / substeps
        for _ in range(substeps):
            k1 = rhs(t, y)
            k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1)
            k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2)
            k4 = rhs(t + h, y + h * k3)
            y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            t += h
        out[i] = y
    return out

"""Unitary splitting integrator for ``H(t) = diag(E) + c_R(t) R + c_P(t) P``.

``R`` and ``P`` are fixed Hermitian matrices, diagonalized once; each
exponential is then a basis change and a diagonal phase. A symmetric
second-order (Strang) step is composed into a 6th-order method with the
9-stage Kahan-Li coefficients. Time-dependent coefficients are sampled at
each stage midpoint, which keeps every stage time-symmetric.

Several state vectors are evolved at once as columns of ``psi``; column
``m`` sees the drive coefficients multiplied by ``scale[m]``.
"""

from __future__ import annotations

import numba
import numpy as np

__all__ = ["KAHAN_LI_6", "stage_times", "evolve_split"]

# Kahan & Li (1997), symmetric 9-stage composition of order 6.
KAHAN_LI_6 = np.array(
    [
        0.39216144400731413928,
        0.33259913678935943860,
        -0.70624617255763935981,
        0.082213596293550800230,
        0.79854399093482996340,
        0.082213596293550800230,
        -0.70624617255763935981,
        0.33259913678935943860,
        0.39216144400731413928,
    ]
)


def stage_times(t_end: float, dt: float, weights: np.ndarray = KAHAN_LI_6):
    """Stage lengths ``h`` and the midpoint time of every stage over ``[0, t_end]``."""
    nsteps = max(1, int(round(t_end / dt)))
    dt = t_end / nsteps
    hs = weights * dt
    mids = np.cumsum(hs) - 0.5 * hs
    ts = (np.arange(nsteps)[:, None] * dt + mids[None, :]).ravel()
    return hs, ts


@numba.njit(cache=True, fastmath=True)
def _kernel_one(eph, W, Wh, rv, cR, hs, scale, psi):
    N, M = psi.shape
    nst = hs.shape[0]
    for s in range(cR.shape[0]):
        j = s % nst
        for i in range(N):
            for m in range(M):
                psi[i, m] *= eph[j, i]
        tmp = Wh @ psi
        for i in range(N):
            x = -hs[j] * cR[s] * rv[i]
            e = np.exp(1j * x * scale[0])
            for m in range(M):
                if m > 0 and scale[m] != scale[m - 1]:
                    e = np.exp(1j * x * scale[m])
                tmp[i, m] *= e
        psi = W @ tmp
        for i in range(N):
            for m in range(M):
                psi[i, m] *= eph[j, i]
    return psi


@numba.njit(cache=True, fastmath=True)
def _kernel_two(eph, WP, WPh, WPR, WRP, rv, pv, cR, cP, hs, scale, psi):
    N, M = psi.shape
    nst = hs.shape[0]
    for s in range(cR.shape[0]):
        j = s % nst
        h = hs[j]
        for i in range(N):
            for m in range(M):
                psi[i, m] *= eph[j, i]
        tmp = WPh @ psi
        for i in range(N):
            x = -0.5 * h * cP[s] * pv[i]
            e = np.exp(1j * x * scale[0])
            for m in range(M):
                if m > 0 and scale[m] != scale[m - 1]:
                    e = np.exp(1j * x * scale[m])
                tmp[i, m] *= e
        tmp = WRP @ tmp
        for i in range(N):
            x = -h * cR[s] * rv[i]
            e = np.exp(1j * x * scale[0])
            for m in range(M):
                if m > 0 and scale[m] != scale[m - 1]:
                    e = np.exp(1j * x * scale[m])
                tmp[i, m] *= e
        tmp = WPR @ tmp
        for i in range(N):
            x = -0.5 * h * cP[s] * pv[i]
            e = np.exp(1j * x * scale[0])
            for m in range(M):
                if m > 0 and scale[m] != scale[m - 1]:
                    e = np.exp(1j * x * scale[m])
                tmp[i, m] *= e
        psi = WP @ tmp
        for i in range(N):
            for m in range(M):
                psi[i, m] *= eph[j, i]
    return psi


def evolve_split(E, R, P, c_R, c_P, hs, scale, psi0) -> np.ndarray:
    """Evolve the columns of ``psi0`` through all stages.

    ``c_R`` and ``c_P`` hold the coefficient at each stage midpoint (one per
    stage, in order); ``hs`` holds the stage lengths of one step. ``P`` may
    be ``None`` when that term is absent.
    """
    E = np.ascontiguousarray(E, dtype=float)
    psi = np.ascontiguousarray(psi0, dtype=np.complex128)
    scale = np.ascontiguousarray(scale, dtype=float)
    hs = np.ascontiguousarray(hs, dtype=float)
    eph = np.exp(-0.5j * hs[:, None] * E[None, :])
    rv, WR = np.linalg.eigh(np.asarray(R, dtype=complex))
    WR = np.ascontiguousarray(WR)
    c_R = np.ascontiguousarray(c_R, dtype=float)
    if P is None:
        return _kernel_one(eph, WR, np.ascontiguousarray(WR.conj().T), rv, c_R, hs, scale, psi)
    pv, WP = np.linalg.eigh(np.asarray(P, dtype=complex))
    WP = np.ascontiguousarray(WP)
    WPh = np.ascontiguousarray(WP.conj().T)
    WRP = np.ascontiguousarray(WR.conj().T @ WP)
    WPR = np.ascontiguousarray(WRP.conj().T)
    c_P = np.ascontiguousarray(c_P, dtype=float)
    return _kernel_two(eph, WP, WPh, WPR, WRP, rv, pv, c_R, c_P, hs, scale, psi)

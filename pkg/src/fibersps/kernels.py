"""Single-threaded numba kernels for the hot loops.

Element-wise updates only: every cell is written by exactly one
iteration, so results do not depend on scheduling and monitor
reductions stay in numpy with a fixed order.  A pure-numpy fallback
(used when FIBERSPS_NO_NUMBA is set, and by the equivalence tests)
implements identical arithmetic.
"""

from __future__ import annotations

import os

import numpy as np

_USE_NUMBA = os.environ.get("FIBERSPS_NO_NUMBA", "") == ""

if _USE_NUMBA:
    from numba import njit
else:  # pragma: no cover - exercised via subprocess in tests

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(f):
            return f

        return wrap


@njit(cache=True)
def _update_h_jit(ex, ey, ez, hx, hy, hz, invx, invy, invz, dt):
    nx, ny, nz = ex.shape
    for i in range(nx):
        for j in range(ny - 1):
            for k in range(nz - 1):
                hx[i, j, k] -= dt * (
                    (ez[i, j + 1, k] - ez[i, j, k]) * invy[j]
                    - (ey[i, j, k + 1] - ey[i, j, k]) * invz[k]
                )
    for i in range(nx - 1):
        for j in range(ny):
            for k in range(nz - 1):
                hy[i, j, k] -= dt * (
                    (ex[i, j, k + 1] - ex[i, j, k]) * invz[k]
                    - (ez[i + 1, j, k] - ez[i, j, k]) * invx[i]
                )
    for i in range(nx - 1):
        for j in range(ny - 1):
            for k in range(nz):
                hz[i, j, k] -= dt * (
                    (ey[i + 1, j, k] - ey[i, j, k]) * invx[i]
                    - (ex[i, j + 1, k] - ex[i, j, k]) * invy[j]
                )


def _update_h_np(ex, ey, ez, hx, hy, hz, invx, invy, invz, dt):
    hx[:, :-1, :-1] -= dt * (
        np.diff(ez[:, :, :-1], axis=1) * invy[None, :-1, None]
        - np.diff(ey[:, :-1, :], axis=2) * invz[None, None, :-1]
    )
    hy[:-1, :, :-1] -= dt * (
        np.diff(ex[:-1, :, :], axis=2) * invz[None, None, :-1]
        - np.diff(ez[:, :, :-1], axis=0) * invx[:-1, None, None]
    )
    hz[:-1, :-1, :] -= dt * (
        np.diff(ey, axis=0)[:, :-1, :] * invx[:-1, None, None]
        - np.diff(ex, axis=1)[:-1, :, :] * invy[None, :-1, None]
    )


@njit(cache=True)
def _update_e_jit(ex, ey, ez, hx, hy, hz, cbx, cby, cbz, invx, invy, invz):
    nx, ny, nz = ex.shape
    for i in range(nx):
        for j in range(1, ny):
            for k in range(1, nz):
                ex[i, j, k] += cbx[i, j, k] * (
                    (hz[i, j, k] - hz[i, j - 1, k]) * invy[j]
                    - (hy[i, j, k] - hy[i, j, k - 1]) * invz[k]
                )
    for i in range(1, nx):
        for j in range(ny):
            for k in range(1, nz):
                ey[i, j, k] += cby[i, j, k] * (
                    (hx[i, j, k] - hx[i, j, k - 1]) * invz[k]
                    - (hz[i, j, k] - hz[i - 1, j, k]) * invx[i]
                )
    for i in range(1, nx):
        for j in range(1, ny):
            for k in range(nz):
                ez[i, j, k] += cbz[i, j, k] * (
                    (hy[i, j, k] - hy[i - 1, j, k]) * invx[i]
                    - (hx[i, j, k] - hx[i, j - 1, k]) * invy[j]
                )


def _update_e_np(ex, ey, ez, hx, hy, hz, cbx, cby, cbz, invx, invy, invz):
    ex[:, 1:, 1:] += cbx[:, 1:, 1:] * (
        np.diff(hz[:, :, 1:], axis=1) * invy[None, 1:, None]
        - np.diff(hy[:, 1:, :], axis=2) * invz[None, None, 1:]
    )
    ey[1:, :, 1:] += cby[1:, :, 1:] * (
        np.diff(hx[1:, :, :], axis=2) * invz[None, None, 1:]
        - np.diff(hz[:, :, 1:], axis=0) * invx[1:, None, None]
    )
    ez[1:, 1:, :] += cbz[1:, 1:, :] * (
        np.diff(hy, axis=0)[:, 1:, :] * invx[1:, None, None]
        - np.diff(hx, axis=1)[1:, :, :] * invy[None, 1:, None]
    )


@njit(cache=True)
def _dft_accumulate_jit(acc, sample, phases):
    nw = acc.shape[0]
    n1 = acc.shape[1]
    n2 = acc.shape[2]
    for w in range(nw):
        p = phases[w]
        for a in range(n1):
            for b in range(n2):
                acc[w, a, b] += p * sample[a, b]


def _dft_accumulate_np(acc, sample, phases):
    acc += phases[:, None, None] * sample[None, :, :]


def update_h(ex, ey, ez, hx, hy, hz, invx, invy, invz, dt):
    if _USE_NUMBA:
        _update_h_jit(ex, ey, ez, hx, hy, hz, invx, invy, invz, dt)
    else:
        _update_h_np(ex, ey, ez, hx, hy, hz, invx, invy, invz, dt)


def update_e(ex, ey, ez, hx, hy, hz, cbx, cby, cbz, invx, invy, invz):
    if _USE_NUMBA:
        _update_e_jit(ex, ey, ez, hx, hy, hz, cbx, cby, cbz, invx, invy, invz)
    else:
        _update_e_np(ex, ey, ez, hx, hy, hz, cbx, cby, cbz, invx, invy, invz)


def dft_accumulate(acc, sample, phases):
    if _USE_NUMBA:
        _dft_accumulate_jit(acc, sample, phases)
    else:
        _dft_accumulate_np(acc, sample, phases)


def field_energy(arrays, margin: int) -> float:
    """Unweighted sum of squared field samples over the interior
    (``margin`` cells stripped per side); the run-termination metric."""
    total = 0.0
    sl = slice(margin, -margin) if margin > 0 else slice(None)
    for arr in arrays:
        v = arr[sl, sl, sl]
        total += float(np.einsum("ijk,ijk->", v, v, dtype=np.float64))
    return total

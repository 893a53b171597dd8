"""Batched numeric kernels.

Every kernel exists twice: a loop version compiled with ``numba.njit`` and a
vectorised numpy version.  The numba path is used when numba imports cleanly
and ``QUATQUOT_DISABLE_NUMBA`` is unset (or ``0``); otherwise the numpy path is
selected.  Both are importable directly for benchmarking and cross-checks.

Split coordinates: a batch of points is a pair of complex arrays ``x, y`` of
shape ``(n, k)`` with ``q_m = x_m + y_m j``.
"""
from __future__ import annotations

import os

import numpy as np

_DISABLED = os.environ.get("QUATQUOT_DISABLE_NUMBA", "0").lower() not in ("", "0", "false", "no")

try:
    if _DISABLED:
        raise ImportError("numba disabled by QUATQUOT_DISABLE_NUMBA")
    import numba
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def decorator(func):
            return func

        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return decorator


def set_threads_from_env() -> None:
    """Honour QUATQUOT_THREADS as a cap on numba's thread pool."""
    cap = os.environ.get("QUATQUOT_THREADS")
    if not (HAVE_NUMBA and cap):
        return
    try:
        n = max(1, min(int(cap), numba.config.NUMBA_NUM_THREADS))
    except ValueError:
        return
    numba.set_num_threads(n)


# ---------------------------------------------------------------------------
# twistor functions nu_m = (|x|^2 - |y|^2, Re(2ixy), Im(2ixy))


def nu_batch_numpy(x, y):
    out = np.empty(x.shape + (3,))
    xy = x * y
    out[..., 0] = np.abs(x) ** 2 - np.abs(y) ** 2
    out[..., 1] = -2.0 * xy.imag
    out[..., 2] = 2.0 * xy.real
    return out


@njit(cache=True)
def nu_batch_numba(x, y):
    n, k = x.shape
    out = np.empty((n, k, 3))
    for s in range(n):
        for m in range(k):
            xr, xi = x[s, m].real, x[s, m].imag
            yr, yi = y[s, m].real, y[s, m].imag
            out[s, m, 0] = xr * xr + xi * xi - yr * yr - yi * yi
            out[s, m, 1] = -2.0 * (xr * yi + xi * yr)
            out[s, m, 2] = 2.0 * (xr * yr - xi * yi)
    return out


# ---------------------------------------------------------------------------
# exact gradients of nu_m,a in real coordinates (w, a, b, c) = (Re x, Im x, Re y, Im y)


def nu_grad_batch_numpy(x, y):
    """Return array (n, k, 3, 4): gradient of component a of nu_m w.r.t. slot m."""
    xr, xi, yr, yi = x.real, x.imag, y.real, y.imag
    g = np.empty(x.shape + (3, 4))
    g[..., 0, :] = 2.0 * np.stack([xr, xi, -yr, -yi], axis=-1)
    g[..., 1, :] = -2.0 * np.stack([yi, yr, xi, xr], axis=-1)
    g[..., 2, :] = 2.0 * np.stack([yr, -yi, xr, -xi], axis=-1)
    return g


@njit(cache=True)
def nu_grad_batch_numba(x, y):
    n, k = x.shape
    g = np.empty((n, k, 3, 4))
    for s in range(n):
        for m in range(k):
            xr, xi = x[s, m].real, x[s, m].imag
            yr, yi = y[s, m].real, y[s, m].imag
            g[s, m, 0, 0] = 2.0 * xr
            g[s, m, 0, 1] = 2.0 * xi
            g[s, m, 0, 2] = -2.0 * yr
            g[s, m, 0, 3] = -2.0 * yi
            g[s, m, 1, 0] = -2.0 * yi
            g[s, m, 1, 1] = -2.0 * yr
            g[s, m, 1, 2] = -2.0 * xi
            g[s, m, 1, 3] = -2.0 * xr
            g[s, m, 2, 0] = 2.0 * yr
            g[s, m, 2, 1] = -2.0 * yi
            g[s, m, 2, 2] = 2.0 * xr
            g[s, m, 2, 3] = -2.0 * xi
    return g


# ---------------------------------------------------------------------------
# delta-cleared transversality determinant
#
#   delta * det(sum_i w_i (x) v_i / s_i) = sum_{i<j} det(w_i,w_j) det(v_i,v_j) prod_{l != i,j} s_l
#
# with w_i = (Re z_i, Im z_i), s_i = |q_i|^2.  Also returns the same sum with
# absolute values of the pair terms, used to normalise into [-1, 1].


def cleared_det_batch_numpy(s, w, v):
    n, k = s.shape
    wdet = np.outer(w[:, 0], w[:, 1]) - np.outer(w[:, 1], w[:, 0])
    vdet = np.outer(v[:, 0], v[:, 1]) - np.outer(v[:, 1], v[:, 0])
    iu, ju = np.triu_indices(k, 1)
    coef = (wdet * vdet)[iu, ju]
    # prod over l != i, j, computed without division so zeros are safe
    prods = np.empty((n, iu.size))
    for c, (i, j) in enumerate(zip(iu, ju)):
        mask = np.ones(k, dtype=bool)
        mask[[i, j]] = False
        prods[:, c] = np.prod(s[:, mask], axis=1)
    val = prods @ coef
    scale = prods @ np.abs(coef)
    return val, scale


@njit(cache=True)
def cleared_det_batch_numba(s, w, v):
    n, k = s.shape
    val = np.zeros(n)
    scale = np.zeros(n)
    for t in range(n):
        for i in range(k):
            for j in range(i + 1, k):
                c = (w[i, 0] * w[j, 1] - w[i, 1] * w[j, 0]) * (v[i, 0] * v[j, 1] - v[i, 1] * v[j, 0])
                if c == 0.0:
                    continue
                p = 1.0
                for l in range(k):
                    if l != i and l != j:
                        p *= s[t, l]
                val[t] += c * p
                scale[t] += abs(c) * p
    return val, scale


# ---------------------------------------------------------------------------
# Joyce determinant det(sum_i f^{p_i}(x, y) (x) v_i) on a tensor grid.
# p_i = inf encodes the elementary solution (-1, 0).


def joyce_det_grid_numpy(xs, ys, p, v):
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    M = np.zeros(X.shape + (2, 2))
    for pi, vi in zip(p, v):
        if np.isinf(pi):
            f0 = -np.ones_like(X)
            f1 = np.zeros_like(X)
        else:
            dx = X - pi
            rho = np.hypot(dx, Y)
            f0 = dx / rho
            f1 = Y / rho
        M[..., 0, 0] += f0 * vi[0]
        M[..., 0, 1] += f0 * vi[1]
        M[..., 1, 0] += f1 * vi[0]
        M[..., 1, 1] += f1 * vi[1]
    return M[..., 0, 0] * M[..., 1, 1] - M[..., 0, 1] * M[..., 1, 0]


@njit(cache=True)
def joyce_det_grid_numba(xs, ys, p, v):
    nx, ny = xs.size, ys.size
    out = np.empty((nx, ny))
    for a in range(nx):
        for b in range(ny):
            m00 = 0.0
            m01 = 0.0
            m10 = 0.0
            m11 = 0.0
            for i in range(p.size):
                if np.isinf(p[i]):
                    f0 = -1.0
                    f1 = 0.0
                else:
                    dx = xs[a] - p[i]
                    rho = np.sqrt(dx * dx + ys[b] * ys[b])
                    f0 = dx / rho
                    f1 = ys[b] / rho
                m00 += f0 * v[i, 0]
                m01 += f0 * v[i, 1]
                m10 += f1 * v[i, 0]
                m11 += f1 * v[i, 1]
            out[a, b] = m00 * m11 - m01 * m10
    return out


# ---------------------------------------------------------------------------
# inverse of nu on one slot: given targets t = (a, b, c) find (x, y) with
# nu(x, y) = t and arg x = 0.


def targets_to_split_numpy(t):
    a, b, c = t[..., 0], t[..., 1], t[..., 2]
    r = np.sqrt(a * a + b * b + c * c)
    xabs = np.sqrt(np.maximum(0.5 * (r + a), 0.0))
    yabs = np.sqrt(np.maximum(0.5 * (r - a), 0.0))
    x = xabs.astype(complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        y = np.where(xabs > 0, (b + 1j * c) / (2j * np.where(xabs > 0, xabs, 1.0)), yabs + 0j)
    return x, y


@njit(cache=True)
def targets_to_split_numba(t):
    n, k = t.shape[0], t.shape[1]
    x = np.zeros((n, k), dtype=np.complex128)
    y = np.zeros((n, k), dtype=np.complex128)
    for s in range(n):
        for m in range(k):
            a, b, c = t[s, m, 0], t[s, m, 1], t[s, m, 2]
            r = np.sqrt(a * a + b * b + c * c)
            xa = np.sqrt(max(0.5 * (r + a), 0.0))
            if xa > 0.0:
                x[s, m] = xa
                y[s, m] = complex(b, c) / complex(0.0, 2.0 * xa)
            else:
                y[s, m] = np.sqrt(max(0.5 * (r - a), 0.0))
    return x, y


if HAVE_NUMBA:
    nu_batch = nu_batch_numba
    nu_grad_batch = nu_grad_batch_numba
    cleared_det_batch = cleared_det_batch_numba
    joyce_det_grid = joyce_det_grid_numba
    targets_to_split = targets_to_split_numba
    set_threads_from_env()
else:
    nu_batch = nu_batch_numpy
    nu_grad_batch = nu_grad_batch_numpy
    cleared_det_batch = cleared_det_batch_numpy
    joyce_det_grid = joyce_det_grid_numpy
    targets_to_split = targets_to_split_numpy

BACKEND = "numba" if HAVE_NUMBA else "numpy"

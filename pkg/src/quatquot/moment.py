"""Twistor functions nu_m, the moment map mu_R = B* nu, and its certificates."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from . import _kernels
from ._grid import half_plane_grid
from .group_action import KernelBasis, build_omega, infinitesimal_matrix, integer_kernel
from .qalg import I, J, K, UPoint, complex_structure, left_mul_matrix
from .toric_data import ConformalData, DataError, DerivedData, derive_T

# Sign with which I_a acts on the gradient of the a-th component.  With q =
# x + y j and I_a = left multiplication by (i, j, k), nu_m is an equivariant
# twistor function for the triple (I_1, -I_2, -I_3); with these signs every
# s_a I_a grad(nu_m,a) equals 2 X(e_m).
COTANGENT_SIGNS = (1.0, -1.0, -1.0)


@dataclass(frozen=True)
class MomentSpec:
    Bstar: np.ndarray
    re_z: np.ndarray
    im_z: np.ndarray
    D: KernelBasis | None = None

    @property
    def k(self) -> int:
        return self.Bstar.shape[1]


def nu(p: UPoint) -> np.ndarray:
    """(k, 3) array whose row m is nu_m(p) in Im H."""
    return _kernels.nu_batch(p.x[None, :], p.y[None, :])[0]


def build_Bstar(R: ConformalData | Sequence[float], k: int | None = None, D: KernelBasis | None = None) -> MomentSpec:
    """Orthonormal rows spanning the annihilator of W = span{Re z, Im z}.

    Gram-Schmidt over (Re z, Im z, e_1, ..., e_k) in that order; the last k - 2
    surviving vectors are the rows.
    """
    if not isinstance(R, ConformalData):
        R = ConformalData(tuple(float(t) for t in R))
    z = R.z
    k = R.k if k is None else k
    if k != R.k:
        raise DataError(f"conformal data has {R.k} angles, expected {k}")
    re, im = z.real.copy(), z.imag.copy()
    basis: list[np.ndarray] = []
    for w in (re, im):
        for b in basis:
            w = w - (w @ b) * b
        nrm = np.linalg.norm(w)
        if nrm < 1e-12:
            raise DataError("Re(z) and Im(z) are linearly dependent")
        basis.append(w / nrm)
    rows = []
    for i in range(k):
        w = np.zeros(k)
        w[i] = 1.0
        for _ in range(2):  # re-orthogonalise once for stability
            for b in basis + rows:
                w = w - (w @ b) * b
        nrm = np.linalg.norm(w)
        if nrm > 1e-10:
            rows.append(w / nrm)
        if len(rows) == k - 2:
            break
    return MomentSpec(np.array(rows), re, im, D)


def spec_for(S: Sequence[Sequence[int]], theta: Sequence[float]) -> MomentSpec:
    D = integer_kernel(build_omega(derive_T(S)))
    return build_Bstar(ConformalData(tuple(theta)), len(S), D)


def mu(p: UPoint, spec: MomentSpec) -> np.ndarray:
    """(k-2, 3) array: row r is the r-th Im H component of B* nu(p)."""
    return spec.Bstar @ nu(p)


def _nu_grads(p: UPoint, flip: int | None = None) -> np.ndarray:
    g = _kernels.nu_grad_batch(p.x[None, :], p.y[None, :])[0]
    if flip is not None:
        g = g.copy()
        g[:, flip, :] *= -1.0
    return g


def dmu(p: UPoint, spec: MomentSpec, flip: int | None = None) -> np.ndarray:
    """Exact Jacobian of mu, shape (3(k-2), 4k); row 3r + a is d(mu_r)_a.

    ``flip`` negates one Im H component of every nu_m (mutation testing).
    """
    k = p.k
    g = _nu_grads(p, flip)  # (k, 3, 4)
    n = spec.Bstar.shape[0]
    J = np.zeros((n, 3, k, 4))
    J[:] = spec.Bstar[:, None, :, None] * np.transpose(g, (1, 0, 2))[None]
    return J.reshape(3 * n, 4 * k)


def holomorphicity_residual(p: UPoint, spec: MomentSpec, flip: int | None = None) -> float:
    """max over components r and axis pairs of |s_a I_a grad mu_r,a - s_b I_b grad mu_r,b|."""
    k = p.k
    G = dmu(p, spec, flip).reshape(-1, 3, 4 * k)
    fields = np.stack([COTANGENT_SIGNS[a] * (complex_structure(a + 1, k) @ G[:, a, :].T).T for a in range(3)], axis=1)
    res = 0.0
    for a in range(3):
        for b in range(a + 1, 3):
            if fields.shape[0]:
                res = max(res, float(np.max(np.linalg.norm(fields[:, a] - fields[:, b], axis=-1))))
    return res


_QUAT_L = np.stack([left_mul_matrix(u) for u in (I, J, K)])


def holomorphicity_residual_batch(x: np.ndarray, y: np.ndarray, spec: MomentSpec, flip: int | None = None) -> np.ndarray:
    """Vectorised holomorphicity residual over a batch of points (rows of x, y)."""
    g = _kernels.nu_grad_batch(np.ascontiguousarray(x), np.ascontiguousarray(y))  # (n, k, 3, 4)
    if flip is not None:
        g = g.copy()
        g[:, :, flip, :] *= -1.0
    # apply s_a I_a slot-wise, then combine with B*
    f = np.einsum("aij,nmaj->nmai", _QUAT_L, g) * np.asarray(COTANGENT_SIGNS)[None, None, :, None]
    F = np.einsum("rm,nmai->nrami", spec.Bstar, f)  # (n, r, a, k, 4)
    n = x.shape[0]
    F = F.reshape(n, spec.Bstar.shape[0], 3, -1)
    res = np.zeros(n)
    for a in range(3):
        for b in range(a + 1, 3):
            if F.shape[1]:
                res = np.maximum(res, np.linalg.norm(F[:, :, a] - F[:, :, b], axis=-1).max(axis=1))
    return res


def in_P(p: UPoint, spec: MomentSpec, tol_zero: float = 1e-9) -> bool:
    if p.is_zero():
        return False
    scale = float(p.norms_sq().sum())
    return bool(np.linalg.norm(mu(p, spec)) <= tol_zero * scale)


def w_residual(p: UPoint, spec: MomentSpec) -> float:
    """Distance of nu(p) from W (x) Im H, via least squares in the basis (Re z, Im z)."""
    N = nu(p)
    W = np.stack([spec.re_z, spec.im_z], axis=1)
    coef, *_ = np.linalg.lstsq(W, N, rcond=None)
    return float(np.linalg.norm(N - W @ coef))


def targets(R: ConformalData, xvec: np.ndarray, yvec: np.ndarray) -> np.ndarray:
    """t_i = Re(z_i) x + Im(z_i) y for batches of Im H vectors x, y of shape (n, 3)."""
    z = R.z
    return z.real[None, :, None] * xvec[:, None, :] + z.imag[None, :, None] * yvec[:, None, :]


def points_from_targets(t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Solve nu(p) = t slot-wise (arg x_m = 0); t has shape (n, k, 3)."""
    return _kernels.targets_to_split(np.ascontiguousarray(t, dtype=float))


def sample_P_arrays(R: ConformalData, xt: np.ndarray, yt: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Batch version of sample_P over matched arrays of half-plane coordinates."""
    xt = np.atleast_1d(np.asarray(xt, dtype=float))
    yt = np.atleast_1d(np.asarray(yt, dtype=float))
    if np.any(yt <= 0):
        raise ValueError("sample_P needs y > 0")
    n = xt.size
    xv = np.zeros((n, 3))
    xv[:, 0] = 1.0
    yv = np.zeros((n, 3))
    yv[:, 0] = -xt
    yv[:, 1] = yt
    return points_from_targets(targets(R, xv, yv))


def sample_P(R: ConformalData, grid: Sequence[tuple[float, float]]) -> list[UPoint]:
    """Points of P over the orbit-space coordinates (x~, y~), y~ > 0.

    Each point has nu(p) = Re(z) (x) (1,0,0) + Im(z) (x) (-x~, y~, 0).
    """
    if len(grid) == 0:
        return []
    xt, yt = np.asarray(grid, dtype=float).T
    x, y = sample_P_arrays(R, xt, yt)
    return [UPoint(a, b) for a, b in zip(x, y)]


def _pair_terms(R: ConformalData, T: DerivedData) -> tuple[np.ndarray, np.ndarray]:
    z = R.z
    w = np.stack([z.real, z.imag], axis=1)
    v = np.array(T.T, dtype=float)
    return w, v


def transversality_det(p: UPoint, T: DerivedData, R: ConformalData, normalized: bool = False) -> float:
    """delta * det(sum_i (Re z_i, Im z_i) (x) v_i / |q_i|^2), delta = prod |q_i|^2.

    Evaluated in its cleared polynomial form so one vanishing |q_i| is allowed.
    ``normalized`` divides by the sum of absolute pair terms, giving a value
    in [-1, 1] invariant under rescaling p.
    """
    s = p.norms_sq()
    if np.count_nonzero(s == 0) >= 2:
        raise ValueError("two or more vanishing quaternion coordinates")
    w, v = _pair_terms(R, T)
    val, scale = _kernels.cleared_det_batch(s[None, :].astype(float), w, v)
    if normalized:
        return float(val[0] / scale[0]) if scale[0] else 0.0
    return float(val[0])


def transversality_det_batch(x: np.ndarray, y: np.ndarray, T: DerivedData, R: ConformalData) -> tuple[np.ndarray, np.ndarray]:
    s = np.abs(x) ** 2 + np.abs(y) ** 2
    w, v = _pair_terms(R, T)
    return _kernels.cleared_det_batch(np.ascontiguousarray(s), w, v)


def transversality_bilinear(p: UPoint, spec: MomentSpec) -> np.ndarray:
    """(k-2) x (k-2) matrix h(X(D_r), X(B_s)); its nonsingularity is transversality."""
    if spec.D is None:
        raise DataError("MomentSpec has no kernel basis")
    X = infinitesimal_matrix(p)
    A = X @ spec.D.as_array().T.astype(float)
    B = X @ spec.Bstar.T
    return A.T @ B


def count_sign_changes(values: np.ndarray) -> int:
    """Sign changes between grid neighbours (along both axes)."""
    sg = np.sign(values)
    n = 0
    if sg.ndim == 2:
        n += int(np.count_nonzero(sg[1:, :] * sg[:-1, :] < 0))
        n += int(np.count_nonzero(sg[:, 1:] * sg[:, :-1] < 0))
    else:
        n += int(np.count_nonzero(sg[1:] * sg[:-1] < 0))
    return n


def scan_transversality(S: Sequence[Sequence[int]], theta: Sequence[float], n: int = 50, tol: float = 1e-9) -> dict[str, Any]:
    """Normalised cleared determinant over an n x n half-plane grid of P samples."""
    from .joyce import p_from_R

    R = ConformalData(tuple(theta))
    T = derive_T(S)
    xs, ys = half_plane_grid(np.array(p_from_R(R)), n)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    if X.size == 0:
        return {"min_abs_det": None, "sign_changes": 0, "samples": 0, "status": "PASS", "rows": []}
    x, y = sample_P_arrays(R, X.ravel(), Y.ravel())
    val, scale = transversality_det_batch(x, y, T, R)
    norm = np.where(scale > 0, val / np.where(scale > 0, scale, 1.0), 0.0).reshape(X.shape)
    changes = count_sign_changes(norm)
    min_abs = float(np.min(np.abs(norm)))
    signs = np.unique(np.sign(norm))
    ok = changes == 0 and min_abs > tol and signs.size == 1
    return {
        "min_abs_det": min_abs,
        "sign_changes": changes,
        "samples": int(norm.size),
        "sign": int(signs[0]) if signs.size == 1 else 0,
        "status": "PASS" if ok else "FAIL",
        "rows": list(zip(X.ravel().tolist(), Y.ravel().tolist(), norm.ravel().tolist())),
    }

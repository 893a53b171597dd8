"""Joyce's elementary solutions f^p and the half-plane determinant scans."""
from __future__ import annotations

import math
import warnings
from typing import Any, Sequence

import numpy as np

from . import _kernels
from ._grid import half_plane_grid
from .moment import count_sign_changes, sample_P_arrays, transversality_det_batch
from .toric_data import ConformalData, DerivedData, derive_T

INF = math.inf


def f_p(p: float, x: float, y: float) -> tuple[float, float]:
    """Unit vector ((x - p), y) / |(x - p, y)|; p = inf gives the limit (-1, 0)."""
    if math.isinf(p):
        if p < 0:
            raise ValueError("only p = +inf is used")
        return (-1.0, 0.0)
    if y < 0:
        raise ValueError("y must be >= 0")
    dx = x - p
    rho = math.hypot(dx, y)
    if rho == 0.0:
        raise ValueError(f"f^p is singular at ({p}, 0)")
    return (dx / rho, y / rho)


def p_from_R(R: ConformalData | Sequence[float]) -> list[float]:
    """p_i = Re z_i / Im z_i = cot theta_i, with p_1 = inf."""
    theta = R.theta if isinstance(R, ConformalData) else tuple(R)
    out = []
    for t in theta:
        out.append(INF if t == 0.0 else math.cos(t) / math.sin(t))
    return out


def joyce_matrix(T: DerivedData, p_list: Sequence[float], x: float, y: float, half: bool = True) -> np.ndarray:
    """1/2 sum_i f^{p_i}(x, y) (x) v_i, with entry (a, b) = 1/2 sum_i f_a v_b."""
    M = np.zeros((2, 2))
    for p, v in zip(p_list, T.T):
        f = f_p(p, x, y)
        M += np.outer(f, v)
    return 0.5 * M if half else M


def _grid_dets(T: DerivedData, p: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    v = np.array(T.T, dtype=float)
    return _kernels.joyce_det_grid(np.ascontiguousarray(xs, dtype=float), np.ascontiguousarray(ys, dtype=float), p, v)


def nondegeneracy_scan(
    T: DerivedData,
    p_list: Sequence[float],
    n: int = 50,
    eps: Sequence[float] = (1e-3, 1e-5),
) -> dict[str, Any]:
    """Scan det(sum f^{p_i} (x) v_i) on an interior grid plus near-boundary rows.

    Boundary rows sit at y = eps and report det / y, skipping x within 10 eps
    of a pole p_i.
    """
    p = np.array(p_list, dtype=float)
    xs, ys = half_plane_grid(p, n)
    if xs.size == 0:
        warnings.warn("empty grid: nothing to scan", stacklevel=2)
        return {"status": "PASS", "samples": 0, "min_abs_det": None, "sign_changes": 0,
                "boundary": [], "warning": "empty grid", "rows": []}
    dets = _grid_dets(T, p, xs, ys)
    changes = count_sign_changes(dets)
    interior_sign = np.unique(np.sign(dets))
    boundary = []
    bsigns = set()
    for e in eps:
        finite = p[np.isfinite(p)]
        bx = xs[np.all(np.abs(xs[:, None] - finite[None, :]) > 10 * e, axis=1)] if finite.size else xs
        bd = _grid_dets(T, p, bx, np.array([e]))[:, 0] / e
        bsigns.update(np.unique(np.sign(bd)).tolist())
        boundary.append({"eps": e, "min_abs_weighted_det": float(np.min(np.abs(bd))),
                         "sign_changes": count_sign_changes(bd)})
    all_signs = set(interior_sign.tolist()) | bsigns
    ok = changes == 0 and len(all_signs) == 1 and 0.0 not in all_signs
    ok = ok and all(b["sign_changes"] == 0 for b in boundary)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    return {
        "status": "PASS" if ok else "FAIL",
        "samples": int(dets.size),
        "min_abs_det": float(np.min(np.abs(dets))),
        "sign_changes": changes,
        "sign": int(interior_sign[0]) if interior_sign.size == 1 else 0,
        "boundary": boundary,
        "rows": list(zip(X.ravel().tolist(), Y.ravel().tolist(), dets.ravel().tolist())),
    }


def correspondence_check(
    S: Sequence[Sequence[int]],
    theta: Sequence[float],
    n: int = 50,
    tol: float = 1e-9,
    joyce_T: DerivedData | None = None,
    identity_tol: float = 1e-8,
) -> dict[str, Any]:
    """Compare the moment-side cleared determinant with the Joyce determinant.

    Moment side: sample a point of P over each grid point and evaluate the
    delta-cleared determinant from its actual |q_i|^2.  Joyce side: the f^p
    sum at the same (x~, y~).  Both must be nonzero with one relative sign
    everywhere, and det_Joyce must equal -y~ * cleared / delta (exact when
    |q_i|^2 = |Re(z_i) x + Im(z_i) y|) to ``identity_tol``.
    """
    R = ConformalData(tuple(theta))
    T = derive_T(S)
    JT = T if joyce_T is None else joyce_T
    p = np.array(p_from_R(R))
    xs, ys = half_plane_grid(p, n)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    if X.size == 0:
        return {"status": "PASS", "samples": 0, "mismatches": 0, "relative_sign": 0, "rearrangement_error": 0.0}
    x, y = sample_P_arrays(R, X.ravel(), Y.ravel())
    cleared, scale = transversality_det_batch(x, y, T, R)
    delta = np.prod(np.abs(x) ** 2 + np.abs(y) ** 2, axis=1)
    jd = _grid_dets(JT, p, xs, ys).ravel()
    m_norm = cleared / scale
    j_norm = jd / Y.ravel()  # bounded as y -> 0
    both_nonzero = (np.abs(m_norm) > tol) & (np.abs(j_norm) > tol)
    rel = np.sign(m_norm) * np.sign(j_norm)
    rel_signs = np.unique(rel[both_nonzero])
    majority = 0
    if rel_signs.size:
        majority = 1 if np.count_nonzero(rel[both_nonzero] > 0) >= np.count_nonzero(rel[both_nonzero] < 0) else -1
    predicted = -Y.ravel() * cleared / delta
    rel_err = np.abs(jd - predicted) / np.maximum(1.0, np.abs(jd))
    bad = ~both_nonzero | (rel != majority) | (rel_err > identity_tol)
    mismatches = int(np.count_nonzero(bad))
    rearr = float(np.max(rel_err))
    return {
        "status": "PASS" if mismatches == 0 else "FAIL",
        "samples": int(X.size),
        "mismatches": mismatches,
        "relative_sign": int(majority),
        "fraction_matched": float(1.0 - mismatches / X.size),
        "rearrangement_error": rearr,
    }

from __future__ import annotations

import numpy as np


def half_plane_grid(p: np.ndarray, n: int, y_min: float = 1e-2) -> tuple[np.ndarray, np.ndarray]:
    """N x N grid over the upper half plane covering every finite p_i.

    x is uniform on [-L, L], y geometric on [y_min, L], with
    L = max(4, 2 max |p_i|).
    """
    finite = np.abs(p[np.isfinite(p)])
    L = max(4.0, 2.0 * float(finite.max())) if finite.size else 4.0
    if n <= 0:
        return np.empty(0), np.empty(0)
    if n == 1:
        return np.array([0.5]), np.array([1.0])
    xs = np.linspace(-L, L, n)
    ys = np.geomspace(y_min, L, n)
    return xs, ys

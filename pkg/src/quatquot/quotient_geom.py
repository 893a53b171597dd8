"""Descent of the hypercomplex structure to the 4-dimensional quotient at points of P.

At p in P let K = ker d(mu)_p and V = span{X(d) : d in g} + span{p, I_1 p,
I_2 p, I_3 p} (torus orbit plus H* fibre).  T_[p] M is K / V.  For each axis
a, I_a v (v in K) lies in the I_a-complex level set of the other two moment
components; it is moved back into K along the complexified orbit
directions I_a X(g), which is possible exactly when the transversality form
is nondegenerate.  The resulting class mod V defines the descended I_a.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .group_action import KernelBasis, infinitesimal_matrix
from .moment import MomentSpec, dmu, in_P, mu, nu, points_from_targets, sample_P_arrays, targets, transversality_bilinear
from .qalg import Quaternion, UPoint, complex_structure, fiber_act, torus_act
from .toric_data import ConformalData, DataError


class DescentError(ValueError):
    """The sample point is unsuitable for descent (stabilised, ill-conditioned, ...)."""


def _null_space(A: np.ndarray, rtol: float = 1e-10) -> np.ndarray:
    u, s, vt = np.linalg.svd(A)
    tol = rtol * (s[0] if s.size else 1.0)
    r = int(np.count_nonzero(s > tol))
    return vt[r:].T


def _rank(A: np.ndarray, rtol: float = 1e-8) -> int:
    if A.size == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    return int(np.count_nonzero(s > rtol * s[0])) if s[0] > 0 else 0


def fiber_directions(p: UPoint) -> np.ndarray:
    """4k x 4 matrix: p, I_1 p, I_2 p, I_3 p."""
    v = p.to_real()
    k = p.k
    return np.stack([v] + [complex_structure(a, k) @ v for a in (1, 2, 3)], axis=1)


@dataclass
class VerticalSpace:
    vectors: np.ndarray
    rank: int
    expected: int

    @property
    def full_rank(self) -> bool:
        return self.rank == self.expected


def vertical_space(p: UPoint, D: KernelBasis | np.ndarray) -> VerticalSpace:
    """Orbit directions X(d) for the rows d of D together with the four fibre directions."""
    Dm = D.as_array() if isinstance(D, KernelBasis) else np.asarray(D)
    if Dm.shape[0] == 0:
        raise DataError("empty group: need at least one generator")
    A = infinitesimal_matrix(p) @ Dm.T.astype(float)
    V = np.concatenate([A, fiber_directions(p)], axis=1)
    return VerticalSpace(V, _rank(V), V.shape[1])


@dataclass
class DescendedFrame:
    point: UPoint
    basis: np.ndarray  # 4k x 4, representatives of K / V
    endos: np.ndarray  # (3, 4, 4): descended I_1, I_2, I_3
    dim_K: int
    condition: float
    transversality_margin: float
    lift_residual: float
    diagnostics: dict[str, Any] = field(default_factory=dict)

    def relation_residuals(self) -> dict[str, float]:
        I1, I2, I3 = self.endos
        eye = np.eye(4)
        return {
            "I1I2-I3": float(np.linalg.norm(I1 @ I2 - I3)),
            "I1^2+1": float(np.linalg.norm(I1 @ I1 + eye)),
            "I2^2+1": float(np.linalg.norm(I2 @ I2 + eye)),
            "I3^2+1": float(np.linalg.norm(I3 @ I3 + eye)),
        }

    def max_residual(self) -> float:
        return max(self.relation_residuals().values())


def descend_H(
    p: UPoint,
    spec: MomentSpec,
    basis: np.ndarray | None = None,
    complement: str = "orbit",
    margin_tol: float = 1e-6,
) -> DescendedFrame:
    """Descended quaternionic triple on K / V at p.

    ``complement="orbit"`` corrects I_a v along I_a X(g) (the construction).
    ``complement="normal"`` instead projects orthogonally onto K; it agrees
    with "orbit" only when the B and A directions coincide and is kept for
    comparison.
    """
    if spec.D is None:
        raise DataError("MomentSpec needs a kernel basis")
    if not in_P(p, spec):
        raise DescentError("point is not on the zero set of the moment map")
    k = p.k
    scale = float(p.norms_sq().sum())
    Jm = dmu(p, spec)
    Kb = _null_space(Jm)
    dim_K = Kb.shape[1]
    if dim_K != k + 6:
        raise DescentError(f"dim ker dmu = {dim_K}, expected {k + 6}")

    vert = vertical_space(p, spec.D)
    if not vert.full_rank:
        raise DescentError("vertical space is rank deficient (stabilised point)")
    V = vert.vectors

    M = transversality_bilinear(p, spec)
    sv = np.linalg.svd(M, compute_uv=False)
    margin = float(sv.min()) if sv.size else 0.0
    if margin < margin_tol * scale:
        raise DescentError(f"transversality margin {margin:.3e} below {margin_tol:.1e} * scale")

    if basis is None:
        Vo, _ = np.linalg.qr(V)
        coords = Kb.T @ Vo  # V inside K, in K coordinates
        comp = _null_space(coords.T)
        if comp.shape[1] != 4:
            raise DescentError(f"quotient dimension {comp.shape[1]}, expected 4")
        basis = Kb @ comp
    basis = np.asarray(basis, dtype=float)
    if basis.shape != (4 * k, 4):
        raise DataError("basis must be 4k x 4")

    full = np.concatenate([basis, V], axis=1)
    sfull = np.linalg.svd(full, compute_uv=False)
    cond = float(sfull[0] / sfull[-1])

    A = infinitesimal_matrix(p) @ spec.D.as_array().T.astype(float)
    Jr = Jm.reshape(-1, 3, 4 * k)
    endos = np.zeros((3, 4, 4))
    lift = 0.0
    Pk = Kb @ Kb.T
    for a in range(3):
        Ia = complex_structure(a + 1, k)
        W = Ia @ basis
        if complement == "orbit":
            C = Ia @ A
            Ja = Jr[:, a, :]
            c = np.linalg.solve(Ja @ C, Ja @ W)
            W = W - C @ c
        elif complement == "normal":
            W = Pk @ W
        else:
            raise ValueError(f"unknown complement {complement!r}")
        lift = max(lift, float(np.linalg.norm(Jm @ W)) / max(1.0, scale))
        coef, *_ = np.linalg.lstsq(full, W, rcond=None)
        endos[a] = coef[:4]
    return DescendedFrame(p, basis, endos, dim_K, cond, margin, lift)


def conformal_rep(frame: DescendedFrame, w: np.ndarray | None = None) -> np.ndarray:
    """Gram matrix making {w, I_1 w, I_2 w, I_3 w} orthonormal (default w = first basis vector)."""
    w = np.eye(4)[:, 0] if w is None else np.asarray(w, dtype=float)
    F = np.stack([w] + [frame.endos[a] @ w for a in range(3)], axis=1)
    Finv = np.linalg.inv(F)
    return Finv.T @ Finv


def same_conformal_class(G1: np.ndarray, G2: np.ndarray) -> float:
    """Distance between two Gram matrices after normalising to unit determinant."""
    n1 = G1 / np.linalg.det(G1) ** 0.25
    n2 = G2 / np.linalg.det(G2) ** 0.25
    return float(np.max(np.abs(n1 - n2)))


def descend_nu1(p: UPoint, frame: DescendedFrame) -> np.ndarray:
    """J = (a I_1 + b I_2 + c I_3) / |nu_1(p)| with nu_1(p) = (a, b, c)."""
    n1 = nu(p)[0]
    r = float(np.linalg.norm(n1))
    if p.norms_sq()[0] == 0.0 or r == 0.0:
        raise DescentError("q_1 = 0: the distinguished complex structure is undefined there")
    return np.einsum("a,aij->ij", n1 / r, frame.endos)


def random_unit_quaternion(rng: np.random.Generator) -> Quaternion:
    v = rng.normal(size=4)
    v /= np.linalg.norm(v)
    return Quaternion(*v)


def random_P_samples(R: ConformalData, n: int, rng: np.random.Generator, y_range=(0.05, 20.0)) -> list[UPoint]:
    """Points of P over random half-plane positions, moved by random torus and H* elements."""
    from .joyce import p_from_R

    p = np.array(p_from_R(R))
    finite = np.abs(p[np.isfinite(p)])
    L = max(4.0, 2.0 * float(finite.max())) if finite.size else 4.0
    xt = rng.uniform(-L, L, n)
    yt = np.exp(rng.uniform(np.log(y_range[0]), np.log(y_range[1]), n))
    x, y = sample_P_arrays(R, xt, yt)
    out = []
    for a, b in zip(x, y):
        q = UPoint(a, b)
        q = torus_act(np.exp(2j * np.pi * rng.uniform(size=q.k)), q)
        c = random_unit_quaternion(rng)
        s = np.exp(rng.uniform(-1.0, 1.0))
        q = fiber_act(Quaternion(s * c.w, s * c.a, s * c.b, s * c.c), q)
        out.append(q)
    return out


def descend_summary(
    S: Sequence[Sequence[int]], theta: Sequence[float], samples: int = 200, seed: int = 0, tol: float = 1e-6
) -> dict[str, Any]:
    from .moment import spec_for

    spec = spec_for(S, theta)
    R = ConformalData(tuple(theta))
    rng = np.random.default_rng(seed)
    pts = random_P_samples(R, samples, rng)
    per = []
    skipped = 0
    for q in pts:
        try:
            fr = descend_H(q, spec)
        except DescentError:
            skipped += 1
            continue
        J = descend_nu1(q, fr)
        res = fr.relation_residuals()
        res["J^2+1"] = float(np.linalg.norm(J @ J + np.eye(4)))
        res["mu"] = float(np.linalg.norm(mu(q, spec)))
        per.append(res)
    max_res = max((max(v for kk, v in r.items() if kk != "mu") for r in per), default=0.0)
    return {
        "accepted": len(per),
        "skipped": skipped,
        "max_residual": max_res,
        "status": "PASS" if per and max_res <= tol else "FAIL",
        "samples": per,
    }


@dataclass
class FixedPointReport:
    index: int
    samples: int
    max_mu: float
    max_qi: float
    null_torus_directions: list[int]
    stabilizer_dims: list[int]
    g_rank_ok: bool

    def to_json(self) -> dict[str, Any]:
        return self.__dict__.copy()


def fixed_point_probe(
    S: Sequence[Sequence[int]], theta: Sequence[float], i: int, samples: int = 5, seed: int = 0
) -> FixedPointReport:
    """Points of P with q_i = 0 and the torus directions that degenerate there (i is 1-based)."""
    from .joyce import p_from_R
    from .moment import spec_for

    k = len(S)
    if not 1 <= i <= k:
        raise DataError(f"index {i} out of range 1..{k}")
    R = ConformalData(tuple(theta))
    spec = spec_for(S, theta)
    pvals = p_from_R(R)
    xv = np.zeros((1, 3))
    yv = np.zeros((1, 3))
    if i == 1:
        yv[0, 0] = 1.0
    else:
        xv[0, 0] = 1.0
        yv[0, 0] = -pvals[i - 1]
    x, y = points_from_targets(targets(R, xv, yv))
    base = UPoint(x[0], y[0])
    rng = np.random.default_rng(seed)
    max_mu = 0.0
    max_qi = 0.0
    nulls, stabs = [], []
    g_ok = True
    for _ in range(samples):
        q = torus_act(np.exp(2j * np.pi * rng.uniform(size=k)), base)
        q = fiber_act(random_unit_quaternion(rng), q)
        scale = float(q.norms_sq().sum())
        max_mu = max(max_mu, float(np.linalg.norm(mu(q, spec))) / scale)
        max_qi = max(max_qi, float(np.sqrt(q.norms_sq()[i - 1])))
        X = infinitesimal_matrix(q)
        s = np.linalg.svd(X, compute_uv=False)
        nulls.append(int(np.count_nonzero(s < 1e-8 * max(1.0, s[0]))))
        stabs.append(k + 4 - _rank(np.concatenate([X, fiber_directions(q)], axis=1)))
        g_ok = g_ok and vertical_space(q, spec.D).full_rank
    return FixedPointReport(i, samples, max_mu, max_qi, nulls, stabs, g_ok)

"""The quotient map Omega, its integer kernel g, and the torus action fields."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from ._lattice import det2, lattice_index, rank, integer_kernel as _int_kernel
from .qalg import UPoint
from .toric_data import DataError, DerivedData, derive_T, recover_S


@dataclass(frozen=True)
class OmegaMap:
    matrix: tuple[tuple[int, ...], tuple[int, ...]]

    @property
    def k(self) -> int:
        return len(self.matrix[0])

    def as_array(self) -> np.ndarray:
        return np.array(self.matrix, dtype=np.int64)


@dataclass(frozen=True)
class KernelBasis:
    D: tuple[tuple[int, ...], ...]

    def as_array(self) -> np.ndarray:
        return np.array(self.D, dtype=np.int64).reshape(len(self.D), -1)


def build_omega(T: DerivedData) -> OmegaMap:
    """2 x k matrix whose columns are v_1..v_k."""
    return OmegaMap((tuple(v[0] for v in T.T), tuple(v[1] for v in T.T)))


def integer_kernel(omega: OmegaMap) -> KernelBasis:
    """Saturated integer basis of ker(Omega), canonicalised by row HNF."""
    if rank(omega.matrix) < 2:
        raise DataError("Omega has rank < 2; consecutive lattice vectors must be independent")
    return KernelBasis(tuple(tuple(r) for r in _int_kernel(omega.matrix)))


def kernel_for(S: Sequence[Sequence[int]]) -> KernelBasis:
    return integer_kernel(build_omega(derive_T(S)))


def quotient_is_F(S: Sequence[Sequence[int]], D: KernelBasis | None = None) -> bool:
    """Whether T^k / G_S is the full torus F.

    The T^k lattice is generated by 1/2(e_1 + ... + e_k), e_2, ..., e_k; its
    image under Omega is generated by u_k, v_2, ..., v_k.  G_S = ker Omega, so
    the quotient is F exactly when that image is all of Z^2.
    """
    T = derive_T(S)
    if D is not None:
        Om = build_omega(T).as_array()
        Dm = D.as_array()
        if Dm.shape[1] != Om.shape[1] or np.any(Om @ Dm.T):
            raise DataError("D is not a kernel basis for this S")
    v = T.T
    # Omega(1/2 sum e_i) = 1/2 sum v_i = u_k
    half_sum = [sum(w[c] for w in v) for c in range(2)]
    if half_sum[0] % 2 or half_sum[1] % 2:
        raise DataError("sum of v_i must be even")
    gens = [(half_sum[0] // 2, half_sum[1] // 2)] + list(v[1:])
    return lattice_index(gens, 2) == 1


@dataclass
class LocallyFreeReport:
    status: str
    witnesses: list[dict[str, Any]] = field(default_factory=list)
    dependent_pairs: list[int] = field(default_factory=list)
    bound: int = 8

    def to_json(self) -> dict[str, Any]:
        return {
            "locally_free": self.status,
            "witnesses": self.witnesses,
            "dependent_pairs": self.dependent_pairs,
            "bound": self.bound,
        }


def locally_free_screen(T: DerivedData, bound: int = 8) -> LocallyFreeReport:
    """Search g ∩ Z^k for circles d = (d1,..,d1, d_m, -d1,..,-d1) that could fix a point.

    Such a d lies in g iff (d1 + d_m) u_m + (d1 - d_m) u_{m-1} = 0, which
    forces u_m and u_{m-1} to be parallel.  Each hit is reported as a witness;
    the symbolic check (parallel consecutive u) is reported independently of
    the bound.
    """
    v = T.T
    k = len(v)
    u = recover_S(T)
    witnesses: list[dict[str, Any]] = []
    for m in range(1, k):  # 0-based position of d_m, i.e. m = 2..k
        before = [sum(w[c] for w in v[:m]) for c in range(2)]
        after = [sum(w[c] for w in v[m + 1 :]) for c in range(2)]
        base = (before[0] - after[0], before[1] - after[1])
        vm = v[m]
        for d1 in range(1, bound + 1):
            # need d1 * base + d_m * v_m = 0 with d_m integer
            rhs = (-d1 * base[0], -d1 * base[1])
            if vm == (0, 0):
                candidates = [0] if rhs == (0, 0) else []
            elif det2(vm, rhs) != 0:
                candidates = []
            else:
                c = 0 if vm[0] != 0 else 1
                if rhs[c] % vm[c]:
                    candidates = []
                else:
                    candidates = [rhs[c] // vm[c]]
            for dm in candidates:
                d = [d1] * m + [dm] + [-d1] * (k - m - 1)
                lhs = tuple((d1 + dm) * u[m][c] + (d1 - dm) * u[m - 1][c] for c in range(2))
                witnesses.append({"m": m + 1, "d": d, "identity_holds": lhs == (0, 0)})
    dependent = [m + 1 for m in range(1, k) if det2(u[m], u[m - 1]) == 0]
    status = "PASS" if not witnesses and not dependent else "FAIL"
    return LocallyFreeReport(status, witnesses, dependent, bound)


def infinitesimal(d: Sequence[float], p: UPoint) -> UPoint:
    """Tangent vector of t -> p . exp(i t d): slot m gets (i d_m x_m, -i d_m y_m)."""
    d = np.asarray(d, dtype=float)
    return UPoint(1j * d * p.x, -1j * d * p.y)


def infinitesimal_matrix(p: UPoint) -> np.ndarray:
    """4k x k real matrix whose column m is the real form of infinitesimal(e_m, p)."""
    k = p.k
    X = np.zeros((4 * k, k))
    X[4 * np.arange(k) + 0, np.arange(k)] = -p.x.imag
    X[4 * np.arange(k) + 1, np.arange(k)] = p.x.real
    X[4 * np.arange(k) + 2, np.arange(k)] = p.y.imag
    X[4 * np.arange(k) + 3, np.arange(k)] = -p.y.real
    return X


def kernel_report(S: Sequence[Sequence[int]], bound: int = 8) -> dict[str, Any]:
    T = derive_T(S)
    D = integer_kernel(build_omega(T))
    lf = locally_free_screen(T, bound)
    out = {
        "kernel_basis": [list(r) for r in D.D],
        "quotient_is_F": quotient_is_F(S, D),
    }
    out.update(lf.to_json())
    return out

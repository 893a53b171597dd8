"""Exact integer linear algebra: Smith invariants, saturated kernels, row HNF."""
from __future__ import annotations

from math import gcd
from typing import Sequence

from sympy import Matrix, ZZ
from sympy.matrices.normalforms import invariant_factors, smith_normal_decomp

IntMatrix = list[list[int]]


def as_int_rows(m: Sequence[Sequence[int]]) -> IntMatrix:
    return [[int(a) for a in row] for row in m]


def rank(m: Sequence[Sequence[int]]) -> int:
    if not m or not m[0]:
        return 0
    return Matrix(as_int_rows(m)).rank()


def smith_invariants(m: Sequence[Sequence[int]]) -> tuple[int, ...]:
    """Nonzero invariant factors of an integer matrix."""
    if not m or not m[0]:
        return ()
    inv = invariant_factors(Matrix(as_int_rows(m)), domain=ZZ)
    return tuple(abs(int(d)) for d in inv if d != 0)


def lattice_index(vectors: Sequence[Sequence[int]], dim: int) -> int:
    """[Z^dim : span_Z(vectors)], or 0 when the span has lower rank."""
    cols = [list(col) for col in zip(*vectors)] if vectors else [[] for _ in range(dim)]
    inv = smith_invariants(cols)
    if len(inv) < dim:
        return 0
    idx = 1
    for d in inv:
        idx *= d
    return idx


def row_hnf(m: Sequence[Sequence[int]]) -> IntMatrix:
    """Row-style Hermite normal form with zero rows dropped.

    Pivots are positive, entries above a pivot are reduced into [0, pivot).
    """
    A = as_int_rows(m)
    if not A:
        return []
    nrows, ncols = len(A), len(A[0])
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        # Euclid on column c among rows r..
        while True:
            nz = [i for i in range(r, nrows) if A[i][c] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(A[i][c]))
            A[r], A[piv] = A[piv], A[r]
            done = True
            for i in range(r + 1, nrows):
                if A[i][c]:
                    q = A[i][c] // A[r][c]
                    A[i] = [a - q * b for a, b in zip(A[i], A[r])]
                    if A[i][c]:
                        done = False
            if done:
                break
        if A[r][c] == 0:
            continue
        if A[r][c] < 0:
            A[r] = [-a for a in A[r]]
        for i in range(r):
            q = A[i][c] // A[r][c]
            if q:
                A[i] = [a - q * b for a, b in zip(A[i], A[r])]
        r += 1
    return [row for row in A[:r]]


def integer_kernel(m: Sequence[Sequence[int]]) -> IntMatrix:
    """Basis (as rows, in row HNF) of the saturated lattice ker(m) ∩ Z^n."""
    M = Matrix(as_int_rows(m))
    n = M.cols
    a, s, t = smith_normal_decomp(M, domain=ZZ)
    # a = s * M * t with t unimodular: columns of t past the rank span the kernel
    r = sum(1 for i in range(min(a.rows, a.cols)) if a[i, i] != 0)
    basis = [[int(t[i, j]) for i in range(n)] for j in range(r, n)]
    return row_hnf(basis)


def content(v: Sequence[int]) -> int:
    g = 0
    for a in v:
        g = gcd(g, int(a))
    return g


def det2(u: Sequence[int], w: Sequence[int]) -> int:
    return int(u[0]) * int(w[1]) - int(u[1]) * int(w[0])

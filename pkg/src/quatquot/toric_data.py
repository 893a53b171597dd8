"""Combinatorial data S, derived data T, conformal data R.

S is an ordered list of lattice vectors u_1..u_k in Z^2 with u_1 = (p, 0),
p >= 1, and every later u_i in the open upper half plane.  T is the list
v_1 = u_1 + u_k, v_i = u_i - u_{i-1}.  R is a list of angles
0 = theta_1 < ... < theta_k < pi.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from ._lattice import det2, lattice_index

Vec = tuple[int, int]


class DataError(ValueError):
    """Input data is malformed (wrong arity, zero vectors, non-integral T, ...)."""


@dataclass(frozen=True)
class Issue:
    check: str
    index: int | None
    message: str

    def to_json(self) -> dict[str, Any]:
        return {"check": self.check, "index": self.index, "message": self.message}


@dataclass
class ValidationReport:
    checks: dict[str, bool]
    issues: list[Issue] = field(default_factory=list)
    extra: dict[str, Any] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"ok": self.ok, "checks": dict(self.checks)}
        out.update(self.extra)
        out["errors"] = [i.to_json() for i in self.issues]
        return out


def _as_vectors(S: Sequence[Sequence[int]]) -> list[Vec]:
    out = []
    for i, u in enumerate(S):
        if len(u) != 2:
            raise DataError(f"lattice vector {i + 1} must have two entries")
        a, b = u
        if int(a) != a or int(b) != b:
            raise DataError(f"lattice vector {i + 1} must be integral")
        out.append((int(a), int(b)))
    return out


def validate_S(S: Sequence[Sequence[int]]) -> ValidationReport:
    """Sector normalisation, consecutive independence and generation of Z^2."""
    u = _as_vectors(S)
    k = len(u)
    if k < 3:
        raise DataError(f"need at least 3 lattice vectors, got {k}")
    for i, v in enumerate(u):
        if v == (0, 0):
            raise DataError(f"lattice vector {i + 1} is zero")

    issues: list[Issue] = []
    sector = True
    if not (u[0][1] == 0 and u[0][0] >= 1):
        sector = False
        issues.append(Issue("sector", 1, f"u_1 = {u[0]} must be (p, 0) with p >= 1"))
    for i in range(1, k):
        if u[i][1] <= 0:
            sector = False
            issues.append(Issue("sector", i + 1, f"u_{i + 1} = {u[i]} must have positive second entry"))

    independent = True
    for i in range(k - 1):
        if det2(u[i], u[i + 1]) == 0:
            independent = False
            issues.append(
                Issue("consecutive_independent", i + 1, f"u_{i + 1} and u_{i + 2} are linearly dependent")
            )

    index = lattice_index(u, 2)
    generates = index == 1
    if not generates:
        issues.append(
            Issue("generates", None, f"u_1..u_k span a sublattice of index {index or 'infinite'}")
        )
    return ValidationReport(
        checks={"sector": sector, "consecutive_independent": independent, "generates": generates},
        issues=issues,
        extra={"index": index, "simply_connected": generates},
    )


def _winds_once(w: Sequence[Vec]) -> bool:
    n = len(w)
    if any(det2(w[i], w[(i + 1) % n]) <= 0 for i in range(n)):
        return False
    # with every turn in (0, pi), count passes through angle 0
    upper = [b > 0 or (b == 0 and a > 0) for a, b in w]
    crossings = sum(1 for i in range(n) if not upper[i] and upper[(i + 1) % n])
    return crossings == 1


def is_convex(S: Sequence[Sequence[int]]) -> bool:
    """True when S, read up to sign, lists the outward normals of a convex polygon.

    Each u_i is only defined up to sign, so the polygon in question is the
    centrally symmetric one with normals eps_1 u_1, ..., eps_k u_k,
    -eps_1 u_1, ..., -eps_k u_k.  We search all sign choices for one whose
    cyclic sequence turns strictly counter-clockwise and winds exactly once.
    """
    u = _as_vectors(S)
    if len(u) < 3:
        raise DataError(f"need at least 3 lattice vectors, got {len(u)}")
    for signs in itertools.product((1, -1), repeat=len(u) - 1):
        eps = (1,) + signs
        w = [(e * a, e * b) for e, (a, b) in zip(eps, u)]
        cycle = w + [(-a, -b) for a, b in w]
        if _winds_once(cycle):
            return True
    return False


@dataclass(frozen=True)
class DerivedData:
    T: tuple[Vec, ...]

    @property
    def k(self) -> int:
        return len(self.T)


def derive_T(S: Sequence[Sequence[int]]) -> DerivedData:
    u = _as_vectors(S)
    k = len(u)
    if k < 3:
        raise DataError(f"need at least 3 lattice vectors, got {k}")
    v = [(u[0][0] + u[-1][0], u[0][1] + u[-1][1])]
    v += [(u[i][0] - u[i - 1][0], u[i][1] - u[i - 1][1]) for i in range(1, k)]
    return DerivedData(tuple(v))


def recover_S(T: DerivedData | Sequence[Sequence[int]]) -> list[Vec]:
    """u_i = 1/2 sum_{j<=i} v_j - 1/2 sum_{j>i} v_j, rejecting half-integral results."""
    v = _as_vectors(T.T if isinstance(T, DerivedData) else T)
    k = len(v)
    out = []
    for i in range(k):
        comps = []
        for c in range(2):
            s = Fraction(sum(w[c] for w in v[: i + 1]) - sum(w[c] for w in v[i + 1 :]), 2)
            if s.denominator != 1:
                raise DataError(f"reconstruction of u_{i + 1} is not integral")
            comps.append(int(s))
        out.append((comps[0], comps[1]))
    return out


def b2(S: Sequence[Sequence[int]]) -> int:
    return len(S) - 2


@dataclass(frozen=True)
class ConformalData:
    theta: tuple[float, ...]

    @property
    def k(self) -> int:
        return len(self.theta)

    @property
    def z(self) -> np.ndarray:
        return np.exp(1j * np.asarray(self.theta, dtype=float))

    @property
    def zeta(self) -> np.ndarray:
        return self.z**2


def validate_R(theta: Sequence[float]) -> ValidationReport:
    th = [float(t) for t in theta]
    issues: list[Issue] = []
    first = bool(th) and th[0] == 0.0
    if not first:
        issues.append(Issue("theta_1_zero", 1, "theta_1 must be exactly 0"))
    strict = True
    for i in range(len(th) - 1):
        if not th[i] < th[i + 1]:
            strict = False
            issues.append(
                Issue("strictly_increasing", i + 2, f"theta_{i + 1} < theta_{i + 2} fails ({th[i]} vs {th[i + 1]})")
            )
    below_pi = bool(th) and th[-1] < math.pi
    if not below_pi:
        issues.append(Issue("below_pi", len(th), "theta_k must be < pi"))
    finite = all(math.isfinite(t) for t in th)
    if not finite:
        issues.append(Issue("finite", None, "angles must be finite"))
    R = ConformalData(tuple(th))
    z = R.z
    return ValidationReport(
        checks={"theta_1_zero": first, "strictly_increasing": strict, "below_pi": below_pi, "finite": finite},
        issues=issues,
        extra={
            "z": [[float(c.real), float(c.imag)] for c in z],
            "zeta": [[float(c.real), float(c.imag)] for c in z**2],
        },
    )


@dataclass(frozen=True)
class ToricInput:
    """Parsed JSON input: lattice data S and conformal angles."""

    S: tuple[Vec, ...]
    theta: tuple[float, ...]

    @property
    def k(self) -> int:
        return len(self.S)

    @property
    def R(self) -> ConformalData:
        return ConformalData(self.theta)

    @property
    def T(self) -> DerivedData:
        return derive_T(self.S)


def parse_input(doc: Any) -> ToricInput:
    """Parse {"lattice_data": [[a, b], ...], "conformal_angles": [...]}.

    Raises DataError naming the offending field.
    """
    if not isinstance(doc, dict):
        raise DataError("input: top level must be a JSON object")
    if "lattice_data" not in doc:
        raise DataError("lattice_data: missing")
    if "conformal_angles" not in doc:
        raise DataError("conformal_angles: missing")
    S = doc["lattice_data"]
    if not isinstance(S, list) or not all(isinstance(u, list) and len(u) == 2 for u in S):
        raise DataError("lattice_data: must be a list of [a, b] pairs")
    for i, u in enumerate(S):
        for c, a in enumerate(u):
            if isinstance(a, bool) or not isinstance(a, int):
                raise DataError(f"lattice_data[{i}][{c}]: must be an integer")
    th = doc["conformal_angles"]
    if not isinstance(th, list):
        raise DataError("conformal_angles: must be a list of numbers")
    for i, t in enumerate(th):
        if isinstance(t, bool) or not isinstance(t, (int, float)):
            raise DataError(f"conformal_angles[{i}]: must be a number")
    if len(th) != len(S):
        raise DataError(f"conformal_angles: expected {len(S)} angles, got {len(th)}")
    return ToricInput(tuple((int(a), int(b)) for a, b in S), tuple(float(t) for t in th))

"""The twistor line through the base point of P, the involution Psi, its descent psi,
the classification triple and the deformability count."""
from __future__ import annotations

import cmath
import itertools
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from ._lattice import rank
from .group_action import build_omega, integer_kernel
from .toric_data import ConformalData, DataError, DerivedData, derive_T, is_convex, recover_S, validate_R

INF = complex("inf")


def _conf(R: ConformalData | Sequence[float]) -> ConformalData:
    return R if isinstance(R, ConformalData) else ConformalData(tuple(float(t) for t in R))


@dataclass(frozen=True)
class TwistorLinePoint:
    z: complex
    coords: np.ndarray  # length 2k, interleaved (X_1, Y_1, ..., X_k, Y_k)

    def normalized(self) -> np.ndarray:
        c = self.coords
        i = int(np.argmax(np.abs(c)))
        return c / c[i]


def _is_inf(z: complex) -> bool:
    return cmath.isinf(z)


def line_coords(zs: np.ndarray, zpar: complex) -> np.ndarray:
    """Slot i: (x_i X - conj(y_i) Y, y_i X + conj(x_i) Y) with x_i = 1, y_i = z_i, [X:Y] = [1:z]."""
    if _is_inf(zpar):
        X, Y = 0.0, 1.0
    else:
        X, Y = 1.0, zpar
    out = np.empty(2 * zs.size, dtype=complex)
    out[0::2] = X - np.conj(zs) * Y
    out[1::2] = zs * X + Y
    return out


def line_point(R: ConformalData | Sequence[float], z: complex) -> TwistorLinePoint:
    R = _conf(R)
    return TwistorLinePoint(complex(z), line_coords(R.z, complex(z)))


def projective_residual(a: np.ndarray, b: np.ndarray) -> float:
    """Distance between the lines through a and b (unit-normalised, best phase)."""
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise ValueError("zero vector is not a projective point")
    a = a / na
    b = b / nb
    ip = np.vdot(b, a)
    phase = ip / abs(ip) if abs(ip) > 0 else 1.0
    return float(np.linalg.norm(a - phase * b))


def left_j(coords: np.ndarray) -> np.ndarray:
    """(X, Y) -> (-conj Y, conj X) slot-wise: left multiplication by j."""
    out = np.empty_like(coords)
    out[0::2] = -np.conj(coords[1::2])
    out[1::2] = np.conj(coords[0::2])
    return out


def antipodal(z: complex) -> complex:
    if z == 0:
        return INF
    if _is_inf(z):
        return 0j
    return -1.0 / np.conj(z)


def inversion(z: complex) -> complex:
    if z == 0:
        return INF
    if _is_inf(z):
        return 0j
    return 1.0 / np.conj(z)


def real_structure_check(R: ConformalData | Sequence[float], zs: Sequence[complex]) -> dict[str, float]:
    """Max projective residual between j.l(z) and l(s(z)) for both candidate maps s."""
    R = _conf(R)
    out = {}
    for name, s in (("antipodal", antipodal), ("inversion", inversion)):
        out[name] = max(projective_residual(left_j(line_coords(R.z, z)), line_coords(R.z, s(z))) for z in zs)
    return out


def _check_regular(zs: np.ndarray, z: complex, tol: float = 1e-14) -> None:
    if _is_inf(z):
        return
    if np.any(np.abs(z - zs) <= tol) or np.any(np.abs(z + zs) <= tol):
        raise DataError(f"z = {z} is a zero or pole (one of +-z_i)")


@dataclass(frozen=True)
class TorusCValue:
    """k nonzero complex numbers up to a global sign."""

    values: tuple[complex, ...]

    def __post_init__(self):
        if any(v == 0 for v in self.values):
            raise DataError("torus values must be nonzero")

    def canonical(self) -> tuple[complex, ...]:
        v = np.array(self.values)
        first = v[0]
        if first.real < 0 or (first.real == 0 and first.imag < 0):
            v = -v
        return tuple(v.tolist())

    def isclose(self, other: "TorusCValue", rtol: float = 1e-12) -> bool:
        a, b = np.array(self.values), np.array(other.values)
        scale = np.maximum(1.0, np.abs(a))
        return bool(np.all(np.abs(a - b) <= rtol * scale) or np.all(np.abs(a + b) <= rtol * scale))

    def act(self, coords: np.ndarray) -> np.ndarray:
        lam = np.array(self.values)
        out = coords.copy()
        out[0::2] *= lam
        out[1::2] /= lam
        return out


def Psi(R: ConformalData | Sequence[float], z: complex) -> TorusCValue:
    """((z + z_i) / (z - z_i))_i up to sign; Psi(inf) = (1, ..., 1)."""
    R = _conf(R)
    zs = R.z
    _check_regular(zs, z)
    if _is_inf(z):
        return TorusCValue(tuple(1.0 + 0j for _ in zs))
    return TorusCValue(tuple(((z + zs) / (z - zs)).tolist()))


def involution_residual(R: ConformalData | Sequence[float], z: complex) -> float:
    """Projective distance between Psi(z).l(z) and l(-z)."""
    R = _conf(R)
    moved = Psi(R, z).act(line_coords(R.z, z))
    target = line_coords(R.z, INF if _is_inf(z) else -z)
    return projective_residual(moved, target)


def psi(S: Sequence[Sequence[int]], R: ConformalData | Sequence[float], z: complex) -> tuple[complex, complex]:
    """prod_i ((z + z_i) / (z - z_i))^{v_i}, by integer powers."""
    R = _conf(R)
    T = derive_T(S)
    zs = R.z
    if len(T.T) != zs.size:
        raise DataError("S and R have different lengths")
    _check_regular(zs, z)
    if _is_inf(z):
        return (1.0 + 0j, 1.0 + 0j)
    base = (z + zs) / (z - zs)
    out = [1.0 + 0j, 1.0 + 0j]
    for b, v in zip(base.tolist(), T.T):
        for c in range(2):
            out[c] *= b ** v[c]
    return (out[0], out[1])


def pushforward(T: DerivedData, value: TorusCValue) -> tuple[complex, complex]:
    """Omega applied to a torus value through exp / log: exp(sum_i v_i log lambda_i)."""
    V = np.array(T.T, dtype=float)
    logs = np.log(np.array(value.values, dtype=complex))
    e = np.exp(V.T @ logs)
    return (complex(e[0]), complex(e[1]))


def psi_reality_residual(S: Sequence[Sequence[int]], R: ConformalData | Sequence[float], z: complex) -> float:
    """|psi(-1/conj z) * conj(psi(z)) - 1|, componentwise max."""
    a = psi(S, R, z)
    b = psi(S, R, antipodal(z))
    return float(max(abs(b[c] * np.conj(a[c]) - 1.0) for c in range(2)))


def random_line_params(R: ConformalData, n: int, rng: np.random.Generator, margin: float = 1e-3) -> list[complex]:
    """Random z (log-uniform modulus, uniform argument) at distance > margin from every +-z_i."""
    out: list[complex] = []
    zs = np.concatenate([R.z, -R.z])
    while len(out) < n:
        r = np.exp(rng.uniform(np.log(0.05), np.log(20.0)))
        z = r * np.exp(2j * np.pi * rng.uniform())
        if np.min(np.abs(z - zs)) > margin:
            out.append(complex(z))
    return out


def classification_report(
    S: Sequence[Sequence[int]], theta: Sequence[float], n: int = 200, seed: int = 0, tol: float = 1e-9
) -> dict[str, Any]:
    """Triple (v_i, z_i, zeta_i) with the checks on the affine coordinate of the line."""
    R = _conf(theta)
    T = derive_T(S)
    if len(T.T) != R.k:
        raise DataError("S and R have different lengths")
    rng = np.random.default_rng(seed)
    zs = random_line_params(R, n, rng)
    real = real_structure_check(R, zs)
    inv = max(involution_residual(R, z) for z in zs)
    push = 0.0
    refl = 0.0
    for z in zs:
        direct = np.array(psi(S, R, z))
        via = np.array(pushforward(T, Psi(R, z)))
        push = max(push, float(np.max(np.abs(direct - via) / np.maximum(1.0, np.abs(direct)))))
        refl = max(refl, psi_reality_residual(S, R, z))
    rv = validate_R(R.theta)
    recovered_S = [list(u) for u in recover_S(T)]
    recovered_theta = [float(np.angle(z)) for z in R.z]
    warnings = []
    convex = is_convex(S)
    if not convex:
        warnings.append("S is not convex")
    real_form = "antipodal" if real["antipodal"] <= tol else ("inversion" if real["inversion"] <= tol else "neither")
    checks = {
        "real_structure": real_form != "neither",
        "product_form": inv <= tol and push <= 1e-12,
        "angle_ordering": rv.ok,
    }
    return {
        "v": [list(v) for v in T.T],
        "z": [[float(z.real), float(z.imag)] for z in R.z],
        "zeta": [[float(w.real), float(w.imag)] for w in R.zeta],
        "real_structure": real_form,
        "real_structure_residuals": real,
        "involution_residual": inv,
        "pushforward_error": push,
        "psi_reality_residual": refl,
        "checks": checks,
        "round_trip": {"S": recovered_S, "theta": recovered_theta},
        "convex": convex,
        "warnings": warnings,
        "status": "PASS" if all(checks.values()) and convex else "FAIL",
    }


def candidate_weights(k: int) -> list[tuple[tuple[int, ...], str]]:
    """Weights of the quadratic fibre monomials x_a x_b, x_a y_b, y_a y_b (a <= b for the symmetric ones)."""
    out = []
    for a, b in itertools.combinations_with_replacement(range(k), 2):
        w = [0] * k
        w[a] += 1
        w[b] += 1
        out.append((tuple(w), f"x{a + 1}x{b + 1}"))
        out.append((tuple(-c for c in w), f"y{a + 1}y{b + 1}"))
    for a in range(k):
        for b in range(k):
            w = [0] * k
            w[a] += 1
            w[b] -= 1
            out.append((tuple(w), f"x{a + 1}y{b + 1}"))
    return out


def _canonical_sign(w: Sequence[int]) -> tuple[int, ...]:
    for c in w:
        if c:
            return tuple(w) if c > 0 else tuple(-x for x in w)
    return tuple(w)


def _summarise(k: int, weights: list[tuple[int, ...]]) -> dict[str, Any]:
    extra = sorted({_canonical_sign(w) for w in weights if any(w)}, reverse=True)
    return {"tk_invariant_dim": k, "extra_weights": [list(w) for w in extra], "extra_dim": 2 * len(extra)}


def deformability(T: DerivedData) -> dict[str, Any]:
    """G_S-invariant quadratic monomials beyond the torus-invariant ones.

    A monomial with weight w is G_S-invariant iff D w = 0.  Weights w and -w
    are exchanged by the real structure, so each pair contributes two real
    dimensions; weight 0 gives the k families x_a y_a behind nu_1..nu_k.
    """
    D = integer_kernel(build_omega(T)).as_array()
    hits = [w for w, _ in candidate_weights(T.k) if not np.any(D @ np.array(w))]
    zero = sum(1 for w in hits if not any(w))
    out = _summarise(T.k, hits)
    out["weight_zero_monomials"] = zero
    return out


def deformability_bruteforce(T: DerivedData) -> dict[str, Any]:
    """Same count via rank([Omega; w]) == rank(Omega), i.e. w in the row space of Omega."""
    om = [list(r) for r in build_omega(T).matrix]
    r0 = rank(om)
    hits = []
    for w, _ in candidate_weights(T.k):
        if rank(om + [list(w)]) == r0:
            hits.append(w)
    return _summarise(T.k, hits)

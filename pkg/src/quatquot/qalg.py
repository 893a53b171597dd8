"""Quaternions, the complex split q = x + y j, and the left actions on H^k / ±1."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class Quaternion:
    """w + a i + b j + c k."""

    w: float = 0.0
    a: float = 0.0
    b: float = 0.0
    c: float = 0.0

    def __mul__(self, other: "Quaternion") -> "Quaternion":
        if not isinstance(other, Quaternion):
            return NotImplemented
        return quat_mul(self, other)

    def __neg__(self) -> "Quaternion":
        return Quaternion(-self.w, -self.a, -self.b, -self.c)

    def __add__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(self.w + other.w, self.a + other.a, self.b + other.b, self.c + other.c)

    def __sub__(self, other: "Quaternion") -> "Quaternion":
        return self + (-other)

    def conj(self) -> "Quaternion":
        return Quaternion(self.w, -self.a, -self.b, -self.c)

    def norm(self) -> float:
        return float(np.sqrt(self.w**2 + self.a**2 + self.b**2 + self.c**2))

    def as_array(self) -> np.ndarray:
        return np.array([self.w, self.a, self.b, self.c])

    def split(self) -> tuple[complex, complex]:
        """Return (x, y) with self = x + y j."""
        return complex(self.w, self.a), complex(self.b, self.c)

    @classmethod
    def from_split(cls, x: complex, y: complex) -> "Quaternion":
        return cls(x.real, x.imag, y.real, y.imag)


ONE = Quaternion(1.0)
I = Quaternion(0.0, 1.0)
J = Quaternion(0.0, 0.0, 1.0)
K = Quaternion(0.0, 0.0, 0.0, 1.0)


def quat_mul(p: Quaternion, q: Quaternion) -> Quaternion:
    """Hamilton product."""
    return Quaternion(
        p.w * q.w - p.a * q.a - p.b * q.b - p.c * q.c,
        p.w * q.a + p.a * q.w + p.b * q.c - p.c * q.b,
        p.w * q.b - p.a * q.c + p.b * q.w + p.c * q.a,
        p.w * q.c + p.a * q.b - p.b * q.a + p.c * q.w,
    )


def left_mul_matrix(q: Quaternion) -> np.ndarray:
    """4x4 real matrix of r -> q r in the basis (1, i, j, k)."""
    w, a, b, c = q.w, q.a, q.b, q.c
    return np.array(
        [
            [w, -a, -b, -c],
            [a, w, -c, b],
            [b, c, w, -a],
            [c, -b, a, w],
        ]
    )


_UNITS = {1: I, 2: J, 3: K}


def complex_structure(axis: int, k: int) -> np.ndarray:
    """The 4k x 4k real matrix of I_axis (left multiplication by i, j or k)."""
    if axis not in _UNITS:
        raise ValueError(f"axis must be 1, 2 or 3, got {axis!r}")
    return np.kron(np.eye(k), left_mul_matrix(_UNITS[axis]))


class UPoint:
    """A point of H^k / {±(1, ..., 1)} stored as split coordinates.

    Two UPoints compare equal when their canonical representatives agree: the
    first nonzero entry of (x_1, y_1, x_2, y_2, ...) is rotated by ±1 so its
    argument lies in [0, pi).
    """

    __slots__ = ("x", "y")

    def __init__(self, x: Sequence[complex], y: Sequence[complex]):
        x = np.array(x, dtype=complex).reshape(-1)
        y = np.array(y, dtype=complex).reshape(-1)
        if x.shape != y.shape:
            raise ValueError("x and y must have the same length")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def __setattr__(self, name, value):
        raise AttributeError("UPoint is immutable")

    @property
    def k(self) -> int:
        return self.x.size

    @classmethod
    def from_quaternions(cls, qs: Sequence[Quaternion]) -> "UPoint":
        xs, ys = zip(*(q.split() for q in qs))
        return cls(xs, ys)

    @classmethod
    def from_real(cls, v: np.ndarray) -> "UPoint":
        v = np.asarray(v, dtype=float).reshape(-1, 4)
        return cls(v[:, 0] + 1j * v[:, 1], v[:, 2] + 1j * v[:, 3])

    @classmethod
    def zero(cls, k: int) -> "UPoint":
        return cls(np.zeros(k), np.zeros(k))

    def quaternions(self) -> list[Quaternion]:
        return [Quaternion.from_split(a, b) for a, b in zip(self.x, self.y)]

    def to_real(self) -> np.ndarray:
        """Real coordinates (Re x_1, Im x_1, Re y_1, Im y_1, ...)."""
        return np.stack([self.x.real, self.x.imag, self.y.real, self.y.imag], axis=1).reshape(-1)

    def norms_sq(self) -> np.ndarray:
        return np.abs(self.x) ** 2 + np.abs(self.y) ** 2

    def is_zero(self) -> bool:
        return not (np.any(self.x) or np.any(self.y))

    def __neg__(self) -> "UPoint":
        return UPoint(-self.x, -self.y)

    def canonical(self) -> "UPoint":
        entries = np.stack([self.x, self.y], axis=1).reshape(-1)
        nz = np.flatnonzero(entries)
        if nz.size == 0:
            return self
        e = entries[nz[0]]
        if e.imag < 0 or (e.imag == 0 and e.real < 0):
            return -self
        return self

    def isclose(self, other: "UPoint", atol: float = 1e-12) -> bool:
        if self.k != other.k:
            return False
        a, b = self.to_real(), other.to_real()
        return bool(min(np.max(np.abs(a - b)), np.max(np.abs(a + b))) <= atol)

    def __eq__(self, other):
        if not isinstance(other, UPoint):
            return NotImplemented
        a, b = self.canonical(), other.canonical()
        return a.k == b.k and np.array_equal(a.x, b.x) and np.array_equal(a.y, b.y)

    def __hash__(self):
        c = self.canonical()
        return hash((c.x.tobytes(), c.y.tobytes()))

    def __repr__(self):
        return f"UPoint(x={self.x.tolist()}, y={self.y.tolist()})"


def left_I(axis: int, p: UPoint) -> UPoint:
    """Left multiplication of every coordinate by i, j or k."""
    x, y = p.x, p.y
    if axis == 1:
        return UPoint(1j * x, 1j * y)
    if axis == 2:
        return UPoint(-np.conj(y), np.conj(x))
    if axis == 3:
        return UPoint(-1j * np.conj(y), 1j * np.conj(x))
    raise ValueError(f"axis must be 1, 2 or 3, got {axis!r}")


def fiber_act(c: Quaternion, p: UPoint) -> UPoint:
    """Left multiplication of all coordinates by c (the CO(3) = H*/±1 fibre action)."""
    if c.norm() == 0.0:
        raise ValueError("fiber_act needs a nonzero quaternion")
    return UPoint.from_quaternions([c * q for q in p.quaternions()])


def torus_act(lam: Sequence[complex], p: UPoint) -> UPoint:
    """Right action of the (complexified) torus: (x_m, y_m) -> (lam_m x_m, y_m / lam_m)."""
    lam = np.asarray(lam, dtype=complex)
    if lam.shape != p.x.shape:
        raise ValueError("torus element must have one entry per slot")
    if np.any(lam == 0):
        raise ValueError("torus element entries must be nonzero")
    return UPoint(lam * p.x, p.y / lam)


def torus_exp(d: Sequence[float], t: float = 1.0) -> np.ndarray:
    """exp(2 pi i t d) as a torus element."""
    return np.exp(2j * np.pi * t * np.asarray(d, dtype=float))

"""Quaternion arithmetic.

Two layers live here. ``Quaternion`` is a small immutable value type for
scalar work; the ``q*`` functions operate on float arrays whose last axis
holds the components ``(w, x, y, z)`` and are what the grid and spinor code
use. Products follow the Hamilton convention ``ij = k, jk = i, ki = j``.

``as_matrix4`` gives the left-regular 4x4 real representation. It is built
from the basis table rather than from ``qmul`` so it can serve as an
independent check on the product.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

EPS_ALG = 1e-12
EPS_UNIT = 1e-9


def qmul(a, b):
    """Hamilton product of quaternion arrays, broadcasting over leading axes."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    aw, ax, ay, az = np.moveaxis(a, -1, 0)
    bw, bx, by, bz = np.moveaxis(b, -1, 0)
    return np.stack(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ],
        axis=-1,
    )


def qconj(q):
    return np.asarray(q, dtype=float) * np.array([1.0, -1.0, -1.0, -1.0])


def qnorm2(q):
    q = np.asarray(q, dtype=float)
    return np.sum(q * q, axis=-1)


def qnorm(q):
    return np.sqrt(qnorm2(q))


def qreal_dot(a, b):
    """Re[conj(a) b], which equals the Euclidean dot product of the components."""
    return np.sum(np.asarray(a, dtype=float) * np.asarray(b, dtype=float), axis=-1)


def complex_to_quat(z):
    """Embed complex numbers as quaternions in the 1, i plane."""
    z = np.asarray(z, dtype=complex)
    out = np.zeros(z.shape + (4,))
    out[..., 0] = z.real
    out[..., 1] = z.imag
    return out


def cj_to_quat(z1, z2):
    """Build ``z1 + z2 j`` from two complex arrays."""
    z1 = np.asarray(z1, dtype=complex)
    z2 = np.asarray(z2, dtype=complex)
    z1, z2 = np.broadcast_arrays(z1, z2)
    # (a + bi) j = a j + b k
    return np.stack([z1.real, z1.imag, z2.real, z2.imag], axis=-1)


# Structure constants of the left-regular representation, filled from the
# multiplication table of basis elements e_0..e_3 = 1, i, j, k:
# e_r e_s = sign[r, s] * e_{index[r, s]}.
_INDEX = np.array(
    [
        [0, 1, 2, 3],
        [1, 0, 3, 2],
        [2, 3, 0, 1],
        [3, 2, 1, 0],
    ]
)
_SIGN = np.array(
    [
        [1, 1, 1, 1],
        [1, -1, 1, -1],
        [1, -1, -1, 1],
        [1, 1, -1, -1],
    ],
    dtype=float,
)


def as_matrix4(q):
    """Left-regular representation: ``as_matrix4(a) @ b == a*b`` as 4-vectors.

    Accepts a ``Quaternion`` or an array with trailing axis 4 and returns an
    array of shape ``(..., 4, 4)``.
    """
    if isinstance(q, Quaternion):
        q = q.as_array()
    q = np.asarray(q, dtype=float)
    out = np.zeros(q.shape[:-1] + (4, 4))
    for r in range(4):
        for s in range(4):
            out[..., _INDEX[r, s], s] += _SIGN[r, s] * q[..., r]
    return out


def as_right_matrix4(q):
    """Right-regular representation: ``as_right_matrix4(a) @ b == b*a``."""
    if isinstance(q, Quaternion):
        q = q.as_array()
    q = np.asarray(q, dtype=float)
    out = np.zeros(q.shape[:-1] + (4, 4))
    for r in range(4):
        for s in range(4):
            out[..., _INDEX[r, s], r] += _SIGN[r, s] * q[..., s]
    return out


@dataclass(frozen=True)
class Quaternion:
    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    @classmethod
    def from_array(cls, arr) -> Quaternion:
        w, x, y, z = (float(v) for v in np.asarray(arr, dtype=float).reshape(4))
        return cls(w, x, y, z)

    @classmethod
    def from_complex(cls, z: complex) -> Quaternion:
        return cls(z.real, z.imag, 0.0, 0.0)

    def as_array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z])

    @property
    def scalar(self) -> float:
        return self.w

    @property
    def vector(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)

    def conj(self) -> Quaternion:
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def norm2(self) -> float:
        return self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z

    def norm(self) -> float:
        return math.sqrt(self.norm2())

    def inverse(self) -> Quaternion:
        n2 = self.norm2()
        if n2 == 0.0:
            raise ZeroDivisionError("zero quaternion has no inverse")
        c = self.conj()
        return Quaternion(c.w / n2, c.x / n2, c.y / n2, c.z / n2)

    def isclose(self, other: Quaternion, tol: float = EPS_ALG) -> bool:
        return all(abs(p - q) <= tol for p, q in zip(self, other))

    def __iter__(self):
        yield from (self.w, self.x, self.y, self.z)

    def __add__(self, other):
        if isinstance(other, Quaternion):
            return Quaternion(self.w + other.w, self.x + other.x, self.y + other.y, self.z + other.z)
        if isinstance(other, (int, float)):
            return Quaternion(self.w + other, self.x, self.y, self.z)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def __sub__(self, other):
        if isinstance(other, (Quaternion, int, float)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            return mul(self, other)
        if isinstance(other, (int, float)):
            return Quaternion(self.w * other, self.x * other, self.y * other, self.z * other)
        return NotImplemented

    def __rmul__(self, other):
        # reached only for real scalars, which commute
        if isinstance(other, (int, float)):
            return self * other
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, float)):
            return self * (1.0 / other)
        return NotImplemented

    def __repr__(self):
        return f"Quaternion({self.w!r}, {self.x!r}, {self.y!r}, {self.z!r})"


ONE = Quaternion(1.0, 0.0, 0.0, 0.0)
I = Quaternion(0.0, 1.0, 0.0, 0.0)
J = Quaternion(0.0, 0.0, 1.0, 0.0)
K = Quaternion(0.0, 0.0, 0.0, 1.0)


def mul(a: Quaternion, b: Quaternion) -> Quaternion:
    return Quaternion(
        a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
        a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
        a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
        a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
    )


def conj(q: Quaternion) -> Quaternion:
    return q.conj()


@dataclass(frozen=True)
class ImaginaryUnit:
    """A pure unit quaternion, so that ``u*u == -1``."""

    direction: Quaternion

    def __post_init__(self):
        d = self.direction
        if abs(d.w) > EPS_UNIT or abs(d.norm() - 1.0) > EPS_UNIT:
            raise ValueError(f"not a pure unit quaternion: {d!r}")

    @classmethod
    def from_vector(cls, x: float, y: float, z: float) -> ImaginaryUnit:
        n = math.sqrt(x * x + y * y + z * z)
        return cls(Quaternion(0.0, x / n, y / n, z / n))

    @classmethod
    def jphase(cls, delta: float) -> ImaginaryUnit:
        """``exp(i delta) j``, which also equals ``j exp(-i delta)``."""
        return cls(Quaternion(0.0, 0.0, math.cos(delta), math.sin(delta)))

    def as_array(self) -> np.ndarray:
        return self.direction.as_array()

    def square(self) -> Quaternion:
        return self.direction * self.direction


UNIT_I = ImaginaryUnit(I)
UNIT_J = ImaginaryUnit(J)
UNIT_K = ImaginaryUnit(K)


def exp_pure(u: ImaginaryUnit, angle: float) -> Quaternion:
    """cos(angle) + sin(angle) u."""
    c, s = math.cos(angle), math.sin(angle)
    d = u.direction
    return Quaternion(c, s * d.x, s * d.y, s * d.z)

"""Two-component quaternionic spinors over a real Hilbert space.

The inner product is ``Re[a^dagger b]``. Operators are real-linear but not
quaternion-linear: a barred operator ``(A|eta)`` acts as ``psi -> (A psi) eta``
and right multiplication by ``eta`` does not commute with right multiplication
by a general quaternion.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DimensionError, EtaMismatchError, NormError
from .quat import (
    EPS_UNIT,
    ONE,
    ImaginaryUnit,
    Quaternion,
    as_matrix4,
    as_right_matrix4,
    qconj,
    qmul,
    qnorm2,
)


@dataclass(frozen=True)
class QSpinor:
    up: Quaternion
    down: Quaternion

    @classmethod
    def from_array(cls, arr) -> QSpinor:
        arr = np.asarray(arr, dtype=float)
        if arr.shape not in {(2, 4), (8,)}:
            raise DimensionError(f"spinor array must have shape (2, 4) or (8,), got {arr.shape}")
        arr = arr.reshape(2, 4)
        return cls(Quaternion.from_array(arr[0]), Quaternion.from_array(arr[1]))

    def as_array(self) -> np.ndarray:
        return np.stack([self.up.as_array(), self.down.as_array()])

    def as_real_vector(self) -> np.ndarray:
        return self.as_array().reshape(8)

    def norm2(self) -> float:
        return self.up.norm2() + self.down.norm2()

    def right_mul(self, q: Quaternion) -> QSpinor:
        return QSpinor(self.up * q, self.down * q)

    def __add__(self, other):
        if not isinstance(other, QSpinor):
            return NotImplemented
        return QSpinor(self.up + other.up, self.down + other.down)

    def __sub__(self, other):
        if not isinstance(other, QSpinor):
            return NotImplemented
        return QSpinor(self.up - other.up, self.down - other.down)

    def __mul__(self, other):
        # real scalars only; quaternion scalars must pick a side via right_mul
        if isinstance(other, (int, float)):
            return QSpinor(self.up * other, self.down * other)
        return NotImplemented

    __rmul__ = __mul__

    def isclose(self, other: QSpinor, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.as_array() - other.as_array())) <= tol)


def real_basis() -> list[QSpinor]:
    """The 8 real basis spinors (unit quaternion basis element in one slot)."""
    return [QSpinor.from_array(row) for row in np.eye(8)]


def _as_spinor_array(psi) -> np.ndarray:
    if isinstance(psi, QSpinor):
        return psi.as_array()
    arr = np.asarray(psi, dtype=float)
    if arr.shape == (8,):
        arr = arr.reshape(2, 4)
    if arr.shape != (2, 4):
        raise DimensionError(f"expected a 2-component quaternion spinor, got shape {arr.shape}")
    return arr


class QMatrix:
    """A 2x2 matrix of quaternions acting on spinors from the left."""

    __slots__ = ("_data",)

    def __init__(self, entries):
        if isinstance(entries, QMatrix):
            data = entries.data
        else:
            rows = [[e.as_array() if isinstance(e, Quaternion) else _entry(e) for e in row] for row in entries]
            data = np.asarray(rows, dtype=float)
        if data.shape != (2, 2, 4):
            raise DimensionError(f"QMatrix needs 2x2 quaternion entries, got array shape {data.shape}")
        data = data.copy()
        data.flags.writeable = False
        self._data = data

    @property
    def data(self) -> np.ndarray:
        return self._data

    @classmethod
    def from_real(cls, m) -> QMatrix:
        m = np.asarray(m, dtype=float)
        data = np.zeros((2, 2, 4))
        data[..., 0] = m
        return cls(data)

    @classmethod
    def from_complex(cls, m) -> QMatrix:
        m = np.asarray(m, dtype=complex)
        data = np.zeros((2, 2, 4))
        data[..., 0] = m.real
        data[..., 1] = m.imag
        return cls(data)

    @classmethod
    def identity(cls) -> QMatrix:
        return cls.from_real(np.eye(2))

    def entry(self, r: int, c: int) -> Quaternion:
        return Quaternion.from_array(self._data[r, c])

    def __matmul__(self, other):
        if isinstance(other, QMatrix):
            out = np.zeros((2, 2, 4))
            for r in range(2):
                for c in range(2):
                    out[r, c] = qmul(self._data[r, 0], other.data[0, c]) + qmul(self._data[r, 1], other.data[1, c])
            return QMatrix(out)
        if isinstance(other, QSpinor):
            return QSpinor.from_array(self.apply_array(other.as_array()))
        return NotImplemented

    def apply_array(self, psi: np.ndarray) -> np.ndarray:
        """Left action on spinor arrays of shape (..., 2, 4)."""
        psi = np.asarray(psi, dtype=float)
        if psi.shape[-2:] != (2, 4):
            raise DimensionError(f"expected trailing shape (2, 4), got {psi.shape}")
        d = self._data
        up = qmul(d[0, 0], psi[..., 0, :]) + qmul(d[0, 1], psi[..., 1, :])
        down = qmul(d[1, 0], psi[..., 0, :]) + qmul(d[1, 1], psi[..., 1, :])
        return np.stack([up, down], axis=-2)

    def __add__(self, other):
        if not isinstance(other, QMatrix):
            return NotImplemented
        return QMatrix(self._data + other.data)

    def __sub__(self, other):
        if not isinstance(other, QMatrix):
            return NotImplemented
        return QMatrix(self._data - other.data)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return QMatrix(self._data * other)
        return NotImplemented

    __rmul__ = __mul__

    def dagger(self) -> QMatrix:
        return QMatrix(qconj(np.transpose(self._data, (1, 0, 2))))

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self._data - self.dagger().data)) <= tol)

    def real_matrix(self) -> np.ndarray:
        """8x8 real matrix of the left action on ``QSpinor.as_real_vector``."""
        out = np.zeros((8, 8))
        for r in range(2):
            for c in range(2):
                out[4 * r : 4 * r + 4, 4 * c : 4 * c + 4] = as_matrix4(self._data[r, c])
        return out

    def __eq__(self, other):
        if not isinstance(other, QMatrix):
            return NotImplemented
        return bool(np.array_equal(self._data, other.data))

    def __hash__(self):
        return hash(self._data.tobytes())

    def __repr__(self):
        return f"QMatrix({self._data.tolist()!r})"


def _entry(e) -> np.ndarray:
    if isinstance(e, complex):
        return np.array([e.real, e.imag, 0.0, 0.0])
    if np.ndim(e) == 0:
        return np.array([float(e), 0.0, 0.0, 0.0])
    return np.asarray(e, dtype=float)


@dataclass(frozen=True)
class BarredOp:
    """``(left | eta)``: apply ``left`` then multiply each component by ``eta`` on the right.

    ``eta=None`` gives a plain left-acting operator, which is how real
    matrices such as sigma_1 and sigma_3 enter the spin algebra.
    """

    left: QMatrix
    eta: ImaginaryUnit | None = None

    def apply_array(self, psi: np.ndarray) -> np.ndarray:
        out = self.left.apply_array(psi)
        if self.eta is not None:
            out = qmul(out, self.eta.as_array())
        return out

    def __call__(self, psi: QSpinor) -> QSpinor:
        return apply_barred(self, psi)

    def real_matrix(self) -> np.ndarray:
        m = self.left.real_matrix()
        if self.eta is not None:
            r = as_right_matrix4(self.eta.as_array())
            m = np.kron(np.eye(2), r) @ m
        return m

    def scaled(self, c: float) -> BarredOp:
        return BarredOp(self.left * c, self.eta)


def apply_barred(op: BarredOp, psi) -> QSpinor:
    """Return ``(op.left psi) op.eta``.

    Only real-linear: ``op(psi q) != op(psi) q`` for a general quaternion q.
    """
    arr = _as_spinor_array(psi)
    return QSpinor.from_array(op.apply_array(arr))


def real_inner(a: QSpinor, b: QSpinor) -> float:
    """Re[a^dagger b]."""
    return float(np.sum(_as_spinor_array(a) * _as_spinor_array(b)))


NORM_POLICIES = ("fail", "warn")


def expectation(op, psi, *, policy: str = "fail", tol: float = EPS_UNIT) -> float:
    """Re[psi^dagger (op psi)] for a normalized spinor.

    ``op`` may be a ``QMatrix``, a ``BarredOp`` or any callable mapping spinor
    arrays to spinor arrays. With ``policy="warn"`` an unnormalized state is
    renormalized and a warning is issued instead of raising ``NormError``.
    """
    if policy not in NORM_POLICIES:
        raise ValueError(f"unknown norm policy {policy!r}")
    arr = _as_spinor_array(psi)
    n2 = float(np.sum(qnorm2(arr)))
    if abs(n2 - 1.0) > tol:
        if policy == "fail":
            raise NormError(f"state is not normalized: norm^2 = {n2!r}")
        warnings.warn(f"renormalizing state with norm^2 = {n2!r}", stacklevel=2)
        arr = arr / np.sqrt(n2)
    if isinstance(op, (QMatrix, BarredOp)):
        image = op.apply_array(arr)
    else:
        image = _as_spinor_array(op(QSpinor.from_array(arr)))
    return float(np.sum(arr * image))


def _same_eta(a: ImaginaryUnit | None, b: ImaginaryUnit | None, tol: float = 1e-12) -> bool:
    return np.max(np.abs(a.as_array() - b.as_array())) <= tol


def barred_commutator(a: BarredOp, b: BarredOp) -> Callable[[QSpinor], QSpinor]:
    """The map ``psi -> a(b(psi)) - b(a(psi))``.

    Both operators must use the same imaginary unit. Plain (unbarred)
    operators combine with either.
    """
    if a.eta is not None and b.eta is not None and not _same_eta(a.eta, b.eta):
        raise EtaMismatchError("commutator of barred operators with different imaginary units")

    def commutator(psi):
        arr = _as_spinor_array(psi)
        return QSpinor.from_array(a.apply_array(b.apply_array(arr)) - b.apply_array(a.apply_array(arr)))

    return commutator


IDENTITY = QMatrix.identity()
SIGMA1 = QMatrix.from_real([[0.0, 1.0], [1.0, 0.0]])
SIGMA2 = QMatrix.from_complex([[0.0, -1j], [1j, 0.0]])
SIGMA3 = QMatrix.from_real([[1.0, 0.0], [0.0, -1.0]])
# real part of sigma_2 once the factor i is moved to the right: sigma_2 = (J2 | i)
J2 = QMatrix.from_real([[0.0, -1.0], [1.0, 0.0]])


def identity_op(eta: ImaginaryUnit | None = None) -> BarredOp:
    return BarredOp(IDENTITY, eta)


def spinor(up, down) -> QSpinor:
    """Convenience constructor accepting Quaternions, reals or complex numbers."""

    def conv(v):
        if isinstance(v, Quaternion):
            return v
        if isinstance(v, complex):
            return Quaternion.from_complex(v)
        return Quaternion(float(v))

    return QSpinor(conv(up), conv(down))


SPIN_UP = QSpinor(ONE, Quaternion())
SPIN_DOWN = QSpinor(Quaternion(), ONE)

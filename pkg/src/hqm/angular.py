"""Orbital angular momentum as barred operators.

``L3 = -hbar (d/dphi | eta)`` acts on azimuthal grids with central
differences. ``L^2`` carries no imaginary unit and acts componentwise.
The Cartesian components ``L_a = eps_abc x_b p_c`` with ``p_c = (-hbar d_c | eta)``
are discretized on a uniform 3D box for the commutator checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import BoundaryError, DomainError, SupportError
from .quat import ImaginaryUnit, qmul, qnorm
from .waves import GridFunction1D, LambdaSpec, SphereGrid, eval_lambda, gauss_legendre, periodic_diff

__all__ = [
    "AngularMomentumOp",
    "CartesianGrid",
    "SphereGrid",
    "gaussian_lambda",
    "l2_apply",
    "l3_apply",
    "orbital_commutator_check",
    "orbital_commutator_study",
]


def l3_apply(eta: ImaginaryUnit, f, hbar: float = 1.0):
    """-hbar (df/dphi) eta, second-order central differences in phi."""
    e = eta.as_array()
    if isinstance(f, GridFunction1D):
        if not f.periodic:
            raise BoundaryError("L3 needs a periodic azimuthal grid")
        return f.with_samples(-hbar * qmul(periodic_diff(f.samples, f.h, 1, axis=0), e))
    if isinstance(f, SphereGrid):
        if f.values is None:
            raise ValueError("sphere grid has no values")
        return f.with_values(-hbar * qmul(periodic_diff(f.values, f.h_phi, 1, axis=1), e))
    raise TypeError(f"cannot apply L3 to {type(f).__name__}")


@lru_cache(maxsize=None)
def _gl_diff_matrix(n: int) -> np.ndarray:
    """Polynomial differentiation matrix on the n Gauss-Legendre nodes (barycentric form)."""
    x = gauss_legendre(n)[0]
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    # barycentric weights 1/prod(x_j - x_k), in logs to dodge underflow
    log_w = -np.sum(np.log(np.abs(diff)), axis=1)
    sign_w = np.prod(np.sign(diff), axis=1)
    log_w -= log_w.max()
    w = sign_w * np.exp(log_w)
    d = (w[None, :] / w[:, None]) / diff
    np.fill_diagonal(d, 0.0)
    np.fill_diagonal(d, -d.sum(axis=1))
    d.flags.writeable = False
    return d


def l2_apply(f: SphereGrid, hbar: float = 1.0, *, mode_cutoff: float = 1e-13) -> SphereGrid:
    """-hbar^2 [ (1/sin) d_theta (sin d_theta) + (1/sin^2) d_phi^2 ] applied componentwise.

    The phi dependence is split into Fourier modes. For mode k the theta
    factor is written (1 - u^2)^{|k|/2} g(u) with g a polynomial in u = cos(theta),
    and the operator becomes
        (1 - u^2)^{|k|/2} [ (1 - u^2) g'' - 2(|k|+1) u g' - |k|(|k|+1) g ],
    which the Gauss-Legendre differentiation matrix applies exactly for
    polynomials of degree below ``n_theta``. Modes whose amplitude is below
    ``mode_cutoff`` times the largest one are treated as roundoff and dropped.
    """
    if f.values is None:
        raise ValueError("sphere grid has no values")
    u = f.u
    d = _gl_diff_matrix(f.n_theta)
    one_minus = 1.0 - u * u
    coeffs = np.fft.fft(f.values, axis=1)
    ks = np.rint(np.fft.fftfreq(f.n_phi, d=1.0 / f.n_phi)).astype(int)
    scale = np.abs(coeffs).max()
    out = np.zeros_like(coeffs)
    for idx, k in enumerate(ks):
        c = coeffs[:, idx, :]
        if scale == 0.0 or np.abs(c).max() <= mode_cutoff * scale:
            continue
        ka = abs(int(k))
        if ka >= f.n_theta:
            raise DomainError(f"azimuthal mode {k} is not resolved by {f.n_theta} theta nodes")
        w = one_minus ** (ka / 2)
        g = c / w[:, None]
        g1 = d @ g
        g2 = d @ g1
        op = one_minus[:, None] * g2 - 2 * (ka + 1) * u[:, None] * g1 - ka * (ka + 1) * g
        out[:, idx, :] = -(hbar**2) * w[:, None] * op
    return f.with_values(np.fft.ifft(out, axis=1).real)


# -- Cartesian components ------------------------------------------------------

_LEVI = np.zeros((3, 3, 3))
for _a, _b, _c in [(0, 1, 2), (1, 2, 0), (2, 0, 1)]:
    _LEVI[_a, _b, _c] = 1.0
    _LEVI[_a, _c, _b] = -1.0


@dataclass(frozen=True)
class CartesianGrid:
    """Uniform n^3 grid on [-half_width, half_width]^3 (endpoints included)."""

    n: int = 32
    half_width: float = 5.0

    @property
    def axis(self) -> np.ndarray:
        return np.linspace(-self.half_width, self.half_width, self.n)

    @property
    def h(self) -> float:
        return 2 * self.half_width / (self.n - 1)

    def coords(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return tuple(np.meshgrid(self.axis, self.axis, self.axis, indexing="ij"))


def _central_diff_zero(values: np.ndarray, h: float, axis: int) -> np.ndarray:
    """Central difference treating values outside the box as zero."""
    pad = [(0, 0)] * values.ndim
    pad[axis] = (1, 1)
    p = np.pad(values, pad)
    n = values.shape[axis]
    fwd = np.take(p, range(2, n + 2), axis=axis)
    bwd = np.take(p, range(0, n), axis=axis)
    return (fwd - bwd) / (2 * h)


@dataclass(frozen=True)
class AngularMomentumOp:
    """L_a = eps_abc x_b p_c with p_c = (-hbar d_c | eta); ``axis`` is 1, 2 or 3."""

    axis: int
    eta: ImaginaryUnit
    hbar: float = 1.0

    def __post_init__(self):
        if self.axis not in (1, 2, 3):
            raise DomainError(f"axis must be 1, 2 or 3, got {self.axis}")

    def apply(self, values: np.ndarray, grid: CartesianGrid) -> np.ndarray:
        x = grid.coords()
        e = self.eta.as_array()
        a = self.axis - 1
        out = np.zeros_like(values)
        for b in range(3):
            for c in range(3):
                eps = _LEVI[a, b, c]
                if eps == 0.0:
                    continue
                p_c = -self.hbar * qmul(_central_diff_zero(values, grid.h, c), e)
                out += eps * x[b][..., None] * p_c
        return out


def gaussian_lambda(
    spec: LambdaSpec,
    width: float = 1.0,
    center=(0.0, 0.0, 0.0),
    direction=(1.0, 0.5, -0.3),
) -> Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]:
    """Gaussian envelope times a plane wave Lambda(direction . r)."""
    cx, cy, cz = center
    kx, ky, kz = direction

    def f(x, y, z):
        r2 = (x - cx) ** 2 + (y - cy) ** 2 + (z - cz) ** 2
        env = np.exp(-r2 / (2 * width**2))
        return env[..., None] * eval_lambda(spec, kx * x + ky * y + kz * z)

    return f


def _check_support(values: np.ndarray, tol: float) -> None:
    mag = qnorm(values)
    faces = [mag[0], mag[-1], mag[:, 0], mag[:, -1], mag[:, :, 0], mag[:, :, -1]]
    edge = max(float(face.max()) for face in faces)
    if edge > tol * float(mag.max()):
        raise SupportError(f"test function is not negligible on the boundary ({edge:.3e})")


def orbital_commutator_check(
    a: int,
    b: int,
    eta: ImaginaryUnit,
    test_functions: Sequence[Callable] | None = None,
    grid: CartesianGrid | None = None,
    hbar: float = 1.0,
    support_tol: float = 1e-4,
    margin: int = 2,
) -> float:
    """max over test functions of |[L_a, L_b] f - hbar eps_abc (L_c f) eta|.

    The residual is taken over grid points at least ``margin`` cells from the
    boundary, where the composed stencil does not reach outside the box.
    """
    grid = grid or CartesianGrid()
    if test_functions is None:
        test_functions = [gaussian_lambda(LambdaSpec("l1", 1.0, 0.4))]
    if a == b:
        return 0.0
    la = AngularMomentumOp(a, eta, hbar)
    lb = AngularMomentumOp(b, eta, hbar)
    c = 6 - a - b
    eps = _LEVI[a - 1, b - 1, c - 1]
    lc = AngularMomentumOp(c, eta, hbar)
    e = eta.as_array()
    x, y, z = grid.coords()
    inner = (slice(margin, -margin),) * 3
    worst = 0.0
    for func in test_functions:
        f = func(x, y, z)
        _check_support(f, support_tol)
        comm = la.apply(lb.apply(f, grid), grid) - lb.apply(la.apply(f, grid), grid)
        rhs = hbar * eps * qmul(lc.apply(f, grid), e)
        worst = max(worst, float(qnorm(comm - rhs)[inner].max()))
    return worst


def orbital_commutator_study(
    a: int,
    b: int,
    eta: ImaginaryUnit,
    test_functions: Sequence[Callable] | None = None,
    sizes: Sequence[int] = (32, 64),
    half_width: float = 5.0,
    hbar: float = 1.0,
) -> tuple[list[float], list[float], float]:
    """Residuals on successively finer grids and the observed order from the last two."""
    hs, res = [], []
    for n in sizes:
        g = CartesianGrid(n, half_width)
        hs.append(g.h)
        res.append(orbital_commutator_check(a, b, eta, test_functions, g, hbar))
    order = math.log(res[-2] / res[-1]) / math.log(hs[-2] / hs[-1]) if res[-1] > 0 else float("nan")
    return hs, res, order

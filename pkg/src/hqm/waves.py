"""Unit-quaternion plane waves, periodic grids and quaternionic spherical harmonics.

Quaternion-valued samples are float arrays with a trailing axis of length 4
(see ``hqm.quat``). The three plane-wave classes are

    l1:  cos(t0) e^{imx} + sin(t0) e^{imx} j        (left derivative eigenvalue)
    l2:  cos(t0) e^{imx} + sin(t0) e^{-imx} j       (right derivative eigenvalue)
    l3:  cos(mx) e^{i g0} + sin(mx) e^{i w0} j      (eigenvalue on either side)
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import BoundaryError, DomainError, ResolutionError
from .quat import ImaginaryUnit, Quaternion, UNIT_I, cj_to_quat, qmul, qnorm, qreal_dot

VARIANTS = ("l1", "l2", "l3")


def _check_variant(variant: str) -> str:
    v = variant.lower().replace("λ", "l").replace("lambda", "l")
    if v not in VARIANTS:
        raise DomainError(f"unknown lambda variant {variant!r}; expected one of {VARIANTS}")
    return v


@dataclass(frozen=True)
class LambdaSpec:
    variant: str
    m: float
    theta0: float = 0.0
    gamma0: float = 0.0
    omega0: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "variant", _check_variant(self.variant))


def eval_lambda(spec: LambdaSpec, x) -> np.ndarray:
    """Evaluate the plane wave at ``x`` (scalar or array); returns shape ``x.shape + (4,)``."""
    x = np.asarray(x, dtype=float)
    m = spec.m
    if spec.variant == "l1":
        phase = np.exp(1j * m * x)
        return cj_to_quat(math.cos(spec.theta0) * phase, math.sin(spec.theta0) * phase)
    if spec.variant == "l2":
        return cj_to_quat(math.cos(spec.theta0) * np.exp(1j * m * x), math.sin(spec.theta0) * np.exp(-1j * m * x))
    return cj_to_quat(np.cos(m * x) * np.exp(1j * spec.gamma0), np.sin(m * x) * np.exp(1j * spec.omega0))


@dataclass(frozen=True)
class EigenStructure:
    side: str  # "left", "right" or "both"
    left_value: Quaternion | None
    right_value: Quaternion | None


def lambda_derivative_eigenvalue(spec: LambdaSpec) -> EigenStructure:
    """Analytic constant mu with d/dx Lambda = mu Lambda and/or Lambda mu."""
    m = float(spec.m)
    if spec.variant == "l1":
        return EigenStructure("left", Quaternion(0.0, m), None)
    if spec.variant == "l2":
        return EigenStructure("right", None, Quaternion(0.0, m))
    s = spec.gamma0 + spec.omega0
    d = spec.gamma0 - spec.omega0
    # m e^{is} j = m (cos s j + sin s k);  m j e^{id} = m e^{-id} j
    left = Quaternion(0.0, 0.0, m * math.cos(s), m * math.sin(s))
    right = Quaternion(0.0, 0.0, m * math.cos(d), -m * math.sin(d))
    return EigenStructure("both", left, right)


def azimuthal_unit(spec: LambdaSpec) -> ImaginaryUnit:
    """Imaginary unit for which the wave is a right eigenfunction of d/dx.

    ``i`` for l1/l2 (l1 only in its complex limit), ``j e^{i(g0 - w0)}`` for l3.
    """
    if spec.variant == "l3":
        return ImaginaryUnit.jphase(spec.omega0 - spec.gamma0)
    return UNIT_I


@dataclass(frozen=True)
class GridFunction1D:
    """Quaternion samples on a uniform grid over ``[0, domain_length)``."""

    samples: np.ndarray
    domain_length: float
    periodic: bool = True

    def __post_init__(self):
        s = np.array(self.samples, dtype=float)
        if s.ndim != 2 or s.shape[1] != 4:
            raise ValueError(f"samples must have shape (n, 4), got {s.shape}")
        s.flags.writeable = False
        object.__setattr__(self, "samples", s)

    @property
    def n(self) -> int:
        return self.samples.shape[0]

    @property
    def h(self) -> float:
        return self.domain_length / self.n

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.n) * self.h

    @classmethod
    def sample(cls, func: Callable[[np.ndarray], np.ndarray], n: int, domain_length: float) -> GridFunction1D:
        x = np.arange(n) * (domain_length / n)
        return cls(func(x), domain_length)

    def with_samples(self, samples) -> GridFunction1D:
        return GridFunction1D(samples, self.domain_length, self.periodic)

    def to_csv(self, stream=None) -> str:
        """Write columns x, w, x_i, y_j, z_k with LF line endings; returns the text."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["x", "w", "x_i", "y_j", "z_k"])
        for xv, q in zip(self.x, self.samples):
            writer.writerow([repr(float(xv))] + [repr(float(c)) for c in q])
        text = buf.getvalue()
        if stream is not None:
            stream.write(text)
        return text

    @classmethod
    def from_csv(cls, text: str, domain_length: float) -> GridFunction1D:
        rows = list(csv.reader(io.StringIO(text)))
        if rows[0] != ["x", "w", "x_i", "y_j", "z_k"]:
            raise ValueError(f"unexpected header {rows[0]!r}")
        data = np.array([[float(v) for v in r[1:]] for r in rows[1:]])
        return cls(data, domain_length)


def sample_lambda(spec: LambdaSpec, n: int = 256, domain_length: float = 2 * math.pi) -> GridFunction1D:
    periods = spec.m * domain_length / (2 * math.pi)
    if abs(periods - round(periods)) > 1e-9:
        raise BoundaryError(f"m={spec.m} is not periodic on a domain of length {domain_length}")
    return GridFunction1D.sample(lambda x: eval_lambda(spec, x), n, domain_length)


def fd_derivative(f: GridFunction1D, order: int = 1) -> GridFunction1D:
    """Second-order central difference with periodic wraparound."""
    if not f.periodic:
        raise BoundaryError("only periodic grids are supported")
    if f.n < 8:
        raise ResolutionError(f"need at least 8 samples, got {f.n}")
    return f.with_samples(periodic_diff(f.samples, f.h, order, axis=0))


def periodic_diff(values: np.ndarray, h: float, order: int = 1, axis: int = 0) -> np.ndarray:
    fwd = np.roll(values, -1, axis=axis)
    bwd = np.roll(values, 1, axis=axis)
    if order == 1:
        return (fwd - bwd) / (2 * h)
    if order == 2:
        return (fwd - 2 * values + bwd) / (h * h)
    raise ValueError(f"order must be 1 or 2, got {order}")


def eigen_residuals(spec: LambdaSpec, n: int = 256, domain_length: float = 2 * math.pi) -> dict[str, float]:
    """Max-norm residuals of the first- and second-derivative eigen-relations on an n-point grid."""
    f = sample_lambda(spec, n, domain_length)
    d1 = fd_derivative(f, 1).samples
    d2 = fd_derivative(f, 2).samples
    eig = lambda_derivative_eigenvalue(spec)
    out = {}
    if eig.left_value is not None:
        out["left"] = float(qnorm(d1 - qmul(eig.left_value.as_array(), f.samples)).max())
    if eig.right_value is not None:
        out["right"] = float(qnorm(d1 - qmul(f.samples, eig.right_value.as_array())).max())
    out["second"] = float(qnorm(d2 + spec.m**2 * f.samples).max())
    return out


def convergence_order(coarse: float, fine: float, ratio: float = 2.0) -> float:
    if coarse == 0.0 or fine == 0.0:
        return float("nan")
    return math.log(coarse / fine) / math.log(ratio)


# -- associated Legendre functions and harmonics ------------------------------


def assoc_legendre(ell: int, m: int, u) -> np.ndarray:
    """P_ell^m(u) with the Condon-Shortley phase, by upward recurrence in ell.

    Negative orders use P_l^{-m} = (-1)^m (l-m)!/(l+m)! P_l^m.
    """
    if ell < 0 or abs(m) > ell:
        raise DomainError(f"need 0 <= |m| <= ell, got ell={ell}, m={m}")
    u = np.asarray(u, dtype=float)
    if np.any(np.abs(u) > 1.0):
        raise DomainError("argument must lie in [-1, 1]")
    k = abs(m)
    s = np.sqrt(np.clip(1.0 - u * u, 0.0, None))
    pmm = np.ones_like(u)
    for i in range(1, k + 1):
        pmm = -(2 * i - 1) * s * pmm
    if ell == k:
        p = pmm
    else:
        prev, cur = pmm, (2 * k + 1) * u * pmm
        for l in range(k + 2, ell + 1):
            prev, cur = cur, ((2 * l - 1) * u * cur - (l + k - 1) * prev) / (l - k)
        p = cur
    if m < 0:
        p = (-1) ** k * math.factorial(ell - k) / math.factorial(ell + k) * p
    return p


@lru_cache(maxsize=None)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.legendre.leggauss(n)
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return nodes, weights


@dataclass(frozen=True)
class SphericalHarmonicSpec:
    ell: int
    m: int
    lambda_variant: str = "l2"
    sigma: int | None = None
    theta0: float = 0.0
    gamma0: float = 0.0
    omega0: float = 0.0

    def __post_init__(self):
        v = _check_variant(self.lambda_variant)
        if v == "l1":
            raise DomainError("harmonics use the l2 or l3 azimuthal factor")
        object.__setattr__(self, "lambda_variant", v)
        if self.ell < 0 or abs(self.m) > self.ell or int(self.ell) != self.ell or int(self.m) != self.m:
            raise DomainError(f"invalid (ell, m) = ({self.ell}, {self.m})")
        if self.sigma is None:
            # with Condon-Shortley already inside P_l^|m|, this sign makes the
            # complex limit the textbook Y_l^m for negative m as well
            object.__setattr__(self, "sigma", (-1) ** abs(self.m) if self.m < 0 else 1)
        elif self.sigma not in (1, -1):
            raise DomainError(f"sigma must be +1 or -1, got {self.sigma}")

    def lambda_spec(self) -> LambdaSpec:
        return LambdaSpec(self.lambda_variant, self.m, self.theta0, self.gamma0, self.omega0)

    def normalization(self) -> float:
        k = abs(self.m)
        return math.sqrt((2 * self.ell + 1) / (4 * math.pi) * math.factorial(self.ell - k) / math.factorial(self.ell + k))


def eval_harmonic(spec: SphericalHarmonicSpec, theta, phi) -> np.ndarray:
    """sigma N P_l^|m|(cos theta) Lambda(phi), broadcasting theta against phi."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    radial = spec.sigma * spec.normalization() * assoc_legendre(spec.ell, abs(spec.m), np.cos(theta))
    lam = eval_lambda(spec.lambda_spec(), phi)
    return radial[..., None] * lam


@dataclass(frozen=True)
class SphereGrid:
    """Gauss-Legendre nodes in cos(theta) times a uniform periodic phi grid.

    ``values`` has shape ``(n_theta, n_phi, 4)``. Poles are never sampled.
    """

    n_theta: int = 64
    n_phi: int = 256
    values: np.ndarray | None = field(default=None, compare=False)

    @property
    def u(self) -> np.ndarray:
        return gauss_legendre(self.n_theta)[0]

    @property
    def weights(self) -> np.ndarray:
        return gauss_legendre(self.n_theta)[1]

    @property
    def theta(self) -> np.ndarray:
        return np.arccos(self.u)

    @property
    def phi(self) -> np.ndarray:
        return np.arange(self.n_phi) * (2 * math.pi / self.n_phi)

    @property
    def h_phi(self) -> float:
        return 2 * math.pi / self.n_phi

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.theta, self.phi, indexing="ij")

    def with_values(self, values) -> SphereGrid:
        values = np.asarray(values, dtype=float)
        if values.shape != (self.n_theta, self.n_phi, 4):
            raise ValueError(f"values must have shape {(self.n_theta, self.n_phi, 4)}, got {values.shape}")
        return SphereGrid(self.n_theta, self.n_phi, values)

    def sample(self, func: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> SphereGrid:
        th, ph = self.mesh()
        return self.with_values(func(th, ph))

    def integrate(self, scalar: np.ndarray) -> float:
        """Integral over the sphere of a real field sampled on this grid."""
        return float(self.weights @ scalar.sum(axis=1) * self.h_phi)

    def real_inner(self, other: SphereGrid) -> float:
        return self.integrate(qreal_dot(self.values, other.values))


def sample_harmonic(spec: SphericalHarmonicSpec, grid: SphereGrid | None = None) -> SphereGrid:
    grid = grid or SphereGrid()
    return grid.sample(lambda th, ph: eval_harmonic(spec, th, ph))


def harmonic_norm(spec: SphericalHarmonicSpec, grid: SphereGrid | None = None) -> float:
    g = sample_harmonic(spec, grid)
    return g.real_inner(g)

import math

import numpy as np
import pytest

from hqm.angular import (
    AngularMomentumOp,
    CartesianGrid,
    gaussian_lambda,
    l2_apply,
    l3_apply,
    orbital_commutator_check,
    orbital_commutator_study,
)
from hqm.checks import l3_eigen_residual, orbital_test_functions
from hqm.errors import BoundaryError, DomainError, SupportError
from hqm.quat import UNIT_I, ImaginaryUnit, qnorm
from hqm.waves import (
    GridFunction1D,
    LambdaSpec,
    SphereGrid,
    SphericalHarmonicSpec,
    azimuthal_unit,
    convergence_order,
    sample_harmonic,
    sample_lambda,
)


def test_l3_on_l2_wave_is_plus_hbar_m():
    hbar, m = 1.3, 2
    f = sample_lambda(LambdaSpec("l2", m, 0.6), 512)
    out = l3_apply(UNIT_I, f, hbar)
    # central differences scale the eigenvalue by sin(m h)/(m h)
    factor = math.sin(m * f.h) / (m * f.h)
    assert np.allclose(out.samples, hbar * m * factor * f.samples, atol=1e-13)


def test_l3_on_l3_wave_uses_its_own_unit():
    spec = LambdaSpec("l3", 3, gamma0=0.5, omega0=2.0)
    f = sample_lambda(spec, 512)
    out = l3_apply(azimuthal_unit(spec), f)
    assert float(qnorm(out.samples - 3 * f.samples).max()) < 1e-3
    # with i instead, the relation fails at O(1)
    wrong = l3_apply(UNIT_I, f)
    assert float(qnorm(wrong.samples - 3 * f.samples).max()) > 1.0


def test_l1_is_not_an_l3_eigenfunction():
    f = sample_lambda(LambdaSpec("l1", 1, 0.7), 512)
    out = l3_apply(UNIT_I, f)
    assert float(qnorm(out.samples - f.samples).max()) > 0.5


def test_l3_apply_errors():
    f = sample_lambda(LambdaSpec("l2", 1), 64)
    with pytest.raises(BoundaryError):
        l3_apply(UNIT_I, GridFunction1D(f.samples, f.domain_length, periodic=False))
    with pytest.raises(TypeError):
        l3_apply(UNIT_I, np.zeros((4, 4)))


@pytest.mark.parametrize("variant", ["l2", "l3"])
def test_l3_eigen_order_on_sphere(variant):
    spec = SphericalHarmonicSpec(3, -2, variant, theta0=0.4, gamma0=0.2, omega0=1.0)
    r1 = l3_eigen_residual(spec, 16, 256)
    r2 = l3_eigen_residual(spec, 16, 512)
    assert convergence_order(r1, r2) == pytest.approx(2.0, abs=0.1)


@pytest.mark.parametrize("variant", ["l2", "l3"])
@pytest.mark.parametrize("ell", [0, 1, 2, 4, 6])
def test_l2_eigenvalue(variant, ell):
    hbar = 0.7
    for m in {-ell, 0, ell, ell // 2}:
        g = sample_harmonic(SphericalHarmonicSpec(ell, m, variant, theta0=1.1, gamma0=0.3, omega0=2.2), SphereGrid(64, 256))
        out = l2_apply(g, hbar)
        assert np.abs(out.values - hbar**2 * ell * (ell + 1) * g.values).max() <= 1e-8


def test_l2_on_mixed_ell_is_not_eigen():
    grid = SphereGrid(32, 64)
    a = sample_harmonic(SphericalHarmonicSpec(1, 0), grid).values
    b = sample_harmonic(SphericalHarmonicSpec(2, 1), grid).values
    g = grid.with_values(a + b)
    out = l2_apply(g).values
    assert np.allclose(out, 2 * a + 6 * b, atol=1e-9)


def test_l2_rejects_unresolved_modes():
    grid = SphereGrid(8, 64)
    th, ph = grid.mesh()
    vals = np.zeros((8, 64, 4))
    vals[..., 0] = np.cos(20 * ph)
    with pytest.raises(DomainError):
        l2_apply(grid.with_values(vals))


def test_cartesian_grid_geometry():
    g = CartesianGrid(5, 2.0)
    assert g.h == 1.0
    assert np.array_equal(g.axis, [-2, -1, 0, 1, 2])


def test_cartesian_l_on_rotation_invariant_function_is_second_order_small():
    def worst(n):
        grid = CartesianGrid(n, 6.0)
        x, y, z = grid.coords()
        f = np.exp(-(x**2 + y**2 + z**2) / 2)[..., None] * np.array([1.0, 0.2, -0.3, 0.4])
        return max(np.abs(AngularMomentumOp(axis, UNIT_I).apply(f, grid)[2:-2, 2:-2, 2:-2]).max() for axis in (1, 2, 3))

    # the discrete operator does not see the symmetry exactly; the defect is O(h^2)
    assert convergence_order(worst(49), worst(97)) == pytest.approx(2.0, abs=0.1)


def test_angular_momentum_axis_validation():
    with pytest.raises(DomainError):
        AngularMomentumOp(4, UNIT_I)


def test_support_error():
    spec = LambdaSpec("l2", 1)
    wide = [gaussian_lambda(spec, width=4.0)]
    with pytest.raises(SupportError):
        orbital_commutator_check(1, 2, UNIT_I, wide, CartesianGrid(16, 5.0))


def test_same_axis_commutator_is_zero():
    assert orbital_commutator_check(2, 2, UNIT_I) == 0.0


@pytest.mark.parametrize("eta", [UNIT_I, ImaginaryUnit.jphase(1.7)])
def test_orbital_commutator_second_order(eta):
    funcs = orbital_test_functions(np.random.default_rng(3))
    hs, res, order = orbital_commutator_study(1, 2, eta, funcs, sizes=(32, 64))
    assert order == pytest.approx(2.0, abs=0.2)
    # the residual itself stays below a modest multiple of h^2
    assert res[0] <= 10 * hs[0] ** 2


def test_commutator_sign_reversal():
    funcs = orbital_test_functions(np.random.default_rng(1))
    g = CartesianGrid(32)
    assert orbital_commutator_check(2, 1, UNIT_I, funcs, g) == pytest.approx(orbital_commutator_check(1, 2, UNIT_I, funcs, g), rel=1e-10)

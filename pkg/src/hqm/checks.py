"""Registered numerical checks driven by ``hqm verify``.

Every check produces ``Check`` records holding a residual and the tolerance
it is held to. Convergence checks report ``|observed order - expected|``
as their residual. Randomized checks draw from a generator seeded per check
family, so a fixed seed reproduces the report exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from . import angular, quat, spin, waves
from .quat import UNIT_I, ImaginaryUnit, as_matrix4, qmul, qnorm
from .rhilbert import barred_commutator, real_basis


@dataclass(frozen=True)
class Check:
    name: str
    paper_eq: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tolerance)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "paper_eq": self.paper_eq,
            "residual": float(self.residual),
            "tolerance": float(self.tolerance),
            "pass": self.passed,
        }


@dataclass
class VerifySettings:
    seed: int = 0
    hbar: float = 1.0
    gamma: float = 1.0
    B0: float = 1.0
    n_random: int = 1000
    n_algebra: int = 10_000
    n_eta: int = 20
    grid: int = 256
    sphere_theta: int = 64
    sphere_phi: int = 256
    box: int = 32
    rk4_steps: int = 10_000
    rk4_study_steps: int = 250
    tolerances: dict[str, float] = field(default_factory=dict)

    @property
    def larmor(self) -> spin.LarmorConfig:
        return spin.LarmorConfig(self.gamma, self.B0, self.hbar)


# name -> (equation tag, default tolerance). The keys are the names accepted by --tol.
TOLERANCES: dict[str, tuple[str, float]] = {
    "algebra.associativity": ("eq1", 1e-12),
    "algebra.norm_multiplicative": ("eq1", 1e-12),
    "algebra.matrix_oracle": ("eq1", 1e-12),
    "algebra.basis_table": ("eq1", 0.0),
    "lambda.first_derivative_order": ("a03", 0.1),
    "lambda.l3_left_right": ("a03", 1e-12),
    "lambda.second_derivative_order": ("a04", 0.1),
    "lambda.unit_norm": ("a02", 1e-12),
    "spin.commutators": ("s01", 1e-12),
    "spin.casimir": ("s01", 1e-12),
    "orbital.commutator_order": ("a09", 0.2),
    "l3.eigen_order": ("a10", 0.1),
    "harmonics.normalization": ("a11", 1e-10),
    "harmonics.orthogonality": ("a11", 1e-10),
    "harmonics.l2_eigenvalue": ("a11", 1e-8),
    "harmonics.complex_limit": ("a11", 1e-14),
    "larmor1.expectations": ("s06", 1e-12),
    "larmor1.second_moment_sum": ("s07", 1e-12),
    "larmor1.mean_vector_sq": ("s07", 1e-12),
    "larmor1.sigma": ("s08", 1e-12),
    "larmor1.complex_limits": ("s06", 1e-12),
    "larmor2.first_moments": ("s10", 1e-12),
    "larmor2.s_squared": ("s10", 1e-12),
    "schrodinger.case1_residual": ("a12", math.nan),  # 10 h_t^2, set at run time
    "schrodinger.case2_residual": ("a12", math.nan),
    "rk4.case1_error": ("a12", 1e-8),
    "rk4.case2_error": ("a12", 1e-8),
    "rk4.order": ("a12", 2.0),
    "rk4.norm_drift": ("a12", 1e-8),
}


def _check(settings: VerifySettings, name: str, residual: float, default: float | None = None) -> Check:
    tag, tol = TOLERANCES[name]
    if default is not None:
        tol = default
    tol = settings.tolerances.get(name, tol)
    return Check(name, tag, float(residual), float(tol))


def _rng(settings: VerifySettings, family: int) -> np.random.Generator:
    return np.random.default_rng([settings.seed, family])


# -- algebra -------------------------------------------------------------------


def algebra_checks(s: VerifySettings) -> list[Check]:
    rng = _rng(s, 1)
    a, b, c = (rng.normal(size=(s.n_algebra, 4)) for _ in range(3))
    ab = qmul(a, b)
    scale = qnorm(a) * qnorm(b)
    assoc = qnorm(qmul(ab, c) - qmul(a, qmul(b, c))) / (scale * qnorm(c))
    normmul = np.abs(qnorm(ab) - scale) / scale
    oracle = np.abs(np.einsum("nij,nj->ni", as_matrix4(a), b) - ab).max(axis=1) / scale
    return [
        _check(s, "algebra.associativity", assoc.max()),
        _check(s, "algebra.norm_multiplicative", normmul.max()),
        _check(s, "algebra.matrix_oracle", oracle.max()),
        _check(s, "algebra.basis_table", basis_table_mismatches()),
    ]


HAMILTON_TABLE = {
    ("i", "i"): "-1",
    ("j", "j"): "-1",
    ("k", "k"): "-1",
    ("i", "j"): "k",
    ("j", "k"): "i",
    ("k", "i"): "j",
    ("j", "i"): "-k",
    ("k", "j"): "-i",
    ("i", "k"): "-j",
}


def basis_table_mismatches() -> int:
    units = {"1": quat.ONE, "i": quat.I, "j": quat.J, "k": quat.K}
    bad = 0
    for (p, q), expected in HAMILTON_TABLE.items():
        sign = -1.0 if expected.startswith("-") else 1.0
        want = units[expected.lstrip("-")] * sign
        if quat.mul(units[p], units[q]) != want:
            bad += 1
    return bad


# -- plane waves -----------------------------------------------------------------


def lambda_specs(rng: np.random.Generator, ms=(1, 2, 5)) -> list[waves.LambdaSpec]:
    out = []
    for m in ms:
        theta0, gamma0, omega0 = rng.uniform(0, 2 * math.pi, 3)
        for v in waves.VARIANTS:
            out.append(waves.LambdaSpec(v, m, theta0, gamma0, omega0))
    return out


def lambda_study(spec: waves.LambdaSpec, n: int) -> dict[str, tuple[float, float, float]]:
    """Residuals on n and 2n points and the observed order, per relation."""
    coarse = waves.eigen_residuals(spec, n)
    fine = waves.eigen_residuals(spec, 2 * n)
    return {k: (coarse[k], fine[k], waves.convergence_order(coarse[k], fine[k])) for k in coarse}


def lambda_checks(s: VerifySettings) -> list[Check]:
    rng = _rng(s, 2)
    first_dev = second_dev = 0.0
    for spec in lambda_specs(rng):
        study = lambda_study(spec, s.grid)
        for key, (_, _, order) in study.items():
            dev = abs(order - 2.0)
            if key == "second":
                second_dev = max(second_dev, dev)
            else:
                first_dev = max(first_dev, dev)
    x = rng.uniform(-10, 10, s.n_random)
    lr = unit = 0.0
    for _ in range(10):
        m = rng.uniform(0.5, 5)
        g0, w0, t0 = rng.uniform(0, 2 * math.pi, 3)
        spec3 = waves.LambdaSpec("l3", m, t0, g0, w0)
        eig = waves.lambda_derivative_eigenvalue(spec3)
        lam = waves.eval_lambda(spec3, x)
        lr = max(lr, float(qnorm(qmul(eig.left_value.as_array(), lam) - qmul(lam, eig.right_value.as_array())).max()))
        for v in waves.VARIANTS:
            unit = max(unit, float(np.abs(qnorm(waves.eval_lambda(waves.LambdaSpec(v, m, t0, g0, w0), x)) - 1).max()))
    return [
        _check(s, "lambda.first_derivative_order", first_dev),
        _check(s, "lambda.l3_left_right", lr),
        _check(s, "lambda.second_derivative_order", second_dev),
        _check(s, "lambda.unit_norm", unit),
    ]


# -- spin algebra ------------------------------------------------------------------


def random_etas(rng: np.random.Generator, n: int) -> list[ImaginaryUnit]:
    return [UNIT_I] + [ImaginaryUnit.jphase(d) for d in rng.uniform(0, 2 * math.pi, n)]


def spin_algebra_residuals(eta: ImaginaryUnit, hbar: float = 1.0) -> tuple[float, float]:
    """Worst residual of [S_a, S_b] = hbar eps_abc (S_c|eta) and of [S^2, S_a] = 0 on the real basis."""
    ops = spin.spin_operators(eta, hbar)
    e = eta.as_array()
    basis = real_basis()
    worst = 0.0
    for a, b, c in [(0, 1, 2), (1, 2, 0), (2, 0, 1)]:
        comm = barred_commutator(ops[a], ops[b])
        for psi in basis:
            lhs = comm(psi).as_array()
            rhs = hbar * qmul(ops[c].apply_array(psi.as_array()), e)
            worst = max(worst, float(np.abs(lhs - rhs).max()))

    def s_squared(arr):
        return sum(op.apply_array(op.apply_array(arr)) for op in ops)

    casimir = 0.0
    for op in ops:
        for psi in basis:
            arr = psi.as_array()
            d = s_squared(op.apply_array(arr)) - op.apply_array(s_squared(arr))
            casimir = max(casimir, float(np.abs(d).max()))
    return worst, casimir


def spin_algebra_checks(s: VerifySettings) -> list[Check]:
    rng = _rng(s, 3)
    comm = cas = 0.0
    for eta in random_etas(rng, s.n_eta):
        r1, r2 = spin_algebra_residuals(eta, s.hbar)
        comm, cas = max(comm, r1), max(cas, r2)
    return [_check(s, "spin.commutators", comm), _check(s, "spin.casimir", cas)]


# -- orbital angular momentum ------------------------------------------------------


def orbital_test_functions(rng: np.random.Generator) -> list[Callable]:
    t0, g0, w0 = rng.uniform(0, 2 * math.pi, 3)
    return [
        angular.gaussian_lambda(
            waves.LambdaSpec(v, 1.0, t0, g0, w0),
            width=1.0,
            center=(0.3, -0.2, 0.1),
            direction=(0.6, 0.3, -0.2),
        )
        for v in waves.VARIANTS
    ]


def orbital_checks(s: VerifySettings) -> list[Check]:
    rng = _rng(s, 4)
    funcs = orbital_test_functions(rng)
    delta = rng.uniform(0, 2 * math.pi)
    worst = 0.0
    for eta in (UNIT_I, ImaginaryUnit.jphase(delta)):
        for a, b in [(1, 2), (2, 3), (3, 1)]:
            _, _, order = angular.orbital_commutator_study(a, b, eta, funcs, sizes=(s.box, 2 * s.box), hbar=s.hbar)
            worst = max(worst, abs(order - 2.0))
    return [_check(s, "orbital.commutator_order", worst)]


def harmonic_specs(rng: np.random.Generator, lmax: int = 4) -> list[waves.SphericalHarmonicSpec]:
    t0, g0, w0 = rng.uniform(0, 2 * math.pi, 3)
    return [
        waves.SphericalHarmonicSpec(l, m, v, theta0=t0, gamma0=g0, omega0=w0)
        for v in ("l2", "l3")
        for l in range(lmax + 1)
        for m in range(-l, l + 1)
    ]


def l3_eigen_residual(spec: waves.SphericalHarmonicSpec, n_theta: int, n_phi: int, hbar: float = 1.0) -> float:
    grid = waves.sample_harmonic(spec, waves.SphereGrid(n_theta, n_phi))
    eta = waves.azimuthal_unit(spec.lambda_spec())
    out = angular.l3_apply(eta, grid, hbar)
    return float(qnorm(out.values - hbar * spec.m * grid.values).max())


def harmonic_checks(s: VerifySettings) -> list[Check]:
    rng = _rng(s, 5)
    specs = harmonic_specs(rng)
    grid = waves.SphereGrid(s.sphere_theta, s.sphere_phi)
    sampled = [waves.sample_harmonic(sp, grid) for sp in specs]
    norm_err = max(abs(g.real_inner(g) - 1.0) for g in sampled)
    ortho = 0.0
    for v in ("l2", "l3"):
        group = [g for sp, g in zip(specs, sampled) if sp.lambda_variant == v]
        for i, gi in enumerate(group):
            for gj in group[i + 1 :]:
                ortho = max(ortho, abs(gi.real_inner(gj)))
    l2_err = 0.0
    for sp, g in zip(specs, sampled):
        out = angular.l2_apply(g, s.hbar)
        l2_err = max(l2_err, float(np.abs(out.values - s.hbar**2 * sp.ell * (sp.ell + 1) * g.values).max()))
    order_dev = 0.0
    for sp in specs:
        if sp.m == 0:
            continue
        r1 = l3_eigen_residual(sp, 16, s.sphere_phi, s.hbar)
        r2 = l3_eigen_residual(sp, 16, 2 * s.sphere_phi, s.hbar)
        order_dev = max(order_dev, abs(waves.convergence_order(r1, r2) - 2.0))
    limit = 0.0
    for sp in harmonic_specs(rng):
        if sp.lambda_variant != "l2":
            continue
        flat = waves.SphericalHarmonicSpec(sp.ell, sp.m, "l2", theta0=0.0)
        vals = waves.sample_harmonic(flat, grid).values
        limit = max(limit, float(np.abs(vals[..., 2:]).max()))
    return [
        _check(s, "harmonics.normalization", norm_err),
        _check(s, "harmonics.orthogonality", ortho),
        _check(s, "harmonics.l2_eigenvalue", l2_err),
        _check(s, "l3.eigen_order", order_dev),
        _check(s, "harmonics.complex_limit", limit),
    ]


# -- Larmor precession -------------------------------------------------------------


def larmor1_checks(s: VerifySettings) -> list[Check]:
    rng = _rng(s, 6)
    cfg = s.larmor
    period = 2 * math.pi / abs(cfg.omega)
    exp_err = sum_err = vec_err = sig_err = 0.0
    for _ in range(s.n_random):
        th, a, b = rng.uniform(0, 2 * math.pi, 3)
        t = rng.uniform(0, 2 * period)
        st = spin.Case1State(th, a, b)
        first, second = spin.numeric_moments(spin.psi_case1(st, cfg, t), cfg.hbar)
        closed = np.array(spin.expectations_case1(st, cfg, t), dtype=float)
        exp_err = max(exp_err, float(np.abs(first - closed).max()))
        sum_err = max(sum_err, abs(float(second.sum()) - cfg.hbar**2 / 4))
        vec_err = max(vec_err, abs(float(first @ first) - spin.mean_vector_sq_case1(st, cfg.hbar)))
        # compared as variances: the square root is ill-conditioned where sigma_S -> 0
        spread2 = cfg.hbar**2 / 4 - float(first @ first)
        sig_err = max(sig_err, abs(spread2 - spin.sigma_s(st, cfg.hbar) ** 2))
    lim = 0.0
    for _ in range(50):
        th, a, b = rng.uniform(0, 2 * math.pi, 3)
        t = rng.uniform(0, 2 * period)
        h = cfg.hbar / 2
        wt = cfg.omega * t
        complex_result = np.array([h * math.sin(a) * math.cos(wt), h * math.sin(a) * math.sin(wt), h * math.cos(a)])
        for st, target in ((spin.Case1State(0.0, a, b), complex_result), (spin.Case1State(th, a, a), complex_result)):
            first, _ = spin.numeric_moments(spin.psi_case1(st, cfg, t), cfg.hbar)
            lim = max(lim, float(np.abs(first - target).max()), spin.sigma_s(st, cfg.hbar))
    return [
        _check(s, "larmor1.expectations", exp_err),
        _check(s, "larmor1.second_moment_sum", sum_err),
        _check(s, "larmor1.mean_vector_sq", vec_err),
        _check(s, "larmor1.sigma", sig_err),
        _check(s, "larmor1.complex_limits", lim),
    ]


def larmor2_checks(s: VerifySettings) -> list[Check]:
    rng = _rng(s, 7)
    cfg = s.larmor
    period = 2 * math.pi / abs(cfg.omega)
    first_err = sq_err = 0.0
    for _ in range(s.n_random):
        a, b = rng.uniform(0, 2 * math.pi, 2)
        t = rng.uniform(0, 2 * period)
        st = spin.Case2State(a, b)
        first, second = spin.numeric_moments(spin.psi_case2(st, cfg, t), cfg.hbar)
        closed = spin.expectations_case2(st, cfg, t)
        first_err = max(first_err, float(np.abs(first - np.array(closed[:3])).max()))
        sq_err = max(sq_err, abs(float(second.sum()) - closed[3]))
    return [_check(s, "larmor2.first_moments", first_err), _check(s, "larmor2.s_squared", sq_err)]


def schrodinger_checks(s: VerifySettings) -> list[Check]:
    rng = _rng(s, 8)
    cfg = s.larmor
    h_t = 1e-4 / abs(cfg.omega)
    tol = 10 * h_t**2
    H = spin.hamiltonian(cfg)
    period = 2 * math.pi / abs(cfg.omega)
    r1 = r2 = 0.0
    for _ in range(20):
        th, a, b = rng.uniform(0, 2 * math.pi, 3)
        t = rng.uniform(0, 2 * period)
        st1 = spin.Case1State(th, a, b)
        r1 = max(r1, spin.schrodinger_residual(lambda tt: spin.psi_case1_array(st1, cfg, tt), H, UNIT_I, cfg, t, h_t))
        st2 = spin.Case2State(a, b)
        r2 = max(r2, spin.schrodinger_residual(lambda tt: spin.psi_case2_array(st2, cfg, tt), H, st2.eta, cfg, t, h_t))
    return [
        _check(s, "schrodinger.case1_residual", r1, tol),
        _check(s, "schrodinger.case2_residual", r2, tol),
    ]


def rk4_path_error(family: str, params, cfg: spin.LarmorConfig, t_final: float, steps: int, samples: int = 10) -> tuple[float, float]:
    """Max state error against the closed form along [0, t_final], and the final norm drift."""
    if family == "case1":
        st = spin.Case1State(*params)
        closed, eta = spin.psi_case1_array, UNIT_I
    else:
        st = spin.Case2State(*params)
        closed, eta = spin.psi_case2_array, st.eta
    psi0 = spin.QSpinor.from_array(closed(st, cfg, 0.0))
    path = spin.evolve_rk4_path(psi0, spin.hamiltonian(cfg), eta, cfg, t_final, samples, steps // samples)
    times = np.linspace(0.0, t_final, samples + 1)
    err = float(np.abs(path - closed(st, cfg, times)).max())
    drift = abs(float(np.sum(path[-1] ** 2)) - 1.0)
    return err, drift


def rk4_checks(s: VerifySettings) -> list[Check]:
    rng = _rng(s, 9)
    cfg = s.larmor
    t_final = 4 * math.pi / abs(cfg.omega)
    p1 = tuple(rng.uniform(0, 2 * math.pi, 3))
    p2 = tuple(rng.uniform(0, 2 * math.pi, 2))
    e1, drift = rk4_path_error("case1", p1, cfg, t_final, s.rk4_steps)
    e2, _ = rk4_path_error("case2", p2, cfg, t_final, s.rk4_steps)
    coarse, _ = rk4_path_error("case1", p1, cfg, t_final, s.rk4_study_steps)
    fine, _ = rk4_path_error("case1", p1, cfg, t_final, 2 * s.rk4_study_steps)
    return [
        _check(s, "rk4.case1_error", e1),
        _check(s, "rk4.case2_error", e2),
        _check(s, "rk4.order", abs(coarse / fine - 16.0)),
        _check(s, "rk4.norm_drift", drift),
    ]


SUITES: dict[str, list[Callable[[VerifySettings], list[Check]]]] = {
    "algebra": [algebra_checks],
    "waves": [lambda_checks, harmonic_checks],
    "angular": [orbital_checks, harmonic_checks],
    "spin": [spin_algebra_checks, larmor1_checks, larmor2_checks, schrodinger_checks, rk4_checks],
}


def run_suite(name: str, settings: VerifySettings | None = None) -> list[Check]:
    settings = settings or VerifySettings()
    if name == "all":
        families = []
        for fams in SUITES.values():
            families += [f for f in fams if f not in families]
    else:
        families = SUITES[name]
    out: list[Check] = []
    for fam in families:
        out += fam(settings)
    return out


def report(name: str, checks: list[Check]) -> dict:
    return {
        "suite": name,
        "checks": [c.to_dict() for c in checks],
        "all_pass": all(c.passed for c in checks),
    }


def with_tolerances(settings: VerifySettings, overrides: dict[str, float]) -> VerifySettings:
    unknown = set(overrides) - set(TOLERANCES)
    if unknown:
        raise KeyError(f"unknown check name(s): {', '.join(sorted(unknown))}")
    return replace(settings, tolerances={**settings.tolerances, **overrides})

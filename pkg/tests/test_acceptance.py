"""Acceptance criteria, one test per criterion.

Each test prints a single PASS/FAIL line listing its sub-parts with the
measured value and the tolerance. The lines are also collected and shown
in the pytest terminal summary. Run this file directly to get only the
eight lines.
"""

import json
import subprocess
import sys
import time

import numpy as np
import pytest

from hqm import checks
from hqm.quat import UNIT_I, ImaginaryUnit
from hqm.waves import VARIANTS, LambdaSpec, convergence_order, eigen_residuals

LINES: dict[int, str] = {}


class Part:
    def __init__(self, label, value, tol, ok=None):
        self.label = label
        self.value = float(value)
        self.tol = tol
        self.ok = bool(ok) if ok is not None else self.value <= tol

    def __str__(self):
        mark = "ok" if self.ok else "FAIL"
        return f"{self.label}={self.value:.3g} (tol {self.tol}) {mark}"


def verdict(number, title, parts):
    ok = all(p.ok for p in parts)
    line = f"criterion {number} {'PASS' if ok else 'FAIL'} [{title}] " + "; ".join(str(p) for p in parts)
    LINES[number] = line
    print(line)
    return ok, line


def from_checks(results, names=None):
    return [Part(c.name, c.residual, c.tolerance, c.passed) for c in results if names is None or c.name in names]


def timed(fn, *args):
    t0 = time.perf_counter()
    out = fn(*args)
    return out, time.perf_counter() - t0


SETTINGS = checks.VerifySettings()


def criterion_1():
    results, dt = timed(checks.algebra_checks, SETTINGS)
    assert SETTINGS.n_algebra == 10_000
    return verdict(1, "quaternion algebra", from_checks(results) + [Part("runtime_s", dt, 1.0)])


def criterion_2():
    def study():
        worst_first = worst_second = 0.0
        for variant in VARIANTS:
            for m in (1, 2, 5):
                spec = LambdaSpec(variant, m, 0.37, 0.81, 2.2)
                coarse, fine = eigen_residuals(spec, 256), eigen_residuals(spec, 512)
                for key in coarse:
                    dev = abs(convergence_order(coarse[key], fine[key]) - 2.0)
                    if key == "second":
                        worst_second = max(worst_second, dev)
                    else:
                        worst_first = max(worst_first, dev)
        return worst_first, worst_second

    (first, second), dt = timed(study)
    parts = [
        Part("first_derivative_order_dev", first, 0.1),
        Part("second_derivative_order_dev", second, 0.1),
        Part("runtime_s", dt, 1.0),
    ]
    return verdict(2, "plane-wave eigenfunctions", parts)


def criterion_3():
    def run():
        spin_part = checks.spin_algebra_checks(SETTINGS)
        orbital = checks.orbital_checks(SETTINGS)
        return spin_part, orbital

    (spin_part, orbital), dt = timed(run)
    assert SETTINGS.n_eta == 20 and SETTINGS.box == 32
    # absolute size of the orbital residual on the 32^3 box against h^2
    funcs = checks.orbital_test_functions(np.random.default_rng(0))
    grid = checks.angular.CartesianGrid(32)
    res = max(checks.angular.orbital_commutator_check(1, 2, eta, funcs, grid) for eta in (UNIT_I, ImaginaryUnit.jphase(0.9)))
    parts = from_checks(spin_part) + from_checks(orbital)
    parts.append(Part("orbital_residual_over_h2", res / grid.h**2, 10.0))
    parts.append(Part("runtime_s", dt, 60.0))
    return verdict(3, "commutation algebra", parts)


def criterion_4():
    results, dt = timed(checks.harmonic_checks, SETTINGS)
    return verdict(4, "spherical harmonics", from_checks(results) + [Part("runtime_s", dt, 60.0)])


def criterion_5():
    results = checks.larmor1_checks(SETTINGS)
    assert SETTINGS.n_random == 1000
    return verdict(5, "Larmor case 1", from_checks(results))


def criterion_6():
    results = checks.larmor2_checks(SETTINGS)
    return verdict(6, "Larmor case 2", from_checks(results))


def criterion_7():
    assert SETTINGS.rk4_steps == 10_000
    results = checks.rk4_checks(SETTINGS) + checks.schrodinger_checks(SETTINGS)
    return verdict(7, "dynamics", from_checks(results))


def hqm(*args):
    t0 = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "hqm", *args], capture_output=True, text=True)
    return proc, time.perf_counter() - t0


def criterion_8():
    default, dt = hqm("verify")
    again, _ = hqm("verify")
    forced, _ = hqm("verify", "algebra", "--tol", "algebra.matrix_oracle=0")
    bad, _ = hqm("verify", "--no-such-flag")
    forced_ok = forced.returncode == 1 and not json.loads(forced.stdout)["all_pass"]
    parts = [
        Part("verify_exit_code", default.returncode, 0),
        Part("byte_identical", 0.0 if default.stdout == again.stdout and default.stdout else 1.0, 0),
        Part("forced_failure_exit_1", 0.0 if forced_ok else 1.0, 0),
        Part("bad_flag_exit", bad.returncode, 2, bad.returncode == 2),
        Part("runtime_s", dt, 120.0),
    ]
    return verdict(8, "CLI", parts)


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 9)])
def test_acceptance(criterion):
    ok, line = criterion()
    assert ok, line


if __name__ == "__main__":
    failed = 0
    for c in CRITERIA:
        failed += not c()[0]
    sys.exit(1 if failed else 0)

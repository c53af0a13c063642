"""Observed convergence orders of the three discretizations used in the checks.

Prints a small table: plane-wave derivatives on periodic grids, the orbital
commutator on a Cartesian box, and RK4 for the case-1 Larmor state.
"""

import argparse
import math

import numpy as np

from hqm import checks
from hqm.angular import orbital_commutator_study
from hqm.quat import UNIT_I
from hqm.spin import LarmorConfig
from hqm.waves import LambdaSpec, convergence_order, eigen_residuals


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--box", type=int, nargs="+", default=[32, 64])
    args = parser.parse_args()
    rng = np.random.default_rng(args.seed)

    print("plane waves (n = 128, 256, 512)")
    for variant in ("l1", "l2", "l3"):
        spec = LambdaSpec(variant, 2, *rng.uniform(0, 2 * math.pi, 3))
        res = [eigen_residuals(spec, n) for n in (128, 256, 512)]
        for key in res[0]:
            orders = [convergence_order(a[key], b[key]) for a, b in zip(res, res[1:])]
            print(f"  {variant} {key:6s} " + "  ".join(f"{o:.3f}" for o in orders))

    print(f"orbital commutator [L1, L2], boxes {args.box}")
    funcs = checks.orbital_test_functions(rng)
    hs, res, _ = orbital_commutator_study(1, 2, UNIT_I, funcs, sizes=args.box)
    for h, r in zip(hs, res):
        print(f"  h={h:.4f}  residual={r:.3e}")
    for (h1, r1), (h2, r2) in zip(zip(hs, res), zip(hs[1:], res[1:])):
        print(f"  order {math.log(r1 / r2) / math.log(h1 / h2):.3f}")

    print("RK4, case 1 over two periods")
    cfg = LarmorConfig()
    params = tuple(rng.uniform(0, 2 * math.pi, 3))
    errs = [checks.rk4_path_error("case1", params, cfg, 4 * math.pi, n)[0] for n in (125, 250, 500, 1000)]
    for n, e in zip((125, 250, 500, 1000), errs):
        print(f"  steps={n:5d}  error={e:.3e}")
    print("  ratios " + "  ".join(f"{a / b:.2f}" for a, b in zip(errs, errs[1:])))


if __name__ == "__main__":
    main()

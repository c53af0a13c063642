"""Command-line interface: ``hqm {verify,precess,harmonics,free-particle}``.

Exit codes: 0 all checks pass, 1 a check failed, 2 usage or config error,
3 I/O error. Settings come from flags, then the file named by ``HQM_CONFIG``
(``key = value`` lines, keys spelled like the long flags), then defaults.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import checks, spin, waves
from .errors import BoundaryError, HQMError
from .quat import UNIT_I, ImaginaryUnit

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3
CONFIG_ENV = "HQM_CONFIG"
MAX_ELL = 8


class UsageError(Exception):
    pass


def _tol_pair(text: str) -> tuple[str, float]:
    name, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected <name>=<value>, got {text!r}")
    try:
        return name.strip(), float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"tolerance for {name!r} is not a number: {value!r}") from None


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--case", type=int, choices=(1, 2))
    p.add_argument("--theta", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--gamma0", type=float)
    p.add_argument("--omega0", type=float)
    p.add_argument("--ell", type=int)
    p.add_argument("--m", type=float)
    p.add_argument("--variant", choices=("l1", "l2", "l3"))
    p.add_argument("--eta", choices=("i", "jphase"))
    p.add_argument("--hbar", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--b0", type=float)
    p.add_argument("--t-max", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--grid", type=int)
    p.add_argument("--tol", type=_tol_pair, action="append")
    p.add_argument("--seed", type=int)
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--out", type=Path)
    p.add_argument("--integrate", action="store_true", default=None)


DEFAULTS = {
    "case": 1,
    "theta": 0.0,
    "alpha": math.pi / 2,
    "beta": 0.0,
    "gamma0": 0.0,
    "omega0": 0.0,
    "ell": 2,
    "m": 1.0,
    "variant": "l2",
    "eta": None,
    "hbar": 1.0,
    "gamma": 1.0,
    "b0": 1.0,
    "t_max": None,
    "steps": None,
    "grid": None,
    "tol": None,
    "seed": 0,
    "format": None,
    "out": None,
    "integrate": False,
}

_CONFIG_TYPES = {
    "case": int,
    "theta": float,
    "alpha": float,
    "beta": float,
    "gamma0": float,
    "omega0": float,
    "ell": int,
    "m": float,
    "variant": str,
    "eta": str,
    "hbar": float,
    "gamma": float,
    "b0": float,
    "t_max": float,
    "steps": int,
    "grid": int,
    "seed": int,
    "format": str,
    "out": Path,
}


_CHOICES = {
    "case": (1, 2),
    "variant": ("l1", "l2", "l3"),
    "eta": ("i", "jphase"),
    "format": ("csv", "json"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hqm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", help="run the registered numerical checks and emit a JSON report")
    v.add_argument("suite", nargs="?", default="all", choices=("all", *checks.SUITES))
    _add_common(v)
    p = sub.add_parser("precess", help="tabulate spin expectation values of a closed-form state")
    _add_common(p)
    h = sub.add_parser("harmonics", help="tabulate a quaternionic spherical harmonic")
    _add_common(h)
    f = sub.add_parser("free-particle", help="derivative eigen-residuals of a plane wave at two resolutions")
    _add_common(f)
    return parser


def read_config(path: str | os.PathLike) -> dict:
    out = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key = key.strip().lstrip("-").replace("-", "_")
        value = value.strip()
        if key == "tol":
            out.setdefault("tol", []).append(_tol_pair(value))
            continue
        if key == "integrate":
            out[key] = value.lower() in {"1", "true", "yes", "on"}
            continue
        if key not in _CONFIG_TYPES:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            out[key] = _CONFIG_TYPES[key](value)
        except ValueError:
            raise UsageError(f"{path}:{lineno}: bad value for {key!r}: {value!r}") from None
    return out


def resolve(args: argparse.Namespace, env: dict | None = None) -> argparse.Namespace:
    """Merge flags over config-file values over defaults."""
    env = os.environ if env is None else env
    merged = dict(DEFAULTS)
    cfg_path = env.get(CONFIG_ENV)
    if cfg_path:
        try:
            merged.update(read_config(cfg_path))
        except OSError as exc:
            raise UsageError(f"cannot read config file {cfg_path}: {exc}") from exc
    for key, value in vars(args).items():
        if value is not None:
            merged[key] = value
    for key, allowed in _CHOICES.items():
        if merged[key] is not None and merged[key] not in allowed:
            raise UsageError(f"{key} must be one of {allowed}, got {merged[key]!r}")
    return argparse.Namespace(**merged)


def atomic_write(path: Path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def emit(cfg: argparse.Namespace, text: str) -> None:
    if cfg.out is None:
        sys.stdout.write(text)
    else:
        atomic_write(cfg.out, text)


def _csv_text(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) for v in row])
    return buf.getvalue()


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _larmor(cfg) -> spin.LarmorConfig:
    if cfg.hbar <= 0:
        raise UsageError("--hbar must be positive")
    return spin.LarmorConfig(cfg.gamma, cfg.b0, cfg.hbar)


# -- commands ----------------------------------------------------------------------


def cmd_verify(cfg) -> int:
    settings = checks.VerifySettings(seed=cfg.seed, hbar=cfg.hbar, gamma=cfg.gamma, B0=cfg.b0)
    if cfg.hbar <= 0 or cfg.gamma * cfg.b0 == 0:
        raise UsageError("verify needs hbar > 0 and a nonzero field")
    if cfg.grid is not None:
        if cfg.grid < 8:
            raise UsageError("--grid must be at least 8")
        settings.grid = cfg.grid
    if cfg.steps is not None:
        if cfg.steps < 16:
            raise UsageError("--steps must be at least 16")
        settings.rk4_steps = cfg.steps
    try:
        settings = checks.with_tolerances(settings, dict(cfg.tol or []))
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None
    results = checks.run_suite(cfg.suite, settings)
    rep = checks.report(cfg.suite, results)
    if (cfg.format or "json") == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["name", "paper_eq", "residual", "tolerance", "pass"])
        for c in rep["checks"]:
            w.writerow([c["name"], c["paper_eq"], repr(c["residual"]), repr(c["tolerance"]), c["pass"]])
        emit(cfg, buf.getvalue())
    else:
        emit(cfg, _json_text(rep))
    return EXIT_OK if rep["all_pass"] else EXIT_FAIL


def cmd_precess(cfg) -> int:
    lc = _larmor(cfg)
    if lc.omega == 0:
        raise UsageError("precession needs a nonzero gamma * b0")
    t_max = cfg.t_max if cfg.t_max is not None else 4 * math.pi / abs(lc.omega)
    rows = cfg.steps if cfg.steps is not None else 200
    if t_max <= 0 or rows < 1:
        raise UsageError("need --t-max > 0 and --steps >= 1")
    times = np.linspace(0.0, t_max, rows + 1)
    if cfg.case == 1:
        st = spin.Case1State(cfg.theta, cfg.alpha, cfg.beta)
        states = spin.psi_case1_array(st, lc, times)
        s1, s2, s3 = (np.broadcast_to(v, times.shape) for v in spin.expectations_case1(st, lc, times))
        header = ["t", "S1", "S2", "S3", "norm"]
        cols = [times, s1, s2, s3]
        default_eta = UNIT_I
    else:
        st = spin.Case2State(cfg.alpha, cfg.beta)
        states = spin.psi_case2_array(st, lc, times)
        s1, s2, s3, ssq = spin.expectations_case2(st, lc, times)
        header = ["t", "S1", "S2", "S3", "norm", "S_sq"]
        cols = [times] + [np.full_like(times, v) for v in (s1, s2, s3)]
        default_eta = st.eta
    norm = np.sqrt(np.sum(states**2, axis=(-2, -1)))
    cols.append(norm)
    if cfg.case == 2:
        cols.append(np.full_like(times, ssq))
    if cfg.integrate:
        if cfg.eta == "i":
            eta = UNIT_I
        elif cfg.eta == "jphase":
            eta = ImaginaryUnit.jphase(cfg.alpha - cfg.beta)
        else:
            eta = default_eta
        substeps = max(1, math.ceil(10_000 / rows))
        path = spin.evolve_rk4_path(spin.QSpinor.from_array(states[0]), spin.hamiltonian(lc), eta, lc, t_max, rows, substeps)
        header += ["norm_rk4", "deviation"]
        cols.append(np.sqrt(np.sum(path**2, axis=(-2, -1))))
        cols.append(np.abs(path - states).max(axis=(-2, -1)))
    table = np.column_stack(cols)
    if (cfg.format or "csv") == "json":
        emit(cfg, _json_text({"suite": "precess", "case": cfg.case, "columns": header, "rows": table.tolist()}))
    else:
        emit(cfg, _csv_text(header, table))
    return EXIT_OK


def cmd_harmonics(cfg) -> int:
    ell, m = cfg.ell, cfg.m
    if ell < 0 or ell > MAX_ELL:
        raise UsageError(f"--ell must lie in 0..{MAX_ELL}")
    if m != int(m) or abs(m) > ell:
        raise UsageError("--m must be an integer with |m| <= ell")
    variant = cfg.variant
    if variant == "l1":
        raise UsageError("harmonics use --variant l2 or l3")
    spec = waves.SphericalHarmonicSpec(int(ell), int(m), variant, theta0=cfg.theta, gamma0=cfg.gamma0, omega0=cfg.omega0)
    n_phi = cfg.grid if cfg.grid is not None else 32
    if n_phi < 8:
        raise UsageError("--grid must be at least 8")
    table_grid = waves.SphereGrid(max(n_phi // 2, 4), n_phi)
    vals = waves.sample_harmonic(spec, table_grid).values
    norm = waves.harmonic_norm(spec)
    th, ph = table_grid.mesh()
    table = np.column_stack([th.ravel(), ph.ravel(), vals.reshape(-1, 4), np.full(th.size, norm)])
    header = ["theta", "phi", "w", "x_i", "y_j", "z_k", "normalization"]
    if (cfg.format or "csv") == "json":
        emit(cfg, _json_text({"suite": "harmonics", "ell": spec.ell, "m": spec.m, "variant": variant, "columns": header, "rows": table.tolist()}))
    else:
        emit(cfg, _csv_text(header, table))
    return EXIT_OK


def free_particle_report(spec: waves.LambdaSpec, n: int) -> dict:
    coarse = waves.eigen_residuals(spec, n)
    fine = waves.eigen_residuals(spec, 2 * n)
    eq = {"left": "a03", "right": "a03", "second": "a04"}
    out_checks, residuals, orders = [], {}, {}
    for key in coarse:
        residuals[key] = [coarse[key], fine[key]]
        if spec.m == 0:
            orders[key] = None
            c = checks.Check(f"{spec.variant}.{key}", eq[key], max(coarse[key], fine[key]), 1e-12)
        else:
            orders[key] = waves.convergence_order(coarse[key], fine[key])
            c = checks.Check(f"{spec.variant}.{key}.order", eq[key], abs(orders[key] - 2.0), 0.1)
        out_checks.append(c.to_dict())
    return {
        "suite": "free-particle",
        "variant": spec.variant,
        "m": spec.m,
        "grids": [n, 2 * n],
        "residuals": residuals,
        "orders": orders,
        "checks": out_checks,
        "all_pass": all(c["pass"] for c in out_checks),
    }


def cmd_free_particle(cfg) -> int:
    n = cfg.grid if cfg.grid is not None else 256
    if n < 8:
        raise UsageError("--grid must be at least 8")
    spec = waves.LambdaSpec(cfg.variant, cfg.m, cfg.theta, cfg.gamma0, cfg.omega0)
    try:
        rep = free_particle_report(spec, n)
    except BoundaryError as exc:
        raise UsageError(str(exc)) from None
    if (cfg.format or "json") == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["relation", "n", "residual"])
        for key, (r1, r2) in rep["residuals"].items():
            w.writerow([key, n, repr(r1)])
            w.writerow([key, 2 * n, repr(r2)])
        emit(cfg, buf.getvalue())
    else:
        emit(cfg, _json_text(rep))
    return EXIT_OK if rep["all_pass"] else EXIT_FAIL


COMMANDS = {
    "verify": cmd_verify,
    "precess": cmd_precess,
    "harmonics": cmd_harmonics,
    "free-particle": cmd_free_particle,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = resolve(args)
        return COMMANDS[cfg.command](cfg)
    except (UsageError, HQMError) as exc:
        print(f"hqm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BrokenPipeError:
        # reader went away (e.g. piped into head); keep the interpreter from complaining at exit
        devnull = os.open(os.devnull, os.O_WRONLY)
        os.dup2(devnull, sys.stdout.fileno())
        return EXIT_IO
    except OSError as exc:
        print(f"hqm: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point for the three workflows.

Subcommands
-----------
forward   convergence table of the Galerkin solver against the
          manufactured reference pair (CSV or JSON)
diagnose  stability constants of one member of the bilinear-form
          family (JSON)
inverse   noise sweep of the collage-distance coefficient recovery,
          one row per noise level (CSV or JSON)

All outputs embed the fully resolved configuration, floats are written
with 17 significant digits, and identical configurations produce
byte-identical files.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from fractions import Fraction

import numpy as np

from . import inverse as inv
from .assembly import FormCoefficients, assemble_system
from .forward import convergence_table
from .linalg import NotSPDError, SingularMatrixError
from .polynomials import manufactured_f, reference_psi0
from .stability import ConditionViolatedError, compute_constants, default_grams

__all__ = ["main", "build_parser"]

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

NUMERICAL_ERRORS = (SingularMatrixError, NotSPDError,
                    inv.RankDeficiencyError, ConditionViolatedError,
                    np.linalg.LinAlgError)


class ConfigError(ValueError):
    """Invalid command-line configuration."""


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def parse_real(text: str) -> float:
    """Decimal or exact fraction string such as '1/15'."""
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"cannot parse number {text!r}") from exc


def _parse_list(text: str, parse=parse_real):
    items = [s for s in text.split(",") if s.strip()]
    if not items:
        raise ConfigError("empty list argument")
    return [parse(s.strip()) for s in items]


def _parse_int(text: str) -> int:
    try:
        return int(text, 10)
    except ValueError as exc:
        raise ConfigError(f"cannot parse integer {text!r}") from exc


W_MODE_ALIASES = {
    "analytic": "analytic",
    "fd": "finite-difference",
    "finite-difference": "finite-difference",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mixedcollage",
        description="Perturbed mixed variational solver and collage estimator")
    sub = parser.add_subparsers(dest="command", required=True)

    fwd = sub.add_parser("forward", help="Galerkin convergence table")
    fwd.add_argument("--m", default="9,25,81",
                     help="comma-separated Galerkin dimensions")
    fwd.add_argument("--delta", default="1/15",
                     help="perturbation coefficient (decimal or fraction)")
    fwd.add_argument("--output", default=None, help="output path (default stdout)")
    fwd.add_argument("--format", choices=("csv", "json"), default="csv")

    diag = sub.add_parser("diagnose", help="stability constants (JSON)")
    diag.add_argument("--m", default="25", help="Galerkin dimension")
    diag.add_argument("--c1", default="1")
    diag.add_argument("--c2", default="1")
    diag.add_argument("--c3", default="0.25")
    diag.add_argument("--output", default=None)

    est = sub.add_parser("inverse", help="collage coefficient recovery sweep")
    est.add_argument("--noise", default="0,0.005,0.01,0.015,0.02",
                     help="comma-separated relative noise levels")
    est.add_argument("--trials", default="1")
    est.add_argument("--seed", default="0")
    est.add_argument("--w-mode", default="analytic",
                     choices=sorted(W_MODE_ALIASES))
    est.add_argument("--grid-n", default="9", help="sample grid size per axis")
    est.add_argument("--test-grid-n", default="9",
                     help="test-basis interior nodes per axis")
    est.add_argument("--delta", default="0.25",
                     help="perturbation coefficient of the data-generating run")
    est.add_argument("--degree", default=None,
                     help="polynomial fit degree (default grid-n - 1)")
    est.add_argument("--fd-step", default=None,
                     help="finite-difference step (default spacing^2)")
    est.add_argument("--output", default=None)
    est.add_argument("--format", choices=("csv", "json"), default="csv")
    return parser


def _write(path, text: str):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _csv(config: dict, header, rows) -> str:
    buf = io.StringIO()
    buf.write("# " + json.dumps(config, sort_keys=True) + "\n")
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def _json_doc(config: dict, header, rows) -> str:
    doc = {"config": config,
           "rows": [dict(zip(header, row)) for row in rows]}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def run_forward(args) -> str:
    m_list = _parse_list(args.m, _parse_int)
    if any(m < 1 for m in m_list):
        raise ConfigError("dimensions must be positive")
    delta = parse_real(args.delta)
    config = {"command": "forward", "m": m_list, "delta": delta,
              "format": args.format}
    reports = convergence_table(m_list, delta)
    header = ("m", "psiL2", "psiH10", "wL2", "wH10")
    rows = [(r.m, r.psi_l2, r.psi_h10, r.w_l2, r.w_h10) for r in reports]
    emit = _csv if args.format == "csv" else _json_doc
    return emit(config, header, rows)


def run_diagnose(args) -> str:
    m = _parse_int(args.m)
    if m < 1:
        raise ConfigError("m must be positive")
    coeffs = FormCoefficients(parse_real(args.c1), parse_real(args.c2),
                              parse_real(args.c3))
    config = {"command": "diagnose", "m": m, "c1": coeffs.c1,
              "c2": coeffs.c2, "c3": coeffs.c3}
    psi0 = reference_psi0()
    system = assemble_system(m, coeffs, manufactured_f(psi0, coeffs.c3))
    report = compute_constants(system, *default_grams(m))
    doc = dict(report.to_dict())
    doc = {k: (repr(v) if isinstance(v, float) and not np.isfinite(v) else v)
           for k, v in doc.items()}
    doc["config"] = config
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def run_inverse(args) -> str:
    levels = _parse_list(args.noise)
    if any(lv < 0 for lv in levels):
        raise ConfigError("noise levels must be nonnegative")
    trials = _parse_int(args.trials)
    seed = _parse_int(args.seed)
    w_mode = W_MODE_ALIASES[args.w_mode]
    grid_n = _parse_int(args.grid_n)
    test_grid_n = _parse_int(args.test_grid_n)
    delta = parse_real(args.delta)
    degree = None if args.degree is None else _parse_int(args.degree)
    fd_step = None if args.fd_step is None else parse_real(args.fd_step)
    if trials < 1:
        raise ConfigError("trials must be at least 1")
    if grid_n < 2 or test_grid_n < 2:
        raise ConfigError("grid sizes must be at least 2")

    config = {"command": "inverse", "noise": levels, "trials": trials,
              "seed": seed, "wMode": w_mode, "gridN": grid_n,
              "testGridN": test_grid_n, "delta": delta, "degree": degree,
              "fdStep": fd_step, "format": args.format}
    rows_stats = inv.noise_sweep(levels, trials, seed, w_mode,
                                 grid_n=grid_n, test_grid_n=test_grid_n,
                                 delta=delta, degree=degree, fd_step=fd_step)
    header = ("noise", "C1", "C2", "C3", "collageDistance")
    rows = [(r.noise_level, r.mean_c1, r.mean_c2, r.mean_c3, r.mean_distance)
            for r in rows_stats]
    emit = _csv if args.format == "csv" else _json_doc
    return emit(config, header, rows)


RUNNERS = {"forward": run_forward, "diagnose": run_diagnose,
           "inverse": run_inverse}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text = RUNNERS[args.command](args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NUMERICAL_ERRORS as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    _write(args.output, text)
    return 0


if __name__ == "__main__":
    sys.exit(main())

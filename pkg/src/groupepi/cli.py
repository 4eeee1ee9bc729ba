"""Command-line front end.

Subcommands: eval, oracle, region, check. Entropy inputs are always in
nats; ``--unit bits`` rescales every printed entropy or rate by 1/ln 2.
Exit codes: 0 pass, 1 violation found, 2 usage or domain error.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from decimal import Decimal
from pathlib import Path

import numpy as np

from .applications import (
    BroadcastSpec,
    broadcast_region,
    broadcast_region_gaussian,
    default_alpha_grid,
    helper_region,
    mgl_monte_carlo,
)
from .appendix import verify_all
from .binary import LN2
from .closed_form import f_gk, f_group
from .errors import GroupEPIError
from .groups import FiniteAbelianGroup, GroupDistribution
from .oracle import MinimizationConfig, convexity_scan, min_sum_entropy, min_sum_entropy_k

DIGITS = 12
WORKERS_ENV = "GROUPEPI_WORKERS"

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


def fmt(v) -> str:
    return f"{float(v):.{DIGITS}g}"


def _round(obj):
    """Round every float in a JSON-able structure to DIGITS significant digits."""
    if isinstance(obj, float):
        return float(fmt(obj)) if np.isfinite(obj) else None
    if isinstance(obj, (np.floating,)):
        return _round(float(obj))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    return obj


def _csv(header, rows) -> str:
    lines = [",".join(header)]
    for r in rows:
        lines.append(",".join("" if v is None else (fmt(v) if isinstance(v, (float, np.floating)) else str(v))
                              for v in r))
    return "\n".join(lines) + "\n"


def _emit(args, text: str):
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_json(args, obj):
    _emit(args, json.dumps(_round(obj), indent=2, sort_keys=False) + "\n")


def _scale(args) -> float:
    return 1.0 / LN2 if args.unit == "bits" else 1.0


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise GroupEPIError(f"cannot parse a comma-separated list of numbers from {text!r}") from None


def _default_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


# --- subcommands --------------------------------------------------------------


def cmd_eval(args) -> int:
    group = FiniteAbelianGroup.parse(args.group)
    s = _scale(args)
    if args.xs is not None:
        xs = _floats(args.xs)
        if not group.is_two_group:
            f_group(group, 0.0, 0.0)  # raises the unsupported-group error
        val = f_gk(group.exponent_n, xs)
        if args.format == "json":
            _emit_json(args, {"group": str(group), "unit": args.unit, "xs": [v * s for v in xs], "f": val * s})
        else:
            _emit(args, _csv(["xs", "f"], [[";".join(fmt(v * s) for v in xs), val * s]]))
        return EXIT_OK
    if args.x is None or args.y is None:
        raise GroupEPIError("eval needs --x and --y, or --xs")
    val = f_group(group, args.x, args.y)
    if args.format == "json":
        _emit_json(args, {"group": str(group), "unit": args.unit, "x": args.x * s, "y": args.y * s, "f": val * s})
    else:
        _emit(args, _csv(["x", "y", "f"], [[args.x * s, args.y * s, val * s]]))
    return EXIT_OK


def _config(args) -> MinimizationConfig:
    return MinimizationConfig(restarts=args.restarts, seed=args.seed)


def cmd_oracle(args) -> int:
    group = FiniteAbelianGroup.parse(args.group)
    cfg = _config(args)
    s = _scale(args)
    top = group.log_order
    if args.xs is not None:
        xs = _floats(args.xs)
        res = min_sum_entropy_k(group, xs, cfg)
        closed = f_gk(group.exponent_n, xs) if group.is_two_group else None
        gap = None if closed is None else res.value - closed
        obj = {"group": str(group), "unit": args.unit, "xs": [v * s for v in xs], "numeric": res.value * s,
               "closed_form": None if closed is None else closed * s, "gap": None if gap is None else gap * s,
               "converged": res.converged}
        if args.format == "json":
            _emit_json(args, obj)
        else:
            _emit(args, _csv(["xs", "closed_form", "numeric", "gap"],
                             [[";".join(fmt(v * s) for v in xs), obj["closed_form"], obj["numeric"], obj["gap"]]]))
        return EXIT_OK
    grid = np.linspace(0.0, top, args.grid)
    rows = []
    for x in grid:
        for y in grid:
            res = min_sum_entropy(group, x, y, cfg)
            closed = f_group(group, x, y) if group.is_two_group else None
            gap = None if closed is None else res.value - closed
            rows.append([x * s, y * s, None if closed is None else closed * s, res.value * s,
                         None if gap is None else gap * s])
    gaps = [abs(r[4]) for r in rows if r[4] is not None]
    max_gap = max(gaps) if gaps else None
    if args.format == "json":
        _emit_json(args, {"group": str(group), "unit": args.unit, "seed": args.seed,
                          "columns": ["x", "y", "closed_form", "numeric", "gap"], "rows": rows,
                          "max_abs_gap": max_gap})
    else:
        text = _csv(["x", "y", "closed_form", "numeric", "gap"], rows)
        text += f"# max_abs_gap={'' if max_gap is None else fmt(max_gap)}\n"
        _emit(args, text)
    return EXIT_OK


def _dist_from(obj, group) -> GroupDistribution:
    probs = [float(Decimal(str(v))) for v in obj]
    return GroupDistribution(group, np.array(probs))


def cmd_region(args) -> int:
    spec = json.loads(Path(args.spec).read_text())
    n = int(spec["n"])
    group = FiniteAbelianGroup.cyclic(2**n)
    alphas = default_alpha_grid(args.alphas)
    if args.kind == "broadcast":
        region = broadcast_region(
            BroadcastSpec(n, _dist_from(spec["p_z1"], group), _dist_from(spec["p_z2_tilde"], group)), alphas)
    elif args.kind == "broadcast-gaussian":
        region = broadcast_region_gaussian(n, _dist_from(spec["p_z1"], group), _dist_from(spec["p_z2"], group), alphas)
    else:
        region = helper_region(n, _dist_from(spec["p_z"], group), alphas)
    s = _scale(args)
    if args.format == "json":
        obj = region.to_json(scale=s)
        obj["unit"] = args.unit
        _emit_json(args, obj)
    else:
        _emit(args, region.to_csv(scale=s, digits=DIGITS))
    return EXIT_OK


def _scale_report(rep: dict, s: float, keys) -> dict:
    out = dict(rep)
    for k in keys:
        if out.get(k) is not None:
            out[k] = out[k] * s
    return out


def cmd_check(args) -> int:
    s = _scale(args)
    if args.kind in ("mgl-scalar", "mgl-vector"):
        kind = args.kind.split("-")[1]
        trials = args.trials if args.trials is not None else (10_000 if kind == "scalar" else 1_000)
        rep = mgl_monte_carlo(kind, trials, seed=args.seed, workers=args.workers)
        rep = _scale_report(rep, s, ["min_slack", "tolerance"])
        rep["violations"] = [{**v, "slack": v["slack"] * s} for v in rep["violations"]]
        passed = rep["passed"]
    elif args.kind == "convexity":
        group = FiniteAbelianGroup.parse(args.group or "z3")
        rep = convexity_scan(group, config=_config(args), resolution=args.resolution, tol_conv=args.tolerance)
        rep["x_grid"] = [v * s for v in rep["x_grid"]]
        for row in rep["rows"]:
            row["y"] *= s
            row["values"] = [v * s for v in row["values"]]
            row["min_second_difference"] *= s
        for v in rep["violations"]:
            v["y"] *= s
            v["x"] = [t * s for t in v["x"]]
            v["second_difference"] *= s
        passed = rep["consistent"]
    else:
        rep = verify_all(args.grid_size)
        passed = rep["passed"]
    rep = {"unit": args.unit, **rep}
    _emit_json(args, rep)
    if args.kind == "lemmas":
        for c in rep["claims"]:
            print(f"{'PASS' if c['passed'] else 'FAIL'}  {c['claim']}", file=sys.stderr)
    return EXIT_OK if passed else EXIT_VIOLATION


# --- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--unit", choices=("nats", "bits"), default="nats")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--output", "-o", help="write to this file instead of stdout")
    common.add_argument("--seed", type=int, default=1)
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="groupepi", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eval", parents=[common], help="closed-form minimum sum entropy")
    e.add_argument("--group", required=True, help="z<k> or a direct sum such as z2xz4")
    e.add_argument("--x", type=float)
    e.add_argument("--y", type=float)
    e.add_argument("--xs", help="comma-separated entropies for k summands")
    e.set_defaults(func=cmd_eval)

    o = sub.add_parser("oracle", parents=[common], help="numeric minimum vs closed form on a grid")
    o.add_argument("--group", required=True)
    o.add_argument("--grid", type=int, default=5, help="points per axis over [0, ln|G|]")
    o.add_argument("--xs", help="single k-summand query instead of a grid")
    o.add_argument("--restarts", type=int, default=MinimizationConfig.restarts)
    o.set_defaults(func=cmd_oracle)

    r = sub.add_parser("region", parents=[common], help="rate-region boundary")
    r.add_argument("--kind", required=True, choices=("broadcast", "broadcast-gaussian", "helper"))
    r.add_argument("--spec", required=True, help="JSON file with n and noise distributions")
    r.add_argument("--alphas", type=int, default=201, help="points in the alpha grid over [0, 1/2]")
    r.set_defaults(func=cmd_region)

    c = sub.add_parser("check", parents=[common], help="property checks; exit 1 on violation")
    c.add_argument("--kind", required=True, choices=("mgl-scalar", "mgl-vector", "convexity", "lemmas"))
    c.add_argument("--trials", type=int)
    c.add_argument("--group", help="group for convexity scans (default z3)")
    c.add_argument("--resolution", type=int, default=40)
    c.add_argument("--tolerance", type=float, default=1e-4)
    c.add_argument("--restarts", type=int, default=MinimizationConfig.restarts)
    c.add_argument("--grid-size", type=int, default=10_000)
    c.add_argument("--workers", type=int, default=_default_workers(),
                   help=f"worker processes (default from ${WORKERS_ENV}, else 1)")
    c.set_defaults(func=cmd_check)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if getattr(args, "tolerance", 1.0) <= 0:
        print("error: tolerance must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (GroupEPIError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

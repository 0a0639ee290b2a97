"""Command-line entry point: ``curveswarm {run,validate-gains,curve,metrics}``."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from . import config as config_mod
from .controller import validate_gains
from .embedding import CurveFamily, CurveSpec, EmbeddingError, circle_point, sample_curve
from .metrics import LogParseError, TrajectoryLog, summarize

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2
EXIT_NOT_CONVERGED = 3

log = logging.getLogger("curveswarm")


def _cmd_run(args) -> int:
    from .simulation import run

    try:
        cfg = config_mod.load(args.config, force=args.force)
    except config_mod.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    result = run(cfg, args.out)
    if result.all_failed:
        print("runtime fault: every agent failed", file=sys.stderr)
        return EXIT_RUNTIME
    s = result.summary
    print(json.dumps({"out": str(args.out), "converged": s.converged, "convergence_time": s.convergence_time}))
    if args.require_convergence and not s.converged:
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def _cmd_validate_gains(args) -> int:
    report = validate_gains(k_x=args.kx, k_v=args.kv)
    print(json.dumps(report.to_dict(), indent=2))
    return EXIT_OK


def _cmd_curve(args) -> int:
    try:
        spec = CurveSpec(CurveFamily(args.family), args.radius)
        rows = sample_curve(spec, args.samples)
    except (EmbeddingError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["phi", "cx", "cy", "x", "y", "z", "alpha", "beta"])
        for phi, x, y, z, a, b in rows:
            c = circle_point(spec.radius, phi)
            w.writerow([format(v, ".17g") for v in (phi, c.x, c.y, x, y, z, a, b)])
    finally:
        if args.out:
            fh.close()
    return EXIT_OK


def _cmd_metrics(args) -> int:
    path = Path(args.log)
    try:
        traj = TrajectoryLog.from_csv(path)
    except LogParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"cannot read log: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    cfg_path = Path(args.config) if args.config else path.with_name("config.yaml")
    spec, tol, z_off = None, config_mod.ScenarioConfig.convergence_tol, 0.0
    if cfg_path.exists():
        try:
            cfg = config_mod.load(cfg_path, force=True)
        except config_mod.ConfigError as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        spec = CurveSpec(cfg.family, cfg.r_d)
        tol, z_off = cfg.convergence_tol, cfg.altitude_offset
    try:
        summary = summarize(traj, spec, window=(args.t0, args.t1), tol=tol, z_offset=z_off)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(json.dumps(summary.to_dict(), sort_keys=True, indent=2))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="curveswarm", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="simulate a scenario and write a run directory")
    r.add_argument("--config", required=True)
    r.add_argument("--out", required=True)
    r.add_argument("--force", action="store_true", help="accept gains outside k_x > 0, k_v^2 > 4 k_x")
    r.add_argument("--require-convergence", action="store_true")
    r.set_defaults(func=_cmd_run)

    g = sub.add_parser("validate-gains", help="closed-loop eigenvalues for k_x, k_v")
    g.add_argument("--kx", type=float, required=True)
    g.add_argument("--kv", type=float, required=True)
    g.set_defaults(func=_cmd_validate_gains)

    c = sub.add_parser("curve", help="sample a curve family as CSV")
    c.add_argument("--family", required=True, choices=[f.value for f in CurveFamily if f is not CurveFamily.CUSTOM])
    c.add_argument("--radius", type=float, required=True)
    c.add_argument("--samples", type=int, required=True)
    c.add_argument("--out")
    c.set_defaults(func=_cmd_curve)

    m = sub.add_parser("metrics", help="summarize a trajectory CSV")
    m.add_argument("--log", required=True)
    m.add_argument("--t0", type=float)
    m.add_argument("--t1", type=float)
    m.add_argument("--config", help="scenario config (defaults to config.yaml next to the log)")
    m.set_defaults(func=_cmd_metrics)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

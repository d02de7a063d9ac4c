"""Command line front end: ``blottoga run | figure | validate``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import BlottoError
from .experiments import FIGURES, RunManifest, emit_figure_data, parse_spec, run_experiments
from .experiments.config import resolve_out_dir
from .experiments.runner import configure_logging


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="blottoga", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute every run an experiment spec defines")
    p_run.add_argument("spec")
    p_run.add_argument("--out", help="output directory (overrides $BLOTTOGA_OUT and the spec)")
    p_run.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    p_run.add_argument("--no-plots", action="store_true",
                       help="skip PNG rendering for figures listed in the spec")

    p_fig = sub.add_parser("figure", help="write CSV (and PNG) data for one figure")
    p_fig.add_argument("manifest", help="manifest.json or the directory holding it; '-' for none")
    p_fig.add_argument("figure_id", choices=sorted(FIGURES, key=int))
    p_fig.add_argument("--out", help="directory for figure files (default: <manifest dir>/figures)")
    p_fig.add_argument("--k", type=int, default=100, help="grid size for figure 2")
    p_fig.add_argument("--iterations", type=int, nargs="+",
                       help="snapshot iterations for figures 4 and 7")
    p_fig.add_argument("--no-plots", action="store_true")

    p_val = sub.add_parser("validate", help="parse a spec and list the runs it schedules")
    p_val.add_argument("spec")
    return parser


def cmd_run(args) -> int:
    spec = parse_spec(args.spec)
    manifest = run_experiments(spec, args.out, jobs=args.jobs)
    failed = [r for r in manifest.runs if r["status"] != "ok"]
    for r in failed:
        print(f"run {r['run_id']} failed: {r['error']}", file=sys.stderr)
    for fid in spec.outputs.figures:
        emit_figure_data(manifest, fid, plots=spec.outputs.plots and not args.no_plots)
    problems = manifest.validate()
    for p in problems:
        print(p, file=sys.stderr)
    print(f"{len(manifest.runs) - len(failed)}/{len(manifest.runs)} runs ok; manifest {manifest.path}")
    return 0 if not failed and not problems else 1


def cmd_figure(args) -> int:
    manifest = None if args.manifest == "-" else RunManifest.load(args.manifest)
    paths = emit_figure_data(manifest, args.figure_id, args.out, plots=not args.no_plots,
                             k=args.k, iterations=args.iterations)
    for p in paths:
        print(p)
    return 0


def cmd_validate(args) -> int:
    spec = parse_spec(args.spec)
    runs = spec.runs()
    summary = {
        "runs": len(runs),
        "points": len(spec.points()),
        "seeds": len(spec.seeds),
        "out_dir": str(resolve_out_dir(spec)),
        "game": spec.to_dict()["game"],
        "ga": spec.to_dict()["ga"],
    }
    print(json.dumps(summary, indent=1))
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    handler = {"run": cmd_run, "figure": cmd_figure, "validate": cmd_validate}[args.command]
    try:
        return handler(args)
    except BlottoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

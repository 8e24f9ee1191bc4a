"""Command-line entry point: ``tscc {verify,decode,sweep,correctability,export-lattice}``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .code import build_code, run_invariant_checks
from .lattice import build_colex, inflate, lattice_json
from .montecarlo import (
    SweepConfig,
    default_workers,
    estimate_threshold,
    point_seed,
    run_point,
    run_sweep,
    wilson_interval,
)

EXIT_OK, EXIT_USAGE, EXIT_VERIFY = 0, 1, 2

DEFAULT_GRIDS = {
    "partial": [0.12, 0.14, 0.16, 0.18, 0.20, 0.22, 0.24, 0.26, 0.30, 0.40],
    "maximal": [0.16, 0.20, 0.24, 0.30, 0.36, 0.40, 0.42, 0.44, 0.46, 0.48, 0.50, 0.52, 0.55],
    "correctability": [0.12, 0.14, 0.15, 0.16, 0.17, 0.18, 0.20],
}


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_sweep_flags(p: argparse.ArgumentParser, with_mode: bool) -> None:
    if with_mode:
        p.add_argument("--mode", choices=["partial", "maximal"])
    p.add_argument("--config", type=Path, help="JSON file with SweepConfig fields")
    p.add_argument("--distances", type=int, nargs="+")
    p.add_argument("--eps", type=float, nargs="+", help="erasure probabilities (ascending)")
    p.add_argument("--max-trials", type=int)
    p.add_argument("--target-failures", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--out", type=Path, help="JSON-lines results file")
    p.add_argument("--csv", type=Path, help="optional CSV mirror")
    p.add_argument("--quiet", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tscc", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="check every structural invariant")
    v.add_argument("--d", type=int, nargs="+", default=[4, 8])

    d = sub.add_parser("decode", help="Monte Carlo at a single erasure probability")
    d.add_argument("--d", type=int, required=True)
    d.add_argument("--mode", choices=["partial", "maximal"], required=True)
    d.add_argument("--eps", type=float, required=True)
    d.add_argument("--trials", type=int, default=10_000)
    d.add_argument("--target-failures", type=int, default=None)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--workers", type=int, default=None)

    s = sub.add_parser("sweep", help="decoder failure rates over distances and eps")
    _add_sweep_flags(s, with_mode=True)

    c = sub.add_parser("correctability", help="rank-criterion failure rates")
    _add_sweep_flags(c, with_mode=False)

    e = sub.add_parser("export-lattice", help="dump the lattice as JSON")
    e.add_argument("--d", type=int, required=True)
    e.add_argument("--out", type=Path)
    return parser


def _cmd_verify(args) -> int:
    ok = True
    for dist in args.d:
        print(f"d={dist}")
        try:
            code = build_code(dist, check=False)
        except ValueError as exc:
            print(f"  FAIL construction: {exc}")
            ok = False
            continue
        for res in run_invariant_checks(code):
            status = "PASS" if res.passed else "FAIL"
            detail = f" ({res.detail})" if res.detail else ""
            print(f"  {status} {res.name}{detail}")
            ok &= res.passed
    return EXIT_OK if ok else EXIT_VERIFY


def _cmd_decode(args) -> int:
    if not 0 <= args.eps <= 1 or args.trials < 1:
        print("tscc decode: eps must lie in [0, 1] and trials must be positive", file=sys.stderr)
        return EXIT_USAGE
    code = build_code(args.d)
    target = args.target_failures or args.trials + 1
    seed = point_seed(args.seed, args.d, args.eps)
    trials, failures = run_point(code, args.mode, args.eps, args.trials, target, seed,
                                 workers=args.workers or default_workers())
    lo, hi = wilson_interval(failures, trials)
    print(json.dumps({
        "d": args.d, "mode": args.mode, "eps": args.eps, "trials": trials, "failures": failures,
        "rate": failures / trials, "ci_lo": lo, "ci_hi": hi, "seed": args.seed,
    }, sort_keys=True))
    return EXIT_OK


def _sweep_config(args, mode: str) -> SweepConfig:
    data: dict = {}
    if args.config is not None:
        data.update(json.loads(args.config.read_text()))
    data.setdefault("mode", mode)
    overrides = {
        "distances": args.distances, "eps_grid": args.eps, "max_trials": args.max_trials,
        "target_failures": args.target_failures, "seed": args.seed, "workers": args.workers,
    }
    data.update({k: v for k, v in overrides.items() if v is not None})
    data.setdefault("distances", [4, 8, 16])
    data.setdefault("eps_grid", DEFAULT_GRIDS[data["mode"]])
    if data["mode"] == "correctability":
        data.setdefault("target_failures", data.get("max_trials", 10_000) + 1)
    return SweepConfig.from_dict(data)


def _run_sweep_command(args, mode: str | None) -> int:
    if mode is None and getattr(args, "config", None) is None:
        print("tscc sweep: --mode or --config is required", file=sys.stderr)
        return EXIT_USAGE
    try:
        cfg = _sweep_config(args, mode)
    except (ValueError, TypeError, KeyError, json.JSONDecodeError) as exc:
        print(f"tscc: invalid sweep configuration: {exc}", file=sys.stderr)
        return EXIT_USAGE

    def report(pt):
        if not args.quiet:
            print(f"d={pt.d} eps={pt.eps:.4f} trials={pt.trials} failures={pt.failures} "
                  f"rate={pt.rate:.4f} [{pt.ci_lo:.4f}, {pt.ci_hi:.4f}]", file=sys.stderr, flush=True)

    result = run_sweep(cfg, progress=report)
    if args.out is not None:
        result.write(args.out, args.csv)
    else:
        sys.stdout.write(result.jsonl())
    if len(result.distances) >= 2:
        print(f"threshold estimate: {estimate_threshold(result)}", file=sys.stderr)
    return EXIT_OK


def _cmd_export(args) -> int:
    try:
        data = lattice_json(inflate(build_colex(args.d)))
    except ValueError as exc:
        print(f"tscc export-lattice: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = json.dumps(data, indent=1)
    if args.out is not None:
        args.out.write_text(text + "\n")
    else:
        print(text)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command == "verify":
        return _cmd_verify(args)
    if args.command == "decode":
        return _cmd_decode(args)
    if args.command == "sweep":
        return _run_sweep_command(args, args.mode)
    if args.command == "correctability":
        return _run_sweep_command(args, "correctability")
    return _cmd_export(args)


if __name__ == "__main__":
    sys.exit(main())

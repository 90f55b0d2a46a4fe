"""Command-line front end: ``run``, ``sweep`` and ``verify``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from .config import load_config
from .errors import ConfigError, RegimeError, SolverError
from .runner import EXIT_AUDIT_FAIL, EXIT_CONFIG, EXIT_PASS, EXIT_SOLVER, run, sweep
from .suites import SUITES, run_suite

log = logging.getLogger("kirchhoff_lab")


def _ladder(text: str):
    try:
        values = tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad ladder {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty ladder")
    return values


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kirchhoff-lab", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in (("run", "solve, audit and write CSV/JSON artifacts"),
                        ("sweep", "ladder statistics and convergence fit only")):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("config", type=Path)
        sp.add_argument("--out", type=Path, default=None, help="output directory (default: ./out/<config stem>)")
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--horizon", type=float, default=None)
        sp.add_argument("--ladder", type=_ladder, default=None, help="comma-separated epsilons")
    vp = sub.add_parser("verify", help="run a named acceptance suite")
    vp.add_argument("suite", help=f"one of: {', '.join(list(SUITES) + ['all'])}")
    vp.add_argument("--out", type=Path, default=None, help="also write the verdict JSON here")
    return p


def _experiment(args) -> int:
    try:
        cfg = load_config(args.config)
        out = args.out if args.out is not None else Path("out") / args.config.stem
        cfg = cfg.with_overrides(args.horizon, args.ladder, str(out))
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        result = (run if args.command == "run" else sweep)(cfg, threads=args.threads)
    except (ConfigError, RegimeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    summary = result.summary
    for row in summary["ladder"]:
        print(f"eps={row['epsilon']:<10g} statistic/eps^2={row['normalized_statistic']}  {row['verdict']}")
    for fit in summary["fits"]:
        print(f"convergence slope {fit['exponent']:.4f} (target {fit['target']} +- {fit['tolerance']}): "
              f"{fit['verdict']}")
    print(f"verdict: {summary['verdict']}  ({cfg.out_dir})")
    return result.exit_code


def _verify(args) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    if args.suite != "all" and args.suite not in SUITES:
        print(f"unknown suite {args.suite!r}; choose from {', '.join(list(SUITES) + ['all'])}", file=sys.stderr)
        return EXIT_CONFIG
    results = []
    try:
        for name in names:
            res = run_suite(name)
            print(res.line(), file=sys.stderr)
            results.append(res)
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    passed = all(r.passed for r in results)
    verdict = {"verdict": "pass" if passed else "fail", "suites": [r.to_dict() for r in results]}
    text = json.dumps(verdict, indent=2)
    print(text)
    if args.out is not None:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(text + "\n")
    return EXIT_PASS if passed else EXIT_AUDIT_FAIL


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_PASS
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.command == "verify":
        return _verify(args)
    return _experiment(args)


if __name__ == "__main__":
    sys.exit(main())

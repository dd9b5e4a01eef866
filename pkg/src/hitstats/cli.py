"""Command line entry point.

Exit codes: 0 all checks passed, 1 a statistical check failed,
2 usage error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

import numpy as np

from .compound import ClusterSpectrum, CompoundPoisson, Poisson, PolyaAeppli, law_label, law_table
from .harness import PRESETS, ConfigError, emit, load_config, preset_config, run_config, summary_text, sweep
from .measure import density_to_csv, estimate_density
from .dynamics import PerturbedExpanding, PomeauManneville

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2, 3


def _config(source: str, args):
    cfg = preset_config(source) if source in PRESETS else load_config(source)
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.trials is not None:
        changes["trials"] = args.trials
    if args.threads is not None:
        changes["threads"] = args.threads
    cfg = dataclasses.replace(cfg, **changes)
    if args.set:
        from .harness import apply_overrides

        pairs = dict(kv.split("=", 1) for kv in args.set)
        cfg = apply_overrides(cfg, pairs)
    return cfg


def _common(p):
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--threads", type=int)
    p.add_argument("--out", type=Path)
    p.add_argument("--format", default="csv")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hitstats", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a preset or config file")
    run.add_argument("source", help=f"preset ({', '.join(PRESETS)}) or config file")
    _common(run)

    sw = sub.add_parser("sweep", help="run a rho or n sweep")
    sw.add_argument("source")
    _common(sw)

    den = sub.add_parser("density", help="estimate and cache an invariant density")
    den.add_argument("map", choices=["pm", "perturbed"])
    den.add_argument("--alpha", type=float, default=0.5)
    den.add_argument("--eps", type=float, default=0.1)
    den.add_argument("--bins", type=int, default=1024)
    den.add_argument("--length", type=int, default=4_000_000)
    den.add_argument("--seed", type=int, default=0)
    den.add_argument("--out", type=Path, required=True)

    pmf = sub.add_parser("pmf", help="print a predicted law table")
    pmf.add_argument("law", choices=["poisson", "polya-aeppli", "compound-poisson"])
    pmf.add_argument("--t", type=float, default=1.0)
    pmf.add_argument("--theta", type=float, default=0.25)
    pmf.add_argument("--lambdas", help="comma-separated cluster probabilities")
    pmf.add_argument("--k-max", type=int, default=20)
    return ap


def _law(args):
    if args.law == "poisson":
        return Poisson(args.t)
    if args.law == "polya-aeppli":
        return PolyaAeppli(args.t, args.theta)
    if not args.lambdas:
        raise ConfigError("compound-poisson needs --lambdas")
    return CompoundPoisson(args.t, ClusterSpectrum(np.array([float(x) for x in args.lambdas.split(",")])))


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        if args.command == "pmf":
            law = _law(args)
            print(f"# {law_label(law)}")
            for k, v in enumerate(law_table(law, args.k_max)):
                print(f"{k}\t{v:.12g}")
            return EXIT_OK
        if args.command == "density":
            m = PomeauManneville(args.alpha) if args.map == "pm" else PerturbedExpanding(args.eps)
            density_to_csv(estimate_density(m, args.bins, args.length, seed=args.seed), args.out)
            print(f"wrote {args.out}")
            return EXIT_OK
        cfg = _config(args.source, args)
        if args.format not in ("csv",):
            raise ConfigError(f"unknown output format {args.format!r}")
        if args.command == "run":
            result = run_config(cfg)
            print(summary_text(result), end="")
            ok = result.passed
        else:
            result = sweep(cfg)
            for v, r in zip(result.points, result.reports):
                print(f"{v!r}: N={r.horizon} TV={r.tv} {'PASS' if r.passed else 'FAIL'}")
            if result.slope is not None:
                print(f"log-log slope of N vs n: {result.slope:.4f}")
            ok = all(r.passed for r in result.reports) and result.tv_nonincreasing is not False
        if args.out is not None:
            emit(result, args.out, args.format)
        return EXIT_OK if ok else EXIT_FAIL
    except (ConfigError, FileNotFoundError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())

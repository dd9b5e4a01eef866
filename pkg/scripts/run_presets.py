"""Run every preset (or a chosen subset) and write one output directory each."""

import argparse
from pathlib import Path

from hitstats.harness import PRESETS, emit, run_preset, summary_text


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("presets", nargs="*", default=list(PRESETS))
    ap.add_argument("--out", type=Path, default=Path("runs"))
    ap.add_argument("--seed", type=int)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--set", action="append", default=[], metavar="KEY=VALUE")
    args = ap.parse_args()
    overrides = dict(kv.split("=", 1) for kv in args.set)
    for name in args.presets:
        r = run_preset(name, overrides, seed=args.seed, threads=args.threads)
        print(f"== {name}")
        print(summary_text(r), end="")
        emit(r, args.out / name)


if __name__ == "__main__":
    main()

"""Command-line entry point: `unisym run <spec-file>` executes a
Monte-Carlo method comparison, `unisym bench <spec-file>` times the
iterative methods. Flags override the corresponding config keys.
"""

from __future__ import annotations

import argparse
import sys

from .harness import METHODS, bench, load_run_spec, run_experiment


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("spec_file", help="YAML run spec (flat key-value)")
    p.add_argument("--out", metavar="DIR", help="output directory override")
    p.add_argument("--trials", type=int, metavar="N", help="trial count override")
    p.add_argument("--seed", type=int, metavar="N", help="base seed override")
    p.add_argument("--methods", metavar="a,b,c",
                   help=f"comma-separated subset of {','.join(METHODS)}")


def _overrides(args: argparse.Namespace) -> dict:
    out: dict = {}
    if args.out is not None:
        out["output_dir"] = args.out
    if args.trials is not None:
        out["trials"] = args.trials
    if args.seed is not None:
        out["seed0"] = args.seed
    if args.methods is not None:
        out["methods"] = [s.strip() for s in args.methods.split(",") if s.strip()]
    return out


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="unisym",
        description="Monte-Carlo harness for rate maximization over "
                    "unitary symmetric surface responses")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_common(sub.add_parser("run", help="run the method comparison"))
    _add_common(sub.add_parser("bench", help="time the iterative methods"))
    args = parser.parse_args(argv)

    try:
        spec = load_run_spec(args.spec_file, _overrides(args))
        if args.command == "run":
            result = run_experiment(spec)
            for method in spec.methods:
                for M in spec.sweep:
                    cell = result.summary[method][str(M)]
                    if cell is None:
                        print(f"{method:10s} M={M:<4d} inapplicable")
                    else:
                        print(f"{method:10s} M={M:<4d} "
                              f"mean {cell['mean_rate_bits']:.3f} bits "
                              f"(std {cell['std_rate_bits']:.3f}, "
                              f"iters {cell['mean_iters']:.1f})")
            print(f"results: {result.results_csv}")
            print(f"summary: {result.summary_json}")
        else:
            rows, path = bench(spec)
            for r in rows:
                print(f"{r.method:10s} M={r.M:<4d} "
                      f"median iter {r.median_iter_ms:.3f} ms "
                      f"(total {r.total_ms:.0f} ms)")
            print(f"bench: {path}")
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point: ``kernrom <command> --config FILE --out DIR``."""

from __future__ import annotations

import argparse
import sys

from threadpoolctl import threadpool_limits

from .config import ExperimentConfig, load_config
from .errors import KernromError
from .harness import COMMANDS

DESCRIPTIONS = {
    "snapshots": "integrate the full model at the training and test parameters",
    "reduce": "build POD or quadratic-manifold reductions from stored snapshots",
    "train": "fit ROMs on every stored reduction",
    "simulate": "simulate trained ROMs at the test parameter and record errors",
    "bound": "evaluate a posteriori error bounds for kernel and intrusive ROMs",
    "sweep": "run the full reduction/ROM sweep in memory and write sweep.csv",
}


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kernrom", description="Kernel-based reduced-order model experiments."
    )
    parser.add_argument("--threads", type=_positive_int, default=None,
                        help="limit BLAS/LAPACK threads")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in DESCRIPTIONS.items():
        cmd = sub.add_parser(name, help=text, description=text)
        cmd.add_argument("--config", help="key = value configuration file (defaults if omitted)")
        cmd.add_argument("--out", required=True, help="artifact directory")
        cmd.add_argument("--threads", type=_positive_int, default=argparse.SUPPRESS,
                         help="limit BLAS/LAPACK threads")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else ExperimentConfig()
        with threadpool_limits(limits=args.threads):
            COMMANDS[args.command](cfg, args.out)
    except (KernromError, OSError) as exc:
        print(f"kernrom {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

    nhrod run CONFIG
    nhrod converge CONFIG --levels 17,33,65

Exit status: 0 on success, 1 on a usage or configuration error, 2 when the
integration produces non-finite values.
"""
from __future__ import annotations

import argparse
import logging
import sys
import warnings

from .config import ConfigError, load_config
from .simulate import NumericalAbort, convergence, run

log = logging.getLogger("nhrod")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _levels(text: str) -> list[int]:
    try:
        levels = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not levels:
        raise argparse.ArgumentTypeError("need at least one level")
    return levels


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nhrod", description="Simulate the rolling planar Cosserat rod.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    p_run = sub.add_parser("run", help="run a simulation and write diagnostics/snapshots")
    p_run.add_argument("config")
    p_conv = sub.add_parser("converge", help="refinement study against the exact standing wave")
    p_conv.add_argument("config")
    p_conv.add_argument("--levels", type=_levels, required=True, help="node counts, e.g. 17,33,65")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(name)s: %(message)s")
    logging.captureWarnings(True)
    warnings.simplefilter("default")
    try:
        config = load_config(args.config)
        if args.command == "run":
            summary = run(config)
            last = summary.last
            log.info(
                "%d steps, %d snapshots; t=%.6g E=%.10g c1_max=%.3e c2_max=%.3e",
                summary.n_steps, summary.n_snapshots, last.t, last.energy, last.c1_max, last.c2_max,
            )
        else:
            print("n_nodes,dt,error,order")
            for row in convergence(config, args.levels):
                order = "" if row.order is None else f"{row.order:.6f}"
                print(f"{row.n_nodes},{row.dt:.17g},{row.error:.17g},{order}")
    except ConfigError as exc:
        print(f"nhrod: config error: {exc}", file=sys.stderr)
        return 1
    except NumericalAbort as exc:
        print(f"nhrod: numerical abort: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"nhrod: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

#!/usr/bin/env python3
"""
Fractional reaction-diffusion splitting solver: command-line entry point.

Subcommands:
    simulate          run a configured problem and write its artifacts
    converge          self-convergence table over splitting periods
    kernel-table      tabulate g_β and G_{σ,β}(t, ·)
    invariant-audit   audit a run against its invariant region
    asymptote         compare boundary limits with the reaction ODE

Exit codes: 0 ok, 2 config/parameter error, 3 blow-up, 4 region violation, 1 unexpected.
"""

import argparse
import logging
import os
import sys
from typing import List, Optional

from dotenv import load_dotenv

from harness.config import load_run_config
from harness.runner import run_asymptote, run_audit, run_converge, run_kernel_table, run_simulate
from harness.serialization import write_kernel_table
from utils.errors import BlowUpError, FracSplitError, RegionViolationError
from utils.logger import configure_logging

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_CONFIG = 2
EXIT_BLOW_UP = 3
EXIT_REGION = 4

logger = logging.getLogger(__name__)


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """Parse command line arguments."""
    parser = argparse.ArgumentParser(description="Fractional reaction-diffusion Lie-Trotter splitting solver")
    parser.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
                        default=os.getenv("LOG_LEVEL", "INFO"), help="Logging level")
    subparsers = parser.add_subparsers(dest="command", required=True)

    def run_parser(name: str, help_text: str) -> argparse.ArgumentParser:
        sub = subparsers.add_parser(name, help=help_text)
        sub.add_argument("--config", required=True, help="Run document (JSON)")
        sub.add_argument("--out", help="Output directory (overrides output_dir of the config)")
        sub.add_argument("--seed", type=int, help="Seed for random initial data (overrides the config)")
        sub.add_argument("--threads", type=int, default=1, help="Worker threads (speed only)")
        sub.add_argument("--progress", action="store_true", help="Show progress bars")
        return sub

    run_parser("simulate", "Run a configured problem")
    converge = run_parser("converge", "Self-convergence study")
    converge.add_argument("--h-list", type=float, nargs="+", help="Decreasing splitting periods")
    audit = run_parser("invariant-audit", "Audit a run against its invariant region")
    audit.add_argument("--trajectory", help="Audit an existing run directory instead of simulating")
    run_parser("asymptote", "Boundary-limit deviation series")

    table = subparsers.add_parser("kernel-table", help="Tabulate the stable density and heat kernel")
    table.add_argument("--beta", type=float, required=True)
    table.add_argument("--sigma", type=float, default=1.0)
    table.add_argument("--dim", type=int, default=1)
    table.add_argument("--t", type=float, default=1.0)
    table.add_argument("--range", type=float, nargs=2, default=[-20.0, 20.0], metavar=("XMIN", "XMAX"))
    table.add_argument("--samples", type=int, default=2001)
    table.add_argument("--out", help="CSV file (stdout when omitted)")
    return parser.parse_args(argv)


def dispatch(args: argparse.Namespace) -> int:
    if args.command == "kernel-table":
        table = run_kernel_table(args.beta, args.sigma, args.dim, args.t, tuple(args.range), args.samples,
                                 out_path=args.out)
        if args.out is None:
            write_kernel_table(sys.stdout, table)
        return EXIT_OK

    config = load_run_config(args.config, overrides={"seed": args.seed, "output_dir": args.out})
    out_dir = config.output_dir
    if out_dir is not None:
        configure_logging(args.log_level, log_dir=out_dir)

    if args.command == "simulate":
        result = run_simulate(config, out_dir, threads=args.threads, progress=args.progress)
        logger.info(f"final sup norm {result.trajectory.final.sup_norm():.6g}")
    elif args.command == "converge":
        table = run_converge(config, h_list=args.h_list, out_dir=out_dir, threads=args.threads)
        print(table.to_string(index=False))
    elif args.command == "invariant-audit":
        report = run_audit(config, out_dir, threads=args.threads, trajectory_dir=args.trajectory,
                           progress=args.progress)
        print(report.to_json())
    elif args.command == "asymptote":
        series = run_asymptote(config, out_dir, threads=args.threads, progress=args.progress)
        print(series.to_string(index=False))
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point."""
    load_dotenv()
    args = parse_args(argv)
    configure_logging(args.log_level)
    try:
        return dispatch(args)
    except BlowUpError as e:
        logger.error(f"blow-up: {e} (step {e.step}, last finite time {e.last_finite_time})")
        return EXIT_BLOW_UP
    except RegionViolationError as e:
        logger.error(f"region violation: {e}")
        return EXIT_REGION
    except (FracSplitError, ValueError) as e:
        logger.error(f"invalid configuration or parameters: {e}")
        return EXIT_CONFIG
    except Exception as e:
        logger.exception(f"unexpected failure: {e}")
        return EXIT_UNEXPECTED


if __name__ == "__main__":
    sys.exit(main())

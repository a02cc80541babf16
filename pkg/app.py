import argparse
import logging
import sys

from biquant import __version__, builtins, commands
from biquant.errors import BiquantError, ParseError
from biquant.settings import Settings

logger = logging.getLogger("biquant")

LOG_LEVELS = ["WARNING", "INFO", "DEBUG"]


def build_parser():
    # Options shared by every subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", nargs="?", help="algebra definition file")
    common.add_argument("--builtin", help=f"built-in algebra instead of a file ({', '.join(builtins.names())})")
    common.add_argument("--subalgebra", help="name of the subalgebra h (default: first declared)")
    common.add_argument("--character", help="name of the character on h (default: first one on h)")
    common.add_argument("--seed", type=int, help="random seed (default 0, or BIQUANT_SEED)")
    common.add_argument("--workers", type=int, help="worker threads (default 1, or BIQUANT_WORKERS)")
    common.add_argument("--box", type=int, help="half-width of the sampling box (default 20)")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")
    common.add_argument("--csv", metavar="DIR", help="also write the report tables as CSV files into DIR")
    common.add_argument("--output", metavar="PATH", help="also write the JSON report to PATH")

    parser = argparse.ArgumentParser(
        prog="biquant",
        description="Exact invariants and characters of quotients of enveloping algebras of nilpotent Lie algebras",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    sub.add_parser("validate", parents=[common], help="check brackets, Jacobi identity and nilpotency")

    p = sub.add_parser("orbits", parents=[common], help="test the lagrangian condition on sampled forms")
    p.add_argument("--samples", type=int, help="number of sampled forms (default 8)")

    p = sub.add_parser("invariants", parents=[common], help="basis of the invariants up to a degree")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--family", action="store_true", help="also compute the family over Q[t] for t·λ")
    p.add_argument("--specialize", metavar="t=V", help="specialize the family at t = V (implies --family)")

    p = sub.add_parser("character", parents=[common], help="evaluate the characters at a declared form")
    p.add_argument("--form", required=True)
    p.add_argument("--method", choices=["ct", "polarization", "both"], default="both")
    p.add_argument("--degree", type=int, required=True)

    p = sub.add_parser("compare", parents=[common], help="compare both characters at sampled forms")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--samples", type=int, help="number of sampled forms (default 8)")

    p = sub.add_parser("example-check", parents=[common],
                       help="check the change-of-supplement identities on the five-dimensional example")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--trials", type=int, default=5)

    p = sub.add_parser("supplement-map", parents=[common], help="matrix of the change of supplement")
    p.add_argument("--from", dest="source_supplement", required=True,
                   help="declared subspace, 'canonical' or 'polarization:FORM'")
    p.add_argument("--to", dest="target_supplement", required=True)
    p.add_argument("--degree", type=int, required=True)
    return parser


def check_arguments(parser, args):
    if args.command != "example-check" and not args.file and not args.builtin:
        parser.error("give an algebra file or --builtin NAME")
    if args.file and args.builtin:
        parser.error("give either an algebra file or --builtin, not both")
    if getattr(args, "degree", 0) < 0:
        parser.error("--degree must be non-negative")
    if getattr(args, "trials", 1) < 1:
        parser.error("--trials must be at least 1")


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    check_arguments(parser, args)
    try:
        settings = Settings.from_env().updated(
            seed=args.seed,
            workers=args.workers,
            box=args.box,
            samples=getattr(args, "samples", None),
        )
        level = LOG_LEVELS[min(args.verbose, 2)] if args.verbose else settings.log_level.upper()
        logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
        report = commands.run(args, settings)
        print(report.to_json())
        if args.output:
            report.write(args.output)
        if args.csv:
            report.export_csv(args.csv)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BiquantError as exc:
        logger.debug("command failed", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

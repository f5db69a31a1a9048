"""Command line driver: ``bpalg run`` and ``bpalg describe``."""

from __future__ import annotations

import argparse
import json
import sys

from .experiment import OUT_ENV, SpecError, describe, load_spec, run

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bpalg", description="Norm brackets and verification suites on finite groups.")
    sub = parser.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run an experiment spec")
    r.add_argument("--spec", required=True, help="JSON spec file")
    r.add_argument("--seed", type=_u64, default=None, help="override the seed in the spec file")
    r.add_argument("--out", default=None, help=f"output directory (default ${OUT_ENV} or ./bpalg-out)")
    r.add_argument("--jobs", type=int, default=1, help="worker processes")
    r.add_argument("--override", action="append", default=[], metavar="KEY=VALUE",
                   help="set a spec field, dotted keys allowed, value parsed as JSON when possible")
    r.add_argument("--quiet", action="store_true", help="do not echo the CSV")
    d = sub.add_parser("describe", help="dump a group, representation or builtin function")
    d.add_argument("object", help='e.g. "Z3", "Z3:regular", "S3:chi1", "Z2:delta_e"')
    d.add_argument("--p", default="2", help="exponent for representations")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "describe":
        try:
            print(json.dumps(describe(args.object, args.p), indent=1))
        except KeyError as exc:
            print(f"error: {exc.args[0]}", file=sys.stderr)
            return EXIT_USAGE
        return EXIT_OK
    if args.jobs < 1:
        print("error: --jobs must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        spec = load_spec(args.spec, seed=args.seed, overrides=args.override, out_dir=args.out)
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    result = run(spec, jobs=args.jobs)
    if not args.quiet:
        sys.stdout.write(result.csv_text)
    for row in result.failures:
        print(f"FAIL {row['group']} p={row['p']} {row['function']} {row['suite']}: "
              f"lower={row['lower']!r} upper={row['upper']!r} oracle={row['oracle']!r}", file=sys.stderr)
    print(f"wrote {result.out_dir}", file=sys.stderr)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())

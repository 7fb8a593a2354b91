"""``prevreact`` command line.

Exit codes: 0 success, 2 invalid configuration, 3 no finite optimum, 4 I/O error.
"""
import argparse
import csv
import io
import logging
import math
import sys

from .config import load_config
from .exceptions import NoFiniteOptimumError, ValidationError
from .experiments import HINTS, RUNNERS

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4

log = logging.getLogger("prevreact")


def format_cell(x):
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, int)) and not isinstance(x, float):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".16e")


def render_csv(table):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([format_cell(x) for x in row])
    return buf.getvalue()


def build_parser():
    parser = argparse.ArgumentParser(
        prog="prevreact",
        description="Preventive vs. reactive defense allocation under imperfect sensing.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in RUNNERS:
        cmd = sub.add_parser(name, help=HINTS[name])
        cmd.add_argument("--config", help="YAML experiment file (defaults built in)")
        cmd.add_argument("--out", required=True, help="CSV output path, '-' for stdout")
        cmd.add_argument("--seed", type=int, help="override the config seed")
        cmd.add_argument("--threads", type=int, default=1, help="worker threads for sweeps")
        cmd.add_argument("--hints", action="store_true",
                         help="also write <out>.hints.txt with plotting hints")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        config = load_config(args.config)
        if args.seed is not None:
            if args.seed < 0:
                raise ValidationError("--seed must be nonnegative")
            config = config.with_seed(args.seed)
        if args.threads < 1:
            raise ValidationError("--threads must be >= 1")
        table = RUNNERS[args.command](config, threads=args.threads)
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_IO
    except NoFiniteOptimumError as exc:
        log.error("%s", exc)
        return EXIT_NUMERIC
    except ValidationError as exc:
        log.error("invalid configuration: %s", exc)
        return EXIT_CONFIG

    text = render_csv(table)
    try:
        if args.out == "-":
            sys.stdout.write(text)
        else:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
            if args.hints:
                with open(args.out + ".hints.txt", "w", encoding="utf-8", newline="") as fh:
                    fh.write(f"{args.command}: {HINTS[args.command]}\n")
                    fh.write("columns: " + ", ".join(table.columns) + "\n")
    except OSError as exc:
        log.error("cannot write output: %s", exc)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

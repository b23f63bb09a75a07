"""Command-line entry point: ``tammes <subcommand> [flags]``.

Exit codes: 0 success, 1 usage error, 2 runtime failure, 3 I/O or parse error.
Machine-readable output goes to ``--out`` (stdout by default); diagnostics go
to stderr.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from . import __version__
from .analyzer import (
    ParseError,
    RaggedRows,
    angle_stats,
    histogram_csv,
    load_weight_matrix,
    matrix_csv,
)
from .bench import compare_report, rows_to_dict, run_table
from .core import TammesError, TooFewPoints, pointset_to_dict
from .demo import DemoConfig, train_mlp
from .losses import LossKind, gradient_curve_table
from .optimizer import NonFiniteLoss, OptimizerConfig, solve
from .simplex import regular_simplex

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}\n{self.format_usage()}")


def _bool(text: str) -> bool:
    low = text.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _rows(text: str):
    """``all`` or ``d,n[;d,n...]``."""
    if text == "all":
        return "all"
    pairs = []
    for chunk in text.replace(" ", "").split(";"):
        try:
            d, n = chunk.split(",")
            pairs.append((int(d), int(n)))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad row selector {chunk!r}; use d,n;d,n") from None
    return pairs


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=_u64, default=0)
    common.add_argument("--out", default="-", help="output path (default: stdout)")
    common.add_argument("-v", "--verbose", action="store_true", help="progress on stderr")

    def fmt(p, choices, default):
        p.add_argument("--format", choices=choices, default=default)

    parser = _Parser(prog="tammes", description="Spread points on the hypersphere by maximizing minimal angles.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("solve", parents=[common], help="optimize n points in R^d")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--loss", choices=["mma", "cosine", "rf", "log"], default="mma")
    p.add_argument("--s", type=float, default=2.0, help="Riesz-Fisher exponent")
    p.add_argument("--iters", type=int, default=10000)
    p.add_argument("--lr", type=float, default=0.1)
    p.add_argument("--momentum", type=float, default=0.9)
    p.add_argument("--patience", type=int, default=1000)
    p.add_argument("--factor", type=float, default=0.2)
    fmt(p, ["json", "csv"], "json")

    p = sub.add_parser("simplex", parents=[common], help="exact regular simplex for d >= n-1")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    fmt(p, ["json", "csv"], "json")

    p = sub.add_parser("bench", parents=[common], help="loss-function benchmark table")
    p.add_argument("--seeds", type=int, default=3)
    p.add_argument("--rows", type=_rows, default="all")
    p.add_argument("--include-600", action="store_true")
    p.add_argument("--iters", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1)
    fmt(p, ["csv", "md", "json"], "csv")

    p = sub.add_parser("gradcurve", parents=[common], help="per-pair gradient norm versus angle")
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--samples", type=int, default=500)
    p.add_argument("--wnorm", type=float, default=1.0)
    fmt(p, ["csv"], "csv")

    p = sub.add_parser("analyze", parents=[common], help="pairwise-angle statistics of a weight matrix")
    p.add_argument("--in", dest="input", required=True, help="input path, or - for stdin")
    p.add_argument("--format-in", choices=["csv", "json"], default=None)
    p.add_argument("--threshold", type=float, default=0.2)
    p.add_argument("--bins", type=int, default=40)
    fmt(p, ["json", "csv"], "json")

    p = sub.add_parser("demo", parents=[common], help="train the toy classifier with a regularizer")
    p.add_argument("--reg", choices=["none", "mma", "orthogonal", "rf", "log"], default="mma")
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.add_argument("--s", type=float, default=2.0)
    p.add_argument("--include-output", type=_bool, default=True)
    p.add_argument("--epochs", type=int, default=200)
    p.add_argument("--dump-layers", default=None, metavar="DIR")
    fmt(p, ["json", "md"], "json")
    return parser


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def cmd_solve(args) -> tuple[str, int]:
    kind = LossKind(args.loss, s=args.s)
    config = OptimizerConfig(
        n=args.n,
        d=args.d,
        loss=kind,
        iterations=args.iters,
        lr0=args.lr,
        momentum=args.momentum,
        plateau_patience=args.patience,
        plateau_factor=args.factor,
        seed=args.seed,
    )
    result = solve(config)
    if args.format == "csv":
        return matrix_csv(result.final_points), EXIT_OK
    return _json(result.to_dict()), EXIT_OK


def cmd_simplex(args) -> tuple[str, int]:
    points = regular_simplex(args.n, args.d)
    if args.format == "csv":
        return matrix_csv(points), EXIT_OK
    return _json(pointset_to_dict(points)), EXIT_OK


def cmd_bench(args) -> tuple[str, int]:
    rows = run_table(
        seeds=args.seeds,
        rows=args.rows,
        iterations=args.iters,
        base_seed=args.seed,
        include_600=args.include_600,
        jobs=args.jobs,
    )
    failed = [(r.d, r.n, k, msg) for r in rows for k, msg in r.failed.items()]
    for d, n, k, msg in failed:
        print(f"cell d={d} n={n} loss={k} failed: {msg}", file=sys.stderr)
    text = _json(rows_to_dict(rows)) if args.format == "json" else compare_report(rows, args.format)
    return text, EXIT_RUNTIME if failed else EXIT_OK


def cmd_gradcurve(args) -> tuple[str, int]:
    table = gradient_curve_table(s=args.s, samples=args.samples, w_norm=args.wnorm)
    lines = ["theta_deg,cosine,mma,rf,log"]
    lines += [",".join(repr(v) for v in row) for row in table]
    return "\n".join(lines) + "\n", EXIT_OK


def _read_input(args):
    fmt = args.format_in
    if fmt is None:
        fmt = "json" if args.input.endswith(".json") else "csv"
    if args.input == "-":
        return load_weight_matrix(sys.stdin, fmt)
    with open(args.input) as fh:
        return load_weight_matrix(fh, fmt)


def cmd_analyze(args) -> tuple[str, int]:
    stats = angle_stats(_read_input(args), threshold=args.threshold, bins=args.bins)
    if args.format == "csv":
        return histogram_csv(stats), EXIT_OK
    return _json(stats.to_dict()), EXIT_OK


def _demo_table(report) -> str:
    lines = [
        f"train accuracy: {report.train_accuracy:.3f}",
        f"test accuracy:  {report.test_accuracy:.3f}",
        "",
        "| layer | min angle (deg) | cos > 0.2 |",
        "|------:|----------------:|----------:|",
    ]
    for k, (ang, cnt) in enumerate(zip(report.per_layer_min_angle_deg, report.per_layer_count_above_02)):
        ang_s = "NA" if ang is None else f"{ang:.2f}"
        cnt_s = "NA" if cnt is None else str(cnt)
        lines.append(f"| {k} | {ang_s} | {cnt_s} |")
    return "\n".join(lines) + "\n"


def cmd_demo(args) -> tuple[str, int]:
    config = DemoConfig(
        reg=args.reg,
        lam=args.lam,
        s=args.s,
        include_output_layer=args.include_output,
        epochs=args.epochs,
        seed=args.seed,
    )
    report = train_mlp(config)
    print(_demo_table(report), file=sys.stderr, end="")
    if args.dump_layers:
        os.makedirs(args.dump_layers, exist_ok=True)
        for k, w in enumerate(report.network.weights):
            with open(os.path.join(args.dump_layers, f"layer{k}.csv"), "w") as fh:
                fh.write(matrix_csv(w))
    if args.format == "md":
        return _demo_table(report), EXIT_OK
    return _json(report.to_dict()), EXIT_OK


COMMANDS = {
    "solve": cmd_solve,
    "simplex": cmd_simplex,
    "bench": cmd_bench,
    "gradcurve": cmd_gradcurve,
    "analyze": cmd_analyze,
    "demo": cmd_demo,
}


def dispatch(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parser.parse_args(argv)
    except UsageError as err:
        print(err, file=sys.stderr)
        return EXIT_USAGE
    if args.command is None:
        print(parser.format_help(), file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr)

    try:
        text, code = COMMANDS[args.command](args)
    except (ParseError, RaggedRows, TooFewPoints, OSError) as err:
        print(f"tammes {args.command}: {err}", file=sys.stderr)
        return EXIT_IO
    except NonFiniteLoss as err:
        print(f"tammes {args.command}: {err}", file=sys.stderr)
        return EXIT_RUNTIME
    except TammesError as err:
        print(f"tammes {args.command}: {err}", file=sys.stderr)
        return EXIT_USAGE

    try:
        if args.out == "-":
            sys.stdout.write(text)
            sys.stdout.flush()
        else:
            with open(args.out, "w") as fh:
                fh.write(text)
    except OSError as err:
        print(f"tammes: cannot write {args.out}: {err}", file=sys.stderr)
        return EXIT_IO
    return code


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()

"""Command line entry point: ``detkmeans bench ...``.

Exit status is 0 when every cell ran, 1 when some cell failed and 2 when the
configuration could not be used.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .bench import FORMATS, BenchConfig, ConfigError, emit_report, load_config, parse_data_option, run_benchmark
from .lloyd import KMeansConfig


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="detkmeans", description="Deterministic k-means initialization benchmark.")
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bench", help="run every (dataset, method) cell and print a report")
    b.add_argument("--config", type=Path, help="YAML or JSON benchmark config")
    b.add_argument(
        "--data",
        action="append",
        default=[],
        metavar="PATH[,class=IDX][,k=K][,skip=I;J][,header][,delim=C][,name=S]",
        help="dataset to include (repeatable); PATH may be builtin:<name>",
    )
    b.add_argument("--methods", help="comma-separated subset of mm,kk,vp,pp,ms,ms+")
    b.add_argument("--epsilon", type=float)
    b.add_argument("--max-iters", type=int)
    b.add_argument("--no-normalize", action="store_true", help="skip min-max normalization")
    b.add_argument("--format", choices=FORMATS + ("markdown",))
    b.add_argument("--workers", type=int)
    b.add_argument("--out", type=Path, help="write the report here instead of stdout")
    b.add_argument("-v", "--verbose", action="store_true")
    return parser


def _resolve_config(args) -> BenchConfig:
    if args.config is not None:
        cfg = load_config(args.config)
    else:
        cfg = None
    entries = [parse_data_option(d) for d in args.data]
    if cfg is None and not entries:
        raise ConfigError("give --config or at least one --data")

    base = cfg or BenchConfig(datasets=entries)
    km = base.kmeans
    try:
        km = KMeansConfig(
            max_iterations=args.max_iters if args.max_iters is not None else km.max_iterations,
            epsilon=args.epsilon if args.epsilon is not None else km.epsilon,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    fmt = args.format or base.output_format
    return BenchConfig(
        datasets=(cfg.datasets if cfg else []) + (entries if cfg else entries),
        methods=args.methods if args.methods else base.methods,
        kmeans=km,
        normalize=False if args.no_normalize else base.normalize,
        output_format="md" if fmt == "markdown" else fmt,
        workers=args.workers if args.workers is not None else base.workers,
    )


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR, format="%(levelname)s %(message)s")

    try:
        config = _resolve_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    report = run_benchmark(config)
    text = emit_report(report, config.output_format)
    if args.out is not None:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)
    for cell in report.failed:
        print(f"error: {cell.dataset}/{cell.method}: {cell.error}", file=sys.stderr)
    return 1 if report.failed else 0


if __name__ == "__main__":
    sys.exit(main())

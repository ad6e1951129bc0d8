"""Run every (dataset, method) cell and assemble comparison tables.

For each cell the data is min-max normalized (unless disabled), seeded,
scored (initial SSE), refined with k-means and scored again (final SSE,
iteration count).  Per dataset, both SSEs are also expressed as a percent of
the worst method's value, and each method gets five-number summaries over
all datasets.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional

import numpy as np
import yaml

from ._validation import parse_methods
from .dataset import DataError, Dataset, load_csv, minmax_normalize
from .datasets import BUILTIN, builtin_options, builtin_path
from .initdet import METHODS, initialize
from .lloyd import KMeansConfig, kmeans
from .metrics import SummaryStats, five_number_summary, normalize_vs_worst, sse

log = logging.getLogger(__name__)

FORMATS = ("csv", "md", "json")
CSV_COLUMNS = ("dataset", "method", "K", "IS", "FS", "NI", "IS_pct", "FS_pct", "converged_by", "error")
CRITERIA = ("IS_pct", "FS_pct", "NI")


class ConfigError(ValueError):
    """The benchmark configuration itself is unusable."""


@dataclass
class DatasetEntry:
    path: str
    name: Optional[str] = None
    class_column: Optional[int] = None
    k: Optional[int] = None
    delimiter: str = ","
    has_header: bool = False
    skip_columns: tuple = ()
    missing_policy: str = "drop"

    def __post_init__(self):
        if self.k is not None and (not isinstance(self.k, int) or self.k < 1):
            raise ConfigError(f"K override must be a positive integer, got {self.k!r}")
        self.skip_columns = tuple(self.skip_columns)

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        if self.path.startswith("builtin:"):
            return self.path[len("builtin:") :]
        return Path(self.path).stem

    def load(self) -> Dataset:
        if self.path.startswith("builtin:"):
            key = self.path[len("builtin:") :]
            if key not in BUILTIN:
                raise DataError(f"no bundled dataset {key!r}")
            opts = builtin_options(key)
            if self.class_column is not None:
                opts["class_column"] = self.class_column
            opts["name"] = self.label
            return load_csv(builtin_path(key), **opts)
        return load_csv(
            self.path,
            delimiter=self.delimiter,
            has_header=self.has_header,
            class_column=self.class_column,
            missing_policy=self.missing_policy,
            skip_columns=self.skip_columns,
            name=self.label,
        )


@dataclass
class BenchConfig:
    datasets: list
    methods: tuple = METHODS
    kmeans: KMeansConfig = field(default_factory=KMeansConfig)
    normalize: bool = True
    output_format: str = "csv"
    workers: int = 1

    def __post_init__(self):
        if not self.datasets:
            raise ConfigError("no datasets configured")
        try:
            self.methods = parse_methods(self.methods)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if self.output_format not in FORMATS:
            raise ConfigError(f"unsupported format {self.output_format!r}")


@dataclass
class CellResult:
    dataset: str
    method: str
    k: Optional[int] = None
    n_points: Optional[int] = None
    n_attributes: Optional[int] = None
    initial_sse: Optional[float] = None
    final_sse: Optional[float] = None
    iterations: Optional[int] = None
    converged_by: Optional[str] = None
    is_pct: Optional[float] = None
    fs_pct: Optional[float] = None
    sse_trace: list = field(default_factory=list)
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass
class BenchReport:
    cells: list
    summary: dict
    meta: dict

    @property
    def failed(self) -> list:
        return [c for c in self.cells if not c.ok]

    def cell(self, dataset: str, method: str) -> CellResult:
        for c in self.cells:
            if c.dataset == dataset and c.method == method:
                return c
        raise KeyError((dataset, method))

    def to_dict(self) -> dict:
        return {
            "meta": self.meta,
            "cells": [asdict(c) for c in self.cells],
            "summary": {
                crit: {m: (s.as_dict() if s else None) for m, s in per.items()}
                for crit, per in self.summary.items()
            },
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BenchReport":
        names = {f.name for f in fields(CellResult)}
        cells = [CellResult(**{k: v for k, v in c.items() if k in names}) for c in d["cells"]]
        summary = {
            crit: {m: (SummaryStats(**s) if s else None) for m, s in per.items()}
            for crit, per in d["summary"].items()
        }
        return cls(cells=cells, summary=summary, meta=d["meta"])


# -- configuration ------------------------------------------------------------


def parse_data_option(text: str) -> DatasetEntry:
    """Parse ``path[,class=IDX][,k=K][,skip=I;J][,header][,delim=C][,name=S]``."""
    parts = text.split(",")
    path, opts = parts[0].strip(), {}
    if not path:
        raise ConfigError(f"empty dataset path in {text!r}")
    for part in parts[1:]:
        key, _, value = part.partition("=")
        key = key.strip().lower()
        try:
            if key == "class":
                opts["class_column"] = int(value)
            elif key == "k":
                opts["k"] = int(value)
            elif key == "skip":
                opts["skip_columns"] = tuple(int(v) for v in value.split(";") if v.strip())
            elif key == "header":
                opts["has_header"] = value.strip().lower() not in ("0", "false", "no")
            elif key == "delim":
                opts["delimiter"] = "\t" if value == "\\t" else value
            elif key == "name":
                opts["name"] = value.strip()
            elif key == "missing":
                opts["missing_policy"] = value.strip()
            else:
                raise ConfigError(f"unknown dataset option {key!r} in {text!r}")
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"bad value for {key!r} in {text!r}") from exc
    return DatasetEntry(path, **opts)


_ENTRY_KEYS = {f.name for f in fields(DatasetEntry)}


def config_from_mapping(raw: dict, base_dir: Optional[Path] = None) -> BenchConfig:
    """Build a BenchConfig from a parsed YAML/JSON document."""
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping")
    entries = []
    for item in raw.get("datasets") or []:
        if isinstance(item, str):
            entry = parse_data_option(item)
        elif isinstance(item, dict):
            item = dict(item)
            if "class" in item:
                item["class_column"] = item.pop("class")
            unknown = set(item) - _ENTRY_KEYS
            if unknown:
                raise ConfigError(f"unknown dataset keys: {sorted(unknown)}")
            if "path" not in item:
                raise ConfigError("dataset entry without a path")
            item["path"] = str(item["path"])
            entry = DatasetEntry(**item)
        else:
            raise ConfigError(f"bad dataset entry {item!r}")
        if base_dir is not None and not entry.path.startswith("builtin:") and not Path(entry.path).is_absolute():
            entry.path = str(base_dir / entry.path)
        entries.append(entry)
    try:
        km = KMeansConfig(
            max_iterations=int(raw.get("max_iterations", raw.get("max_iters", 100))),
            epsilon=float(raw.get("epsilon", 1e-6)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    methods = raw.get("methods", METHODS)
    return BenchConfig(
        datasets=entries,
        methods=methods,
        kmeans=km,
        normalize=bool(raw.get("normalize", True)),
        output_format=str(raw.get("format", "csv")),
        workers=int(raw.get("workers", 1)),
    )


def load_config(path) -> BenchConfig:
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc
    return config_from_mapping(raw, base_dir=path.parent)


# -- execution ----------------------------------------------------------------


def run_cell(data: Dataset, k: int, method: str, config: KMeansConfig) -> CellResult:
    cell = CellResult(dataset=data.name, method=method, k=k, n_points=data.n_points, n_attributes=data.n_attributes)
    try:
        seeds = initialize(data, k, method)
        cell.initial_sse = sse(data, seeds)
        run = kmeans(data, seeds, config)
    except (ValueError, ArithmeticError) as exc:
        cell.error = str(exc)
        log.warning("%s/%s failed: %s", data.name, method, exc)
        return cell
    cell.final_sse = run.final_sse
    cell.iterations = run.iterations
    cell.converged_by = run.converged_by
    cell.sse_trace = [float(s) for s in run.sse_trace]
    return cell


def _prepare(entry: DatasetEntry, normalize: bool):
    data = entry.load()
    k = entry.k if entry.k is not None else data.n_classes
    if k is None:
        raise DataError("K unresolved: no class column and no K override")
    return (minmax_normalize(data) if normalize else data), k


def _fill_percents(cells: list) -> None:
    ok = [c for c in cells if c.ok]
    if not ok:
        return
    for attr, out in (("initial_sse", "is_pct"), ("final_sse", "fs_pct")):
        vals = [getattr(c, attr) for c in ok]
        if max(vals) <= 0:
            continue
        for c, r in zip(ok, normalize_vs_worst(vals)):
            setattr(c, out, 100.0 * r)


def summarize_cells(cells: list, methods) -> dict:
    summary = {}
    for crit, attr in zip(CRITERIA, ("is_pct", "fs_pct", "iterations")):
        per = {}
        for m in methods:
            vals = [getattr(c, attr) for c in cells if c.method == m and getattr(c, attr) is not None]
            per[m] = five_number_summary(vals) if vals else None
        summary[crit] = per
    return summary


def run_benchmark(config: BenchConfig) -> BenchReport:
    """Evaluate every configured (dataset, method) pair.

    A dataset that fails to load, or a single cell that fails, is recorded as
    an error in the affected cells and does not stop the rest of the run.
    """
    jobs, cells_by_dataset = [], []
    for entry in config.datasets:
        try:
            data, k = _prepare(entry, config.normalize)
        except (DataError, ValueError) as exc:
            log.warning("dataset %s failed: %s", entry.label, exc)
            cells_by_dataset.append([CellResult(entry.label, m, k=entry.k, error=str(exc)) for m in config.methods])
            continue
        slots = []
        for m in config.methods:
            slots.append(len(jobs))
            jobs.append((data, k, m))
        cells_by_dataset.append(slots)

    def work(job):
        return run_cell(*job, config.kmeans)

    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(work, jobs))
    else:
        results = [work(j) for j in jobs]

    cells = []
    for group in cells_by_dataset:
        group_cells = [results[i] if isinstance(i, int) else i for i in group]
        _fill_percents(group_cells)
        cells.extend(group_cells)

    meta = {
        "normalize": config.normalize,
        "epsilon": config.kmeans.epsilon,
        "max_iterations": config.kmeans.max_iterations,
        "methods": list(config.methods),
        "datasets": [e.label for e in config.datasets],
    }
    return BenchReport(cells=cells, summary=summarize_cells(cells, config.methods), meta=meta)


# -- output -------------------------------------------------------------------


def _g(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".6g")


def _emit_csv(report: BenchReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for c in report.cells:
        w.writerow(
            [c.dataset, c.method, _g(c.k), _g(c.initial_sse), _g(c.final_sse), _g(c.iterations),
             _g(c.is_pct), _g(c.fs_pct), c.converged_by or "", c.error or ""]
        )
    return buf.getvalue()


def _md_table(header, rows) -> list:
    lines = ["| " + " | ".join(header) + " |", "|" + "|".join("---" for _ in header) + "|"]
    lines += ["| " + " | ".join(r) + " |" for r in rows]
    return lines


def _emit_markdown(report: BenchReport) -> str:
    methods = report.meta["methods"]
    heads = [m.upper() for m in methods]
    datasets = report.meta["datasets"]
    out = [
        "# Initialization benchmark",
        "",
        f"normalize: {report.meta['normalize']}, epsilon: {report.meta['epsilon']:g}, "
        f"max iterations: {report.meta['max_iterations']}",
        "",
        "## Data sets",
        "",
    ]
    rows = []
    for i, name in enumerate(datasets, 1):
        first = next(c for c in report.cells if c.dataset == name)
        rows.append([f"{i:02d}", name, _g(first.n_points), _g(first.n_attributes), _g(first.k)])
    out += _md_table(["ID", "Data set", "N", "D", "K"], rows)

    for title, attr in (("Initial SSE", "initial_sse"), ("Final SSE", "final_sse"), ("Number of iterations", "iterations")):
        out += ["", f"## {title}", ""]
        rows = []
        for i, name in enumerate(datasets, 1):
            row = [f"{i:02d}"]
            for m in methods:
                c = report.cell(name, m)
                v = getattr(c, attr)
                row.append("error" if not c.ok else f"{v:.0f}")
            rows.append(row)
        out += _md_table(["ID"] + heads, rows)

    out += ["", "## Summary statistics", ""]
    rows = []
    labels = {"IS_pct": "IS %", "FS_pct": "FS %", "NI": "NI"}
    for crit in CRITERIA:
        per = report.summary[crit]
        for stat, key in (("Min", "min"), ("Q1", "q1"), ("Median", "median"), ("Q3", "q3"), ("Max", "max"), ("Mean", "mean")):
            rows.append([labels[crit], stat] + ["" if per[m] is None else f"{getattr(per[m], key):.2f}" for m in methods])
    out += _md_table(["Criterion", "Statistic"] + heads, rows)
    failed = report.failed
    if failed:
        out += ["", "## Errors", ""]
        out += [f"- {c.dataset}/{c.method}: {c.error}" for c in failed]
    return "\n".join(out) + "\n"


def emit_report(report: BenchReport, fmt: str = "csv") -> str:
    """Render ``report`` as ``csv``, ``md`` (``markdown``) or ``json``."""
    fmt = {"markdown": "md"}.get(fmt, fmt)
    if fmt == "csv":
        return _emit_csv(report)
    if fmt == "md":
        return _emit_markdown(report)
    if fmt == "json":
        return json.dumps(report.to_dict(), indent=2) + "\n"
    raise ValueError(f"unsupported format {fmt!r}; expected one of {', '.join(FORMATS)}")

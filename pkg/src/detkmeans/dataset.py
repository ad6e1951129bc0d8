"""Tabular numeric data: loading, min-max scaling and the shared geometry.

A :class:`Dataset` is an immutable ``N x D`` float64 matrix plus attribute
names and optional class labels.  Every other module in the package is a pure
function of one.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

MISSING_MARKERS = frozenset({"", "?"})


class DataError(ValueError):
    """Raised when a file or array cannot be turned into a valid Dataset."""


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class Dataset:
    points: np.ndarray
    attribute_names: tuple[str, ...] = ()
    class_labels: Optional[tuple] = None
    name: str = "data"

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise DataError(f"points must be a non-empty 2-D matrix, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise DataError("points contain NaN or infinite values")
        names = tuple(self.attribute_names) or tuple(f"a{d + 1}" for d in range(pts.shape[1]))
        if len(names) != pts.shape[1]:
            raise DataError(f"{len(names)} attribute names for {pts.shape[1]} attributes")
        labels = self.class_labels
        if labels is not None:
            labels = tuple(labels)
            if len(labels) != pts.shape[0]:
                raise DataError(f"{len(labels)} class labels for {pts.shape[0]} points")
        object.__setattr__(self, "points", _readonly(pts))
        object.__setattr__(self, "attribute_names", names)
        object.__setattr__(self, "class_labels", labels)

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    @property
    def n_attributes(self) -> int:
        return self.points.shape[1]

    @property
    def n_classes(self) -> Optional[int]:
        """Number of distinct class labels, or None for unlabeled data."""
        if self.class_labels is None:
            return None
        return len(set(self.class_labels))

    def take(self, rows) -> "Dataset":
        """Return the dataset restricted to (or reordered by) ``rows``."""
        rows = np.asarray(rows)
        labels = None
        if self.class_labels is not None:
            labels = tuple(self.class_labels[i] for i in rows)
        return Dataset(self.points[rows], self.attribute_names, labels, self.name)

    def with_points(self, points) -> "Dataset":
        return Dataset(points, self.attribute_names, self.class_labels, self.name)


@dataclass(frozen=True)
class AttributeStats:
    """Per-attribute mean, sample standard deviation (divisor N-1), min and max."""

    mean: np.ndarray
    std: np.ndarray
    min: np.ndarray
    max: np.ndarray
    n: int = field(default=0)


def as_points(data) -> np.ndarray:
    """Coerce a Dataset or array-like into a 2-D float64 matrix."""
    if isinstance(data, Dataset):
        return data.points
    pts = np.asarray(data, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    return pts


def canonical_order(points: np.ndarray) -> np.ndarray:
    """Row indices that sort ``points`` lexicographically by coordinates.

    Running every reduction over rows in this order makes floating-point sums
    independent of the input row order, and turns "first index among ties"
    into "lexicographically smallest point among ties".
    """
    if points.shape[0] <= 1:
        return np.arange(points.shape[0])
    # lexsort treats the last key as primary
    return np.lexsort(points.T[::-1])


def attribute_stats(data) -> AttributeStats:
    x = as_points(data)
    x = x[canonical_order(x)]
    n = x.shape[0]
    mean = x.mean(axis=0)
    if n > 1:
        std = np.sqrt(((x - mean) ** 2).sum(axis=0) / (n - 1))
    else:
        std = np.zeros(x.shape[1])
    return AttributeStats(mean=mean, std=std, min=x.min(axis=0), max=x.max(axis=0), n=n)


def sq_euclidean(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    diff = a - b
    return float(np.dot(diff, diff))


def sq_distances(points: np.ndarray, center: np.ndarray) -> np.ndarray:
    """Squared distance from every row of ``points`` to a single ``center``."""
    diff = points - center
    return np.einsum("ij,ij->i", diff, diff)


def centroid(points) -> np.ndarray:
    x = as_points(points)
    if x.shape[0] == 0:
        raise ValueError("centroid of an empty point set")
    return x[canonical_order(x)].mean(axis=0)


def minmax_normalize(data: Dataset) -> Dataset:
    """Map each attribute affinely onto [0, 1]; constant attributes become 0."""
    x = data.points
    lo = x.min(axis=0)
    span = x.max(axis=0) - lo
    const = span == 0
    scaled = (x - lo) / np.where(const, 1.0, span)
    scaled[:, const] = 0.0
    # guard against 1 + ulp from the division
    np.clip(scaled, 0.0, 1.0, out=scaled)
    return data.with_points(scaled)


def _parse_cell(cell: str) -> Optional[float]:
    cell = cell.strip()
    if cell in MISSING_MARKERS:
        return None
    return float(cell)


def load_csv(
    path,
    delimiter: str = ",",
    has_header: bool = False,
    class_column: Optional[int] = None,
    missing_policy: str = "drop",
    skip_columns: Sequence[int] = (),
    name: Optional[str] = None,
) -> Dataset:
    """Read a numeric CSV file into a :class:`Dataset`.

    Parameters
    ----------
    path : str or Path
        File to read.
    delimiter : str
        Field separator.
    has_header : bool
        Whether the first row holds attribute names.
    class_column : int, optional
        Index of the class-label column (negative indices count from the end).
        It is excluded from the points.
    missing_policy : {"drop", "strict"}
        ``"drop"`` discards rows containing an empty cell or ``?``;
        ``"strict"`` raises on them.
    skip_columns : sequence of int
        Extra columns to ignore entirely, e.g. record identifiers.
    name : str, optional
        Dataset name; defaults to the file stem.
    """
    if missing_policy not in ("drop", "strict"):
        raise ValueError(f"unknown missing_policy {missing_policy!r}")
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            rows = [r for r in csv.reader(fh, delimiter=delimiter) if r and any(c.strip() for c in r)]
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise DataError(f"{path} contains no rows")

    header = rows.pop(0) if has_header else None
    width = len(header) if header is not None else len(rows[0]) if rows else 0

    def norm(i):
        j = i + width if i < 0 else i
        if not 0 <= j < width:
            raise DataError(f"column index {i} out of range for {width} columns")
        return j

    cls = norm(class_column) if class_column is not None else None
    skipped = {norm(i) for i in skip_columns}
    if cls is not None:
        skipped.add(cls)
    keep = [j for j in range(width) if j not in skipped]
    if not keep:
        raise DataError("no attribute columns left after excluding class/skip columns")

    points, labels = [], []
    for lineno, row in enumerate(rows, start=2 if has_header else 1):
        if len(row) != width:
            raise DataError(f"{path}:{lineno}: expected {width} fields, got {len(row)}")
        try:
            vals = [_parse_cell(row[j]) for j in keep]
        except ValueError as exc:
            raise DataError(f"{path}:{lineno}: non-numeric cell ({exc})") from exc
        label = row[cls].strip() if cls is not None else None
        if any(v is None for v in vals) or (cls is not None and label in MISSING_MARKERS):
            if missing_policy == "strict":
                raise DataError(f"{path}:{lineno}: missing value")
            continue
        points.append(vals)
        labels.append(label)

    if not points:
        raise DataError(f"{path}: no usable rows")
    names = tuple(header[j].strip() for j in keep) if header is not None else ()
    return Dataset(
        np.array(points, dtype=np.float64),
        names,
        tuple(labels) if cls is not None else None,
        name or path.stem,
    )

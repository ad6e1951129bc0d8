"""Clustering objective and the summary statistics used to compare seeders."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .dataset import as_points, canonical_order


@dataclass(frozen=True)
class MethodScores:
    initial_sse: float
    final_sse: float
    iterations: int


@dataclass(frozen=True)
class SummaryStats:
    min: float
    q1: float
    median: float
    q3: float
    max: float
    mean: float

    def as_dict(self) -> dict:
        return asdict(self)


def sse(data, centers, assignment=None) -> float:
    """Sum of squared distances from each point to its cluster center.

    Without ``assignment`` every point is charged to its nearest center.
    ``assignment`` may be an :class:`~detkmeans.lloyd.Assignment` or a
    label array.
    """
    from .lloyd import _center_matrix, _nearest

    x = as_points(data)
    c = _center_matrix(centers, x.shape[1])
    if assignment is None:
        labels, _ = _nearest(x, c)
    else:
        labels = np.asarray(getattr(assignment, "labels", assignment), dtype=np.intp)
        if labels.shape != (x.shape[0],):
            raise ValueError("assignment length does not match the number of points")
    order = canonical_order(x)
    diff = x[order] - c[labels[order]]
    return float(np.einsum("ij,ij->i", diff, diff).sum())


def normalize_vs_worst(values: Sequence[float]) -> list[float]:
    """Divide every value by the largest one."""
    v = np.asarray(values, dtype=np.float64)
    if v.size == 0 or not np.any(v > 0):
        raise ValueError("need at least one positive value")
    worst = v.max()
    return [float(a / worst) for a in v]


def five_number_summary(values: Sequence[float]) -> SummaryStats:
    """Min, quartiles, max and mean; quartiles interpolate linearly."""
    v = np.sort(np.asarray(values, dtype=np.float64))
    if v.size == 0:
        raise ValueError("five-number summary of an empty list")
    q1, med, q3 = np.percentile(v, [25, 50, 75], method="linear")
    mean = min(max(float(v.mean()), v[0]), v[-1])
    return SummaryStats(float(v[0]), float(q1), float(med), float(q3), float(v[-1]), mean)


def stirling2(n: int, k: int) -> int:
    """Stirling number of the second kind S(n, k), computed exactly."""
    if k < 1 or k > n:
        raise ValueError(f"need 1 <= k <= n, got n={n}, k={k}")
    # row of S(m, 0..k), built up with S(m, j) = j S(m-1, j) + S(m-1, j-1)
    row = [1] + [0] * k
    for m in range(1, n + 1):
        for j in range(min(m, k), 0, -1):
            row[j] = j * row[j] + row[j - 1]
        row[0] = 0
    return row[k]

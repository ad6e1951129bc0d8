"""Batch k-means (Lloyd's algorithm) with a relative-SSE stopping rule."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .dataset import as_points, canonical_order, sq_distances
from .initdet import Centers


@dataclass(frozen=True)
class KMeansConfig:
    max_iterations: int = 100
    epsilon: float = 1e-6
    empty_cluster_policy: str = "keep_previous_center"

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.epsilon < 0:
            raise ValueError("epsilon must be >= 0")
        if self.empty_cluster_policy != "keep_previous_center":
            raise ValueError(f"unsupported empty_cluster_policy {self.empty_cluster_policy!r}")


@dataclass(frozen=True)
class Assignment:
    labels: np.ndarray
    counts: np.ndarray


@dataclass
class RunResult:
    centers: Centers
    assignment: Assignment
    sse_trace: list = field(default_factory=list)
    iterations: int = 0
    converged_by: str = "epsilon"

    @property
    def final_sse(self) -> float:
        return self.sse_trace[-1]


def _center_matrix(centers, d: int) -> np.ndarray:
    c = np.asarray(centers.points if isinstance(centers, Centers) else centers, dtype=np.float64)
    if c.ndim == 1:
        c = c.reshape(-1, 1) if d == 1 else c.reshape(1, -1)
    if c.ndim != 2 or c.shape[0] == 0:
        raise ValueError("centers must be a non-empty 2-D matrix")
    if c.shape[1] != d:
        raise ValueError(f"dimension mismatch: centers have {c.shape[1]} attributes, data {d}")
    return c


def _nearest(x: np.ndarray, c: np.ndarray):
    best = sq_distances(x, c[0])
    labels = np.zeros(x.shape[0], dtype=np.intp)
    for i in range(1, c.shape[0]):
        d = sq_distances(x, c[i])
        closer = d < best  # strict: ties stay with the lower center index
        best[closer] = d[closer]
        labels[closer] = i
    return labels, best


def assign(data, centers) -> Assignment:
    """Assign each point to its nearest center (ties to the lowest index)."""
    x = as_points(data)
    c = _center_matrix(centers, x.shape[1])
    labels, _ = _nearest(x, c)
    return Assignment(labels, np.bincount(labels, minlength=c.shape[0]))


def update_centers(data, assignment: Assignment, previous) -> Centers:
    """Move each center to the mean of its members; empty clusters stay put."""
    x = as_points(data)
    prev = _center_matrix(previous, x.shape[1])
    order = canonical_order(x)
    new = _means(x[order], np.asarray(assignment.labels)[order], prev)
    method = previous.method if isinstance(previous, Centers) else ""
    return Centers(new, method)


def _means(x: np.ndarray, labels: np.ndarray, prev: np.ndarray) -> np.ndarray:
    """Per-cluster means; clusters with no members keep their previous center."""
    k = prev.shape[0]
    counts = np.bincount(labels, minlength=k)
    sums = np.column_stack([np.bincount(labels, weights=x[:, d], minlength=k) for d in range(x.shape[1])])
    out = prev.copy()
    filled = counts > 0
    out[filled] = sums[filled] / counts[filled, None]
    return out


def _sse(x: np.ndarray, c: np.ndarray, labels: np.ndarray) -> float:
    diff = x - c[labels]
    return float(np.einsum("ij,ij->i", diff, diff).sum())


def kmeans(data, initial, config: Optional[KMeansConfig] = None) -> RunResult:
    """Run Lloyd iterations from ``initial`` until the stopping rule fires.

    One iteration is an assignment step followed by a center update, and the
    SSE recorded for it uses the updated centers.  From the second iteration
    on, the run stops when ``(SSE[i-1] - SSE[i]) / SSE[i] <= epsilon``; an
    SSE of exactly zero stops at once.  Otherwise it stops after
    ``max_iterations``.
    """
    config = config or KMeansConfig()
    x = as_points(data)
    c = _center_matrix(initial, x.shape[1])
    if c.shape[0] > x.shape[0]:
        raise ValueError(f"K exceeds N ({c.shape[0]} > {x.shape[0]})")
    method = initial.method if isinstance(initial, Centers) else ""

    # rows are processed in canonical order so sums do not depend on input order
    order = canonical_order(x)
    xs = x[order]
    trace: list = []
    converged_by = "max_iterations"
    for it in range(1, config.max_iterations + 1):
        labels, _ = _nearest(xs, c)
        c = _means(xs, labels, c)
        trace.append(_sse(xs, c, labels))
        if trace[-1] == 0.0:
            converged_by = "epsilon"
            break
        if it >= 2 and (trace[-2] - trace[-1]) / trace[-1] <= config.epsilon:
            converged_by = "epsilon"
            break

    out = np.empty_like(labels)
    out[order] = labels
    return RunResult(
        centers=Centers(c, method),
        assignment=Assignment(out, np.bincount(out, minlength=c.shape[0])),
        sse_trace=trace,
        iterations=len(trace),
        converged_by=converged_by,
    )

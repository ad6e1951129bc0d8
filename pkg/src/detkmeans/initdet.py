"""Linear, deterministic, order-invariant k-means seeding.

Six methods are provided, keyed by stable identifiers:

``mm``   maximin, first center at the data centroid
``kk``   maximin, first center at the largest-norm point
``vp``   Var-Part: divisive splitting along the max-variance axis
``pp``   PCA-Part: divisive splitting along the principal eigenvector
``ms``   maxisum in a two-attribute projection
``ms+``  maxisum in the full attribute space

Every routine first sorts the rows lexicographically.  All sums then run in a
fixed order and every argmax that hits a tie resolves to the lexicographically
smallest point, so the output does not depend on the row order of the input.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .dataset import as_points, attribute_stats, canonical_order, sq_distances

METHODS = ("mm", "kk", "vp", "pp", "ms", "ms+")


class ConvergenceError(RuntimeError):
    """The power method did not reach its residual tolerance."""


@dataclass(frozen=True)
class Centers:
    points: np.ndarray
    method: str = ""

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64)
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return self.points.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.points if dtype is None else self.points.astype(dtype)


@dataclass
class SplitState:
    """One cell of the divisive partition built by Var-Part / PCA-Part."""

    members: np.ndarray  # row indices into the canonically sorted data
    sse: float
    centroid: np.ndarray
    created: int
    distinct: bool = False
    direction: Optional[np.ndarray] = None
    threshold: Optional[float] = None

    @property
    def splittable(self) -> bool:
        return self.distinct


@dataclass(frozen=True)
class ProjectionPlan:
    d1: int
    d2: int
    projected: np.ndarray


def _check_k(n: int, k: int) -> None:
    if not isinstance(k, (int, np.integer)) or isinstance(k, bool):
        raise TypeError(f"K must be an integer, got {k!r}")
    if k < 1:
        raise ValueError(f"K must be at least 1, got {k}")
    if k > n:
        raise ValueError(f"K exceeds N ({k} > {n})")


def _sorted(data) -> np.ndarray:
    x = as_points(data)
    if x.ndim != 2 or x.shape[0] == 0:
        raise ValueError("data must be a non-empty 2-D matrix")
    return x[canonical_order(x)]


def _maximin_from(x: np.ndarray, first: np.ndarray, k: int, method: str) -> Centers:
    centers = [first]
    mind = sq_distances(x, first)
    for _ in range(1, k):
        j = int(np.argmax(mind))
        if mind[j] == 0.0:
            raise ValueError(f"K exceeds the number of distinct points ({k})")
        centers.append(x[j])
        np.minimum(mind, sq_distances(x, x[j]), out=mind)
    return Centers(np.vstack(centers), method)


def maximin_init(data, k: int, first=None) -> Centers:
    """Maximin (farthest-first) seeding.

    The first center is the data centroid unless ``first`` gives another
    point.  Started from a data point, this is the classic greedy
    2-approximation for K-center; the centroid start carries no such bound.
    """
    x = _sorted(data)
    _check_k(x.shape[0], k)
    if first is None:
        first = x.mean(axis=0)
    else:
        first = np.asarray(first, dtype=np.float64)
        if first.shape != (x.shape[1],):
            raise ValueError(f"first center must have {x.shape[1]} coordinates")
    return _maximin_from(x, first, k, "mm")


def katsavounidis_init(data, k: int) -> Centers:
    """Maximin seeding starting from the point of greatest Euclidean norm."""
    x = _sorted(data)
    _check_k(x.shape[0], k)
    first = x[int(np.argmax(np.einsum("ij,ij->i", x, x)))]
    return _maximin_from(x, first, k, "kk")


# -- divisive methods ---------------------------------------------------------


def _make_cell(x: np.ndarray, members: np.ndarray, created: int) -> SplitState:
    pts = x[members]
    c = pts.mean(axis=0)
    sse = float(sq_distances(pts, c).sum())
    distinct = bool(np.any(pts != pts[0]))
    return SplitState(members=members, sse=sse, centroid=c, created=created, distinct=distinct)


def select_split_cluster(cells) -> int:
    """Position of the splittable cell with the greatest SSE.

    Ties go to the cell created first.  Cells whose points all coincide are
    never selected.
    """
    best = None
    for pos, cell in enumerate(cells):
        if not cell.splittable:
            continue
        if best is None or cell.sse > cells[best].sse or (
            cell.sse == cells[best].sse and cell.created < cells[best].created
        ):
            best = pos
    if best is None:
        raise ValueError("no splittable cluster: K exceeds the number of distinct points")
    return best


def _max_variance_axis(pts: np.ndarray) -> np.ndarray:
    var = ((pts - pts.mean(axis=0)) ** 2).sum(axis=0)
    v = np.zeros(pts.shape[1])
    v[int(np.argmax(var))] = 1.0
    return v


def principal_eigenvector(cov, tol: float = 1e-8, max_iter: int = 1000) -> np.ndarray:
    """Dominant eigenvector of a symmetric PSD matrix by power iteration.

    The iteration starts from the coordinate axis with the largest diagonal
    entry and stops once ``||A v - (v.A v) v|| <= tol * max(1, v.A v)``.  The
    returned vector has unit norm and its first nonzero component is
    positive.

    Raises
    ------
    ConvergenceError
        If the tolerance is not met within ``max_iter`` iterations.
    """
    a = np.asarray(cov, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    v = np.zeros(a.shape[0])
    v[int(np.argmax(np.diag(a)))] = 1.0
    for _ in range(max_iter + 1):
        av = a @ v
        lam = float(v @ av)
        if np.linalg.norm(av - lam * v) <= tol * max(1.0, abs(lam)):
            break
        v = av / np.linalg.norm(av)
    else:
        raise ConvergenceError(f"power method did not converge in {max_iter} iterations")
    nz = np.flatnonzero(v)
    if nz.size and v[nz[0]] < 0:
        v = -v
    return v / np.linalg.norm(v)


def _split_direction_pca(pts: np.ndarray) -> np.ndarray:
    centered = pts - pts.mean(axis=0)
    cov = centered.T @ centered / max(pts.shape[0] - 1, 1)
    try:
        return principal_eigenvector(cov)
    except ConvergenceError:
        return _max_variance_axis(pts)


def _split_direction_var(pts: np.ndarray) -> np.ndarray:
    return _max_variance_axis(pts)


def _divisive(x: np.ndarray, k: int, direction: Callable[[np.ndarray], np.ndarray], trace=None):
    cells = [_make_cell(x, np.arange(x.shape[0]), 0)]
    created = 1
    for _ in range(k - 1):
        pos = select_split_cluster(cells)
        cell = cells[pos]
        pts = x[cell.members]
        v = direction(pts)
        p = float(cell.centroid @ v)
        low = pts @ v <= p
        if low.all() or not low.any():
            # rounding put every point on one side; fall back to the axis rule
            v = _max_variance_axis(pts)
            p = float(cell.centroid @ v)
            low = pts @ v <= p
        if low.all() or not low.any():
            # squared spreads underflowed; cut the widest axis just above its minimum
            axis = int(np.argmax(np.ptp(pts, axis=0)))
            v = np.zeros(pts.shape[1])
            v[axis] = 1.0
            p = float(pts[:, axis].min())
            low = pts[:, axis] <= p
        cell.direction, cell.threshold = v, p
        if trace is not None:
            trace.append(cell)
        first = _make_cell(x, cell.members[low], created)
        second = _make_cell(x, cell.members[~low], created + 1)
        created += 2
        cells[pos : pos + 1] = []
        cells.extend([first, second])
    cells.sort(key=lambda c: c.created)
    return cells


def var_part_init(data, k: int, trace: Optional[list] = None) -> Centers:
    """Var-Part seeding.

    If ``trace`` is a list, the split cell of every round (with its axis and
    threshold filled in) is appended to it.
    """
    x = _sorted(data)
    _check_k(x.shape[0], k)
    cells = _divisive(x, k, _split_direction_var, trace)
    return Centers(np.vstack([c.centroid for c in cells]), "vp")


def pca_part_init(data, k: int, trace: Optional[list] = None) -> Centers:
    """PCA-Part seeding; same loop as :func:`var_part_init` with PCA directions."""
    x = _sorted(data)
    _check_k(x.shape[0], k)
    cells = _divisive(x, k, _split_direction_pca, trace)
    return Centers(np.vstack([c.centroid for c in cells]), "pp")


# -- maxisum ------------------------------------------------------------------


def pick_projection_axes(data) -> ProjectionPlan:
    """Choose the two attributes the maxisum method projects onto.

    ``d1`` has the greatest absolute coefficient of variation; ``d2`` has the
    least correlation with ``d1``.  Constant attributes are never chosen, an
    attribute with zero mean and nonzero spread counts as infinitely
    variable, and ties go to the lower attribute index.
    """
    x = _sorted(data)
    if x.shape[1] < 2:
        raise ValueError("projection needs at least two attributes")
    stats = attribute_stats(x)
    active = stats.std > 0
    if active.sum() < 2:
        raise ValueError("projection needs at least two non-constant attributes")

    with np.errstate(divide="ignore", invalid="ignore"):
        cov = np.where(stats.mean != 0, np.abs(stats.std / stats.mean), np.inf)
    cov = np.where(active, cov, -np.inf)
    d1 = int(np.argmax(cov))

    z = (x[:, active] - stats.mean[active]) / stats.std[active]
    z1 = (x[:, d1] - stats.mean[d1]) / stats.std[d1]
    scores = np.full(x.shape[1], np.inf)
    scores[active] = z1 @ z
    scores[d1] = np.inf
    d2 = int(np.argmin(scores))
    return ProjectionPlan(d1=d1, d2=d2, projected=x[:, [d1, d2]])


def maxisum_init(data, k: int, projected: bool = True) -> Centers:
    """Maxisum seeding (``ms`` when ``projected``, ``ms+`` otherwise).

    Selection runs in the projected plane for ``ms``, but the returned
    centers are always the selected points in the full attribute space.
    """
    x = _sorted(data)
    _check_k(x.shape[0], k)
    y = pick_projection_axes(x).projected if projected else x
    method = "ms" if projected else "ms+"

    j = int(np.argmax(sq_distances(y, y.mean(axis=0))))
    chosen = [j]
    available = np.ones(x.shape[0], dtype=bool)
    cumulative = np.zeros(x.shape[0])
    for _ in range(1, k):
        last = chosen[-1]
        available &= np.any(x != x[last], axis=1)
        cumulative += np.sqrt(sq_distances(y, y[last]))
        if not available.any():
            raise ValueError(f"K exceeds the number of distinct points ({k})")
        j = int(np.argmax(np.where(available, cumulative, -np.inf)))
        chosen.append(j)
    return Centers(x[chosen], method)


INITIALIZERS: dict[str, Callable[..., Centers]] = {
    "mm": maximin_init,
    "kk": katsavounidis_init,
    "vp": var_part_init,
    "pp": pca_part_init,
    "ms": lambda data, k: maxisum_init(data, k, projected=True),
    "ms+": lambda data, k: maxisum_init(data, k, projected=False),
}


def initialize(data, k: int, method: str) -> Centers:
    """Dispatch to the initializer registered under ``method``."""
    try:
        fn = INITIALIZERS[method]
    except KeyError:
        raise ValueError(f"unknown method {method!r}; expected one of {', '.join(METHODS)}") from None
    return fn(data, k)

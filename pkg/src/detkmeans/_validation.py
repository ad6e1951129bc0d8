"""Input checks shared by the estimators and the benchmark harness."""

from __future__ import annotations

import numbers

from .initdet import METHODS


def check_n_clusters(k, n_samples: int) -> int:
    if not isinstance(k, numbers.Integral) or isinstance(k, bool):
        raise TypeError(f"n_clusters must be an integer, got {k!r}")
    if k < 1:
        raise ValueError(f"n_clusters must be >= 1, got {k}")
    if k > n_samples:
        raise ValueError(f"K exceeds N ({k} > {n_samples})")
    return int(k)


def check_method(name: str) -> str:
    name = str(name).strip().lower()
    if name not in METHODS:
        raise ValueError(f"unknown method {name!r}; expected one of {', '.join(METHODS)}")
    return name


def parse_methods(names_or_text) -> tuple[str, ...]:
    """Accept ``"mm,kk"`` or an iterable of names; keep the canonical order."""
    if isinstance(names_or_text, str):
        names = [s for s in names_or_text.split(",") if s.strip()]
    else:
        names = list(names_or_text)
    chosen = {check_method(n) for n in names}
    if not chosen:
        raise ValueError("no methods selected")
    return tuple(m for m in METHODS if m in chosen)

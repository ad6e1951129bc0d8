"""Small public reference datasets shipped with the package.

* ``ruspini``: 75 two-dimensional points in four natural groups (unlabeled).
* ``iris``: 150 x 4, three classes, with the two corrected rows of the
  Bezdek variant.
* ``wine``: 178 x 13, three classes; the class is the first column.
* ``breast-cancer-wisconsin``: the original 699-row Wisconsin file with a
  leading sample-id column and ``?`` for missing cells (683 complete rows).
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .dataset import Dataset, load_csv

BUILTIN = {
    "ruspini": dict(file="ruspini.csv", has_header=True),
    "iris": dict(file="iris.data", class_column=-1),
    "wine": dict(file="wine.data", class_column=0),
    "breast-cancer-wisconsin": dict(file="breast-cancer-wisconsin.data", class_column=-1, skip_columns=(0,)),
}


def builtin_path(name: str) -> Path:
    try:
        entry = BUILTIN[name]
    except KeyError:
        raise KeyError(f"no bundled dataset {name!r}; choose from {', '.join(BUILTIN)}") from None
    return Path(str(resources.files("detkmeans") / "data" / entry["file"]))


def builtin_options(name: str) -> dict:
    """Loader keyword arguments for a bundled file (without the path)."""
    opts = {k: v for k, v in BUILTIN[name].items() if k != "file"}
    opts["name"] = name
    return opts


def load_builtin(name: str) -> Dataset:
    return load_csv(builtin_path(name), **builtin_options(name))


def load_ruspini() -> Dataset:
    return load_builtin("ruspini")


def load_iris() -> Dataset:
    return load_builtin("iris")


def load_wine() -> Dataset:
    return load_builtin("wine")


def load_breast_cancer_wisconsin() -> Dataset:
    return load_builtin("breast-cancer-wisconsin")

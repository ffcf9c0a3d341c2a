"""Deterministic CSV/JSON writers: fixed float format, fixed ordering.

Floats are serialised with 17 significant digits and '.' as the decimal
separator regardless of locale, so identical runs produce byte-identical
files on every platform.
"""

from __future__ import annotations

import json
import os

import numpy as np

__all__ = ["fmt", "write_csv", "write_json"]


def fmt(x) -> str:
    """One value, 17 significant digits, locale-independent."""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, complex):
        return "%s%+sj" % (fmt(x.real), fmt(x.imag))
    return "%.17g" % float(x)


def write_csv(path: str, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(v) for v in row))
    _write(path, "\n".join(lines) + "\n")


def write_json(path: str, obj) -> None:
    def default(o):
        if isinstance(o, (np.integer,)):
            return int(o)
        if isinstance(o, (np.floating,)):
            return float(o)
        if isinstance(o, np.ndarray):
            return o.tolist()
        raise TypeError(type(o).__name__)

    _write(path, json.dumps(obj, indent=2, sort_keys=True, default=default) + "\n")


def _write(path: str, text: str) -> None:
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)

"""Deterministic report documents.

Reports are JSON (sorted keys, fixed layout, no timestamps) so identical
configuration and seed produce byte-identical files; histogram data goes to
CSV as (bin_left, bin_right, count) rows for external tooling.
"""

from __future__ import annotations

import dataclasses
import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__


def jsonable(value):
    """Recursively convert report values to plain JSON types; Fractions become
    exact "p/q" strings, arrays become lists, sets are sorted."""
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}" if value.denominator != 1 \
            else str(value.numerator)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, np.ndarray):
        return [jsonable(x) for x in value.tolist()]
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return {f.name: jsonable(getattr(value, f.name))
                for f in dataclasses.fields(value) if not f.name.startswith("_")}
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (frozenset, set)):
        return sorted(jsonable(v) for v in value)
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    return str(value)


def report_document(command: str, config: dict, tolerances: dict,
                    result, verdict: str) -> dict:
    return {
        "tool": "combclt",
        "version": __version__,
        "command": command,
        "config": jsonable(config),
        "tolerances": jsonable(tolerances),
        "verdict": verdict,
        "result": jsonable(result),
    }


def write_json(doc: dict, path) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_histogram_csv(rows, path) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("bin_left,bin_right,count\n")
        for left, right, count in rows:
            fh.write(f"{left!r},{right!r},{count}\n")

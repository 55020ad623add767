"""Experiment reports: deterministic JSON, per-cell CSV and an aligned text summary."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .. import __version__


def _clean(obj: Any) -> Any:
    """Convert numpy scalars/arrays to plain JSON values; non-finite floats become None."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


@dataclass(frozen=True)
class Verdict:
    name: str
    passed: bool
    observed: float
    expected: str
    detail: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "passed": self.passed,
            "observed": self.observed,
            "expected": self.expected,
            "detail": self.detail,
        }


def band(name: str, observed: float, lo: float | None = None, hi: float | None = None, detail: str = "") -> Verdict:
    """Verdict for ``lo <= observed <= hi`` (either side optional); NaN fails."""
    ok = math.isfinite(observed)
    if lo is not None:
        ok = ok and observed >= lo
    if hi is not None:
        ok = ok and observed <= hi
    lo_s = "-inf" if lo is None else f"{lo:g}"
    hi_s = "inf" if hi is None else f"{hi:g}"
    return Verdict(name, bool(ok), float(observed), f"[{lo_s}, {hi_s}]", detail)


@dataclass
class ExperimentReport:
    """Everything an experiment produced, reproducible from ``(config, seed)``.

    Wall-clock timings are deliberately not part of the report; they live in
    ``metadata`` which is written to a separate file.
    """

    name: str
    seed: int
    config: dict[str, Any]
    cells: list[dict[str, Any]] = field(default_factory=list)
    fits: dict[str, Any] = field(default_factory=dict)
    stats: dict[str, Any] = field(default_factory=dict)
    verdicts: list[Verdict] = field(default_factory=list)
    metadata: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)

    def verdict(self, name: str) -> Verdict:
        for v in self.verdicts:
            if v.name == name:
                return v
        raise KeyError(name)

    def to_dict(self) -> dict[str, Any]:
        return _clean(
            {
                "experiment": self.name,
                "version": __version__,
                "seed": self.seed,
                "config": self.config,
                "cells": self.cells,
                "fits": self.fits,
                "stats": self.stats,
                "verdicts": [v.to_dict() for v in self.verdicts],
                "passed": self.passed,
            }
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, allow_nan=False) + "\n"

    def cells_csv(self) -> str:
        buf = io.StringIO()
        rows = _clean(self.cells)
        columns: list[str] = []
        for row in rows:
            columns += [k for k in row if k not in columns]
        writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: "" if row.get(k) is None else row.get(k) for k in columns})
        return buf.getvalue()

    def to_text(self) -> str:
        lines = [f"{self.name}  (seed {self.seed})"]
        if self.cells:
            lines.append(_table(_clean(self.cells)))
        for key, value in sorted(_clean(self.fits).items()):
            lines.append(f"fit {key}: {_fmt(value)}")
        for v in self.verdicts:
            mark = "PASS" if v.passed else "FAIL"
            extra = f"  ({v.detail})" if v.detail else ""
            lines.append(f"{mark}  {v.name}: observed {_fmt(v.observed)}  expected {v.expected}{extra}")
        return "\n".join(lines) + "\n"


def _fmt(x: Any) -> str:
    if isinstance(x, float):
        return f"{x:.4g}"
    if x is None:
        return "nan"
    if isinstance(x, dict):
        return ", ".join(f"{k}={_fmt(v)}" for k, v in sorted(x.items()))
    if isinstance(x, list):
        return "[" + ", ".join(_fmt(v) for v in x) + "]"
    return str(x)


def _table(rows: list[dict[str, Any]]) -> str:
    columns: list[str] = []
    for row in rows:
        columns += [k for k in row if k not in columns and not isinstance(row[k], (list, dict))]
    body = [[_fmt(row.get(c)) for c in columns] for row in rows]
    widths = [max(len(c), *(len(r[i]) for r in body)) for i, c in enumerate(columns)]
    out = ["  ".join(c.rjust(w) for c, w in zip(columns, widths))]
    out += ["  ".join(x.rjust(w) for x, w in zip(r, widths)) for r in body]
    return "\n".join(out)


def combine(name: str, reports: list[ExperimentReport], config: dict[str, Any] | None = None) -> ExperimentReport:
    """Merge sub-reports, prefixing cells and verdicts with each sub-report's name."""
    out = ExperimentReport(name=name, seed=reports[0].seed if reports else 0, config=config or {})
    for rep in reports:
        out.cells += [{"experiment": rep.name, **c} for c in rep.cells]
        out.fits.update({f"{rep.name}.{k}": v for k, v in rep.fits.items()})
        out.stats.update({f"{rep.name}.{k}": v for k, v in rep.stats.items()})
        out.verdicts += [Verdict(f"{rep.name}.{v.name}", v.passed, v.observed, v.expected, v.detail) for v in rep.verdicts]
    return out

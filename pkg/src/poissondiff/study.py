"""Convergence studies and the report format shared by every CLI command.

A report is ``{meta, rows, verdicts}``. JSON and CSV encodings render floats
with ``repr``, the shortest string that round-trips, so both carry
identical values.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .core import Rates, check_n
from .verify import ladder_rows

MAX_INTENSITY = 1e6
HALVING_WINDOW = (0.2, 0.8)
# residuals below this are rounding noise (symmetric cases have zero mean residual)
RESIDUAL_FLOOR = 1e-9


@dataclass
class StudyReport:
    meta: dict
    rows: list = field(default_factory=list)
    verdicts: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"meta": self.meta, "rows": self.rows, "verdicts": self.verdicts}

    def to_json(self) -> str:
        return json.dumps(_plain(self.as_dict()), indent=2, allow_nan=False)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        rows = _plain(self.rows)
        if not rows:
            return ""
        header = list(rows[0])
        for row in rows[1:]:
            header += [k for k in row if k not in header]
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(row.get(k)) for k in header])
        return buf.getvalue()


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def _cell(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, dict)):
        return json.dumps(value)
    return value


def base_meta(command: str, flags: dict) -> dict:
    return {"command": command, "flags": flags, "version": __version__,
            "numpy": np.__version__}


def _decreasing(values, floor=0.0):
    return all(b < a or (a <= floor and b <= floor) for a, b in zip(values, values[1:]))


def convergence_study(rates, ladder, tol: float = 1e-12, flags: dict | None = None) -> StudyReport:
    """Exact moments and Gaussian distance against the expansion along an ``n`` ladder."""
    rates = Rates.of(rates)
    ladder = [check_n(n) for n in ladder]
    if not ladder or any(b <= a for a, b in zip(ladder, ladder[1:])):
        raise ValueError("ladder must be non-empty and strictly increasing")
    if ladder[-1] * max(rates) > MAX_INTENSITY:
        raise OverflowError(f"n * tau above {MAX_INTENSITY:g} exceeds the enumeration budget")
    rows = ladder_rows(rates, ladder, tol)
    by_n = {r["n"]: r for r in rows}
    for row in rows:
        half = by_n.get(row["n"] // 2) if row["n"] % 2 == 0 else None
        for key in ("mean_residual", "variance_residual"):
            ratio = None
            if half is not None and half[key] > RESIDUAL_FLOOR:
                ratio = row[key] / half[key]
            row[key.replace("residual", "halving_ratio")] = ratio

    lo, hi = HALVING_WINDOW
    verdicts = {}
    for key in ("mean", "variance"):
        res = [r[f"{key}_residual"] for r in rows]
        ratios = [r[f"{key}_halving_ratio"] for r in rows if r[f"{key}_halving_ratio"] is not None]
        verdicts[f"{key}_residual_decreasing"] = _decreasing(res, RESIDUAL_FLOOR)
        verdicts[f"{key}_halving_ratios_in_window"] = all(lo <= r <= hi for r in ratios)
    verdicts["ks_decreasing"] = _decreasing([r["ks"] for r in rows])
    meta = base_meta("study", flags or {"tau": list(rates), "ladder": ladder, "tol": tol})
    meta.update({"rates": list(rates), "ladder": ladder, "tol": tol,
                 "halving_window": list(HALVING_WINDOW)})
    return StudyReport(meta, rows, verdicts)


def finite_or_none(x):
    return x if isinstance(x, float) and math.isfinite(x) else None

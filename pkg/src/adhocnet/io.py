"""Plain-text formats: curve CSV, metrics CSV and JSON reports.

CSV files open with ``#`` comment lines of ``key=value`` pairs followed by a
column header row.  Floats are written with ``repr`` so that a file
re-read and re-written is byte-identical; undefined cells are left empty.
"""

from __future__ import annotations

import csv
import json
import math
import os
from typing import Iterable, Mapping, Sequence

import numpy as np

from .ensemble import ConnectivityCurve, CurvePoint
from .netmetrics import MetricsTable

__all__ = [
    "CURVE_COLUMNS",
    "METRICS_COLUMNS",
    "format_value",
    "write_csv",
    "read_csv",
    "write_curves_csv",
    "read_curves_csv",
    "write_metrics_csv",
    "read_metrics_csv",
    "write_json",
]

CURVE_COLUMNS = ("z", "sigma", "eta_mean", "eta_stderr", "realizations", "p_global")
METRICS_COLUMNS = ("k", "p_k", "C_k", "knn_k")


def format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "" if math.isnan(v) else repr(float(v))
    return str(v)


def _header_line(header: Mapping) -> str:
    return "# " + " ".join(f"{k}={format_value(v)}" for k, v in header.items())


def write_csv(path, columns: Sequence[str], rows: Iterable[Sequence], header=()) -> None:
    """``header`` is a mapping or a sequence of mappings, one comment line each."""
    if isinstance(header, Mapping):
        header = [header]
    with open(path, "w", newline="") as fh:
        for h in header:
            fh.write(_header_line(h) + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([format_value(v) for v in row])


def read_csv(path) -> tuple[dict, list[dict]]:
    header = {}
    with open(path, newline="") as fh:
        lines = fh.read().splitlines()
    body = []
    for line in lines:
        if line.startswith("#"):
            for tok in line[1:].split():
                k, _, v = tok.partition("=")
                header[k] = v
        elif line:
            body.append(line)
    rows = list(csv.DictReader(body))
    return header, rows


def _num(s: str, kind=float):
    return float("nan") if s == "" else kind(s)


def write_curves_csv(path, curves: Sequence[ConnectivityCurve], header=(), model=None) -> None:
    """One row per (z, sigma); ``model`` maps z to a callable giving eta_model."""
    columns = CURVE_COLUMNS + (("eta_model",) if model is not None else ())
    rows = []
    for c in curves:
        f = model.get(c.z) if model is not None else None
        for p in c.points:
            row = [c.z, p.sigma, p.eta_mean, p.eta_stderr, p.realizations, p.p_global]
            if model is not None:
                row.append(float(f(p.sigma)) if f is not None else None)
            rows.append(row)
    write_csv(path, columns, rows, header)


def read_curves_csv(path) -> list[ConnectivityCurve]:
    _, rows = read_csv(path)
    by_z: dict[int, list[CurvePoint]] = {}
    for row in rows:
        by_z.setdefault(int(row["z"]), []).append(CurvePoint(
            _num(row["sigma"]), _num(row["eta_mean"]), _num(row["eta_stderr"]),
            int(row["realizations"]), _num(row.get("p_global", ""))))
    return [ConnectivityCurve(z, tuple(pts)) for z, pts in sorted(by_z.items())]


def write_metrics_csv(path, table: MetricsTable, extra_header=None) -> None:
    header = []
    if extra_header:
        header.append(extra_header)
    header.append({"z": table.z, "sigma": table.sigma, "realizations": table.realizations,
                   "epsilon": table.epsilon, "threshold": table.threshold})
    dist = table.distribution
    C, knn = table.clustering, table.knn
    rows = [[k, dist.p[k], C.get(k), knn.get(k)] for k in sorted(dist.p)]
    write_csv(path, METRICS_COLUMNS, rows, header)


def read_metrics_csv(path) -> tuple[dict, list[dict]]:
    header, rows = read_csv(path)
    out = [{"k": int(r["k"]), "p_k": _num(r["p_k"]), "C_k": _num(r["C_k"]),
            "knn_k": _num(r["knn_k"])} for r in rows]
    return header, out


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return None if not math.isfinite(obj) else float(obj)
    return obj


def write_json(path, obj) -> None:
    with open(path, "w") as fh:
        json.dump(_clean(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")


def ensure_dir(path) -> str:
    os.makedirs(path, exist_ok=True)
    return os.fspath(path)

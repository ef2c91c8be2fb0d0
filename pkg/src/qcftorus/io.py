"""
Plain-text output formats.

Every float is written with 17 significant digits (``%.16e``) so that files
round-trip losslessly.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .fidelity import DecayFit, FidelitySeries

FLOAT_FMT = "%.16e"
SERIES_HEADER = ("t", "F", "G", "P_minus", "stderr_G")


def _fmt(x) -> str:
    return FLOAT_FMT % float(x)


def write_grid(path, values: np.ndarray, formalism: str, N: int, L: int, t: int) -> Path:
    """Matrix dump with a ``# formalism N L t`` header, one row per line."""
    path = Path(path)
    header = f"{formalism} {N} {L} {t}"
    np.savetxt(path, np.asarray(values, dtype=float), fmt=FLOAT_FMT,
               header=header, comments="# ")
    return path


def read_grid(path):
    """Inverse of `write_grid`; returns (values, meta dict)."""
    path = Path(path)
    with path.open() as fh:
        first = fh.readline()
    if not first.startswith("#"):
        raise ValueError(f"{path}: missing '# formalism N L t' header")
    formalism, N, L, t = first[1:].split()
    values = np.loadtxt(path, comments="#", ndmin=2)
    return values, {"formalism": formalism, "N": int(N), "L": int(L), "t": int(t)}


def write_series(path, series: FidelitySeries) -> Path:
    path = Path(path)
    se = series.stderr_G
    if se is None:
        se = np.zeros(len(series.times))
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SERIES_HEADER)
        for t, F, G, P, s in zip(series.times, series.F, series.G, series.P_minus, se):
            w.writerow([int(t), _fmt(F), _fmt(G), _fmt(P), _fmt(s)])
    return path


def read_series(path) -> dict:
    """Columns of a series CSV as arrays keyed by header name."""
    with Path(path).open(newline="") as fh:
        rows = list(csv.DictReader(fh))
    out = {k: np.array([float(r[k]) for r in rows]) for k in SERIES_HEADER}
    out["t"] = out["t"].astype(int)
    return out


def _json_safe(obj):
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def write_json(path, payload: dict) -> Path:
    """JSON with floats written by repr, which is already lossless."""
    path = Path(path)
    path.write_text(json.dumps(_json_safe(payload), indent=2, sort_keys=True) + "\n")
    return path


def write_fit(path, fit: DecayFit | None, extra: dict | None = None) -> Path:
    payload = {} if fit is None else fit.as_dict()
    if extra:
        payload.update(extra)
    return write_json(path, payload)


def write_table(path, header, rows) -> Path:
    """CSV table; floats formatted losslessly, ints left as is."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([v if isinstance(v, (int, np.integer, str)) else _fmt(v) for v in row])
    return path

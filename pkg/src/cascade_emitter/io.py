"""CSV and JSON artifacts with round-trip exact floats."""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .amplitudes import JointSpectralAmplitude

# 17 significant digits reproduce every float64 exactly
FLOAT_FORMAT = "%.16e"


def _fmt(x) -> str:
    return FLOAT_FORMAT % x


def write_columns(path, columns: dict) -> Path:
    """Write equal-length numeric columns as CSV with a header row."""
    path = Path(path)
    names = list(columns)
    data = [np.asarray(columns[n], dtype=float).ravel() for n in names]
    lengths = {d.size for d in data}
    if len(lengths) > 1:
        raise ValueError(f"columns have different lengths: {sorted(lengths)}")
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names)
        for row in zip(*data):
            w.writerow([_fmt(v) for v in row])
    return path


def write_rows(path, rows: list[dict]) -> Path:
    """Write dict rows sharing the same keys; floats in full precision, other values as text."""
    path = Path(path)
    names = list(rows[0]) if rows else []
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names)
        for row in rows:
            w.writerow([_fmt(row[n]) if isinstance(row[n], float) else row[n] for n in names])
    return path


def read_columns(path) -> dict:
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    names, body = rows[0], rows[1:]
    cols = np.array(body, dtype=float).reshape(len(body), len(names)) if body else np.empty((0, len(names)))
    return {n: cols[:, i] for i, n in enumerate(names)}


def long_format(x, y, values) -> dict:
    """Flatten values[i, j] on (x[i], y[j]) to row-major (x, y, value) columns."""
    xx, yy = np.meshgrid(np.asarray(x, float), np.asarray(y, float), indexing="ij")
    return {"x": xx.ravel(), "y": yy.ravel(), "value": np.asarray(values, float).ravel()}


def jsa_columns(jsa: JointSpectralAmplitude) -> dict:
    kk, qq = np.meshgrid(jsa.omega_k, jsa.omega_q, indexing="ij")
    v = jsa.values
    return {"omega_k": kk.ravel(), "omega_q": qq.ravel(), "re": v.real.ravel(),
            "im": v.imag.ravel(), "abs2": (np.abs(v) ** 2).ravel()}


def jsa_envelope(jsa: JointSpectralAmplitude) -> dict:
    return {
        "grid_k": jsa.grid_k.to_dict(),
        "grid_q": jsa.grid_q.to_dict(),
        "norm_constant": jsa.norm_constant,
        "layout": "row-major, rows indexed by omega_k",
        "re": jsa.values.real.tolist(),
        "im": jsa.values.imag.tolist(),
    }


def write_json(path, doc) -> Path:
    path = Path(path)
    # json emits repr() floats, which round-trip exactly
    path.write_text(json.dumps(doc, indent=2, allow_nan=False) + "\n")
    return path


def read_json(path):
    return json.loads(Path(path).read_text())

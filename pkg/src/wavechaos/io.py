"""Result records: CSV tables, JSON records and binary grid dumps.

Files are written atomically (temporary file in the target directory, then
rename).  Floats in CSV use 17 significant digits so values round-trip.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .errors import ConfigurationError

__all__ = [
    "CHAOS_COLUMNS",
    "atomic_write",
    "config_hash",
    "write_csv",
    "read_csv",
    "chaos_rows_to_csv",
    "write_record",
    "read_record",
    "dump_grid",
    "load_grid",
]

CHAOS_COLUMNS = ("spec_hash", "n", "t", "value", "stderr", "samples", "method", "seed")


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % float(v)
    return str(v)


def atomic_write(path, data: str | bytes) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, mode, **({} if mode == "wb" else {"newline": "", "encoding": "utf-8"})) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def config_hash(config: dict) -> str:
    text = json.dumps(config, sort_keys=True, separators=(",", ":"), default=_json_default)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def csv_text(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        if isinstance(row, dict):
            row = [row[c] for c in columns]
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def write_csv(path, columns, rows) -> Path:
    return atomic_write(path, csv_text(columns, rows))


def _parse(v: str):
    for cast in (int, float):
        try:
            return cast(v)
        except ValueError:
            pass
    if v in ("true", "false"):
        return v == "true"
    return v


def read_csv(path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return [{k: _parse(v) for k, v in row.items()} for row in csv.DictReader(fh)]


def chaos_rows_to_csv(estimates) -> str:
    return csv_text(CHAOS_COLUMNS, [e.as_dict() for e in estimates])


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, (set, tuple)):
        return list(o)
    raise TypeError(f"cannot serialise {type(o).__name__}")


def record_text(record: dict) -> str:
    return json.dumps(record, indent=2, sort_keys=True, default=_json_default) + "\n"


def write_record(path, record: dict) -> Path:
    """Structured-text (JSON) record."""
    return atomic_write(path, record_text(record))


def read_record(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


_GRID_MAGIC = b"WCGRID1\0"


def dump_grid(path, values: np.ndarray, extent: float) -> Path:
    """Binary dump: magic, ``d`` and ``m`` as int64, half-width as float64, then row-major values."""
    values = np.ascontiguousarray(values, dtype="<f8")
    if len(set(values.shape)) != 1:
        raise ConfigurationError("grid dump expects an m^d array")
    header = _GRID_MAGIC + np.array([values.ndim, values.shape[0]], "<i8").tobytes() + np.array([extent], "<f8").tobytes()
    return atomic_write(path, header + values.tobytes())


def load_grid(path):
    raw = Path(path).read_bytes()
    if not raw.startswith(_GRID_MAGIC):
        raise ConfigurationError("not a grid dump")
    off = len(_GRID_MAGIC)
    d, m = np.frombuffer(raw, "<i8", 2, off)
    extent = float(np.frombuffer(raw, "<f8", 1, off + 16)[0])
    vals = np.frombuffer(raw, "<f8", offset=off + 24).reshape((int(m),) * int(d))
    return vals.copy(), extent

"""Output files: CSV time series and JSON reports, written atomically."""
from __future__ import annotations

import io
import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from .induction import SimRecord

SCHEMA_VERSION = 1
CSV_HEADER = "t,norm_Bp,norm_Bq,norm_Bz,energy,max_div"


def write_atomic(path, data: str | bytes) -> None:
    """Write to a temporary file in the target directory, then rename over ``path``."""
    path = Path(path)
    mode = "wb" if isinstance(data, bytes) else "w"
    kwargs = {} if isinstance(data, bytes) else {"encoding": "utf-8", "newline": "\n"}
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, mode, **kwargs) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def fmt(x: float) -> str:
    # repr is the shortest string that round-trips (at most 17 significant digits)
    return repr(float(x))


def timeseries_csv(rec: SimRecord) -> str:
    lines = [f"# schema_version={SCHEMA_VERSION}", CSV_HEADER]
    for t, n, e, d in zip(rec.times, rec.norms, rec.energy, rec.max_div):
        lines.append(",".join(fmt(v) for v in (t, n[0], n[1], n[2], e, d)))
    return "\n".join(lines) + "\n"


def write_timeseries(path, rec: SimRecord) -> None:
    write_atomic(path, timeseries_csv(rec))


def read_timeseries(path) -> SimRecord:
    rows = []
    header_seen = False
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line or line.startswith("#"):
            continue
        if not header_seen:
            if line != CSV_HEADER:
                raise ValueError(f"unexpected CSV header {line!r}")
            header_seen = True
            continue
        rows.append([float(x) for x in line.split(",")])
    a = np.array(rows, dtype=float).reshape(-1, 6)
    return SimRecord(a[:, 0], a[:, 1:4], a[:, 4], a[:, 5])


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def write_json(path, payload: dict) -> None:
    doc = {"schema_version": SCHEMA_VERSION, **_clean(payload)}
    write_atomic(path, json.dumps(doc, indent=2) + "\n")


def read_json(path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def write_snapshots(path, rec: SimRecord) -> None:
    """Snapshots as an ``.npz`` with ``times`` and ``fields`` (n, 3, n_p, n_q, n_z)."""
    buf = io.BytesIO()
    fields = np.stack([s.values for s in rec.snapshots]) if rec.snapshots else np.zeros((0,))
    np.savez(buf, schema_version=SCHEMA_VERSION, times=rec.times, fields=fields)
    write_atomic(path, buf.getvalue())

"""Deterministic CSV/JSON artifact writers.

Every dataset is a CSV file whose body is byte-reproducible for a given
configuration, plus a ``<stem>.meta.json`` sidecar carrying the resolved
configuration and solver details (the sidecar holds the only timestamp).
"""

import json
import os
from datetime import datetime, timezone

import numpy as np

__all__ = ["format_float", "write_csv", "write_metadata", "csv_path", "meta_path"]


def format_float(x) -> str:
    """17-significant-digit decimal form, enough to round-trip a double."""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def write_csv(path: str, header: list[str], columns: list) -> str:
    """Write named columns of equal length; returns the path."""
    cols = [np.atleast_1d(np.asarray(c)) for c in columns]
    if len(cols) != len(header):
        raise ValueError("header/column count mismatch")
    n = cols[0].shape[0]
    if any(c.shape[0] != n for c in cols):
        raise ValueError("columns must have equal length")
    lines = [",".join(header)]
    for i in range(n):
        lines.append(",".join(format_float(c[i]) for c in cols))
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def write_metadata(path: str, payload: dict) -> str:
    """JSON sidecar with a creation timestamp added on top of ``payload``."""
    record = dict(payload)
    record.setdefault("created_at", datetime.now(timezone.utc).isoformat())
    with open(path, "w") as fh:
        json.dump(record, fh, indent=2, sort_keys=True, default=_coerce)
        fh.write("\n")
    return path


def _coerce(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON-serializable: {type(obj)!r}")


def csv_path(out_dir: str, stem: str) -> str:
    return os.path.join(out_dir, stem + ".csv")


def meta_path(out_dir: str, stem: str) -> str:
    return os.path.join(out_dir, stem + ".meta.json")

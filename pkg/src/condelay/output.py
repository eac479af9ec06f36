"""Artifact emission: JSON and CSV, written atomically.

Numbers are serialized with 12 significant digits; infinities become the
strings "inf" / "-inf" so every artifact stays strict JSON.
"""

from __future__ import annotations

import csv
import json
import math
import os
import tempfile
from typing import Any, Iterable, Sequence

import numpy as np


def format_float(x: float) -> str:
    return f"{float(x):.12g}"


def _scrub(obj: Any) -> Any:
    """Make obj json-dumpable under the serialization rules above."""
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            raise ValueError("refusing to serialize NaN")
        return float(format_float(x))
    if isinstance(obj, (np.integer, int)) and not isinstance(obj, bool):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_scrub(v) for v in obj.tolist()]
    if isinstance(obj, (list, tuple)):
        return [_scrub(v) for v in obj]
    if isinstance(obj, dict):
        return {str(k): _scrub(v) for k, v in obj.items()}
    return obj


def _atomic_write(path: str, writer) -> None:
    # temp file in the destination directory so os.replace stays atomic
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            writer(fh)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def write_json(path: str, obj: Any) -> None:
    payload = _scrub(obj)
    _atomic_write(path, lambda fh: (
        json.dump(payload, fh, indent=2, sort_keys=True), fh.write("\n")))


def write_csv(path: str, header: Sequence[str],
              rows: Iterable[Sequence[Any]]) -> None:
    def emit(fh):
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([format_float(v) if isinstance(v, (float, np.floating))
                        else v for v in row])
    _atomic_write(path, emit)

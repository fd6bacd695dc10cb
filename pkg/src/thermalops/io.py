"""JSON and CSV serialisation helpers.

Matrices are written as ``{"rows": n, "cols": m, "data": [[re, im], ...]}``
in row-major order. Python's float ``repr`` is the shortest string that
round-trips, so doubles survive a write/read cycle bit-for-bit.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile

import numpy as np


def matrix_to_json(M) -> dict:
    M = np.asarray(M, dtype=complex)
    flat = M.reshape(-1)
    return {
        "rows": int(M.shape[0]),
        "cols": int(M.shape[1]),
        "data": [[float(z.real), float(z.imag)] for z in flat],
    }


def matrix_from_json(obj) -> np.ndarray:
    rows, cols = int(obj["rows"]), int(obj["cols"])
    data = np.asarray(obj["data"], dtype=float)
    if data.shape != (rows * cols, 2):
        raise ValueError(f"matrix JSON has {data.shape[0]} entries, expected {rows * cols}")
    return (data[:, 0] + 1j * data[:, 1]).reshape(rows, cols)


def complex_to_json(z: complex) -> list:
    return [float(np.real(z)), float(np.imag(z))]


def dumps(obj) -> str:
    """Deterministic JSON text: sorted keys, fixed separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def atomic_write(path, text: str) -> None:
    """Write ``text`` to ``path`` through a temporary file and ``os.replace``."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])
    return buf.getvalue()

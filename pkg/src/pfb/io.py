"""Field and series writers: legacy ASCII VTK and RFC 4180 CSV.

Floats are written with ``repr`` (shortest round-trip form) so identical data
always gives identical bytes.
"""

from __future__ import annotations

import csv
import io as _io
import json
import os
from pathlib import Path
from typing import Mapping, Optional, Sequence

import numpy as np

from .errors import InvalidArgumentError

OUTPUT_ENV = "PFB_OUTPUT_DIR"
DEFAULT_OUTPUT = "pfb-output"


def output_root(explicit=None) -> Path:
    """Output directory: explicit argument, then ``$PFB_OUTPUT_DIR``, then ``./pfb-output``."""
    if explicit:
        return Path(explicit)
    return Path(os.environ.get(OUTPUT_ENV) or DEFAULT_OUTPUT)


def format_float(x) -> str:
    x = float(x)
    if x == 0.0:
        return "0.0"  # folds -0.0
    return repr(x)


def _format_value(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format_float(v)
    if v is None:
        return ""
    return str(v)


def _field_kind(name, values, n, where):
    if not name or any(ch.isspace() for ch in name):
        raise InvalidArgumentError(f"invalid field name {name!r}")
    arr = np.asarray(values, dtype=float)
    if arr.shape[:1] != (n,):
        raise InvalidArgumentError(
            f"{where} field {name!r} has {arr.shape[0] if arr.ndim else 0} entries, expected {n}"
        )
    if arr.ndim == 1:
        return "SCALARS", arr
    if arr.ndim == 2 and arr.shape[1] in (2, 3):
        if arr.shape[1] == 2:
            arr = np.column_stack([arr, np.zeros(n)])
        return "VECTORS", arr
    raise InvalidArgumentError(f"{where} field {name!r} must be (n,) or (n, 2|3), got {arr.shape}")


def vtk_text(mesh, point_data: Optional[Mapping] = None, cell_data: Optional[Mapping] = None,
             title="pfb") -> str:
    """Legacy VTK 3.0 ASCII unstructured grid as a string."""
    point_data = dict(point_data or {})
    cell_data = dict(cell_data or {})
    N, T = mesh.n_nodes, mesh.n_triangles
    checked_p = [(k, *_field_kind(k, v, N, "point")) for k, v in point_data.items()]
    checked_c = [(k, *_field_kind(k, v, T, "cell")) for k, v in cell_data.items()]

    out = ["# vtk DataFile Version 3.0", title.replace("\n", " ")[:255], "ASCII",
           "DATASET UNSTRUCTURED_GRID", f"POINTS {N} double"]
    out += [f"{format_float(x)} {format_float(y)} 0.0" for x, y in mesh.points.tolist()]
    out.append(f"CELLS {T} {4 * T}")
    out += [f"3 {a} {b} {c}" for a, b, c in mesh.triangles.tolist()]
    out.append(f"CELL_TYPES {T}")
    out += ["5"] * T

    def section(header, n, fields):
        if not fields:
            return
        out.append(f"{header} {n}")
        for name, kind, arr in fields:
            if kind == "SCALARS":
                out.extend([f"SCALARS {name} double 1", "LOOKUP_TABLE default"])
                out.extend(format_float(v) for v in arr.tolist())
            else:
                out.append(f"VECTORS {name} double")
                out.extend(" ".join(format_float(c) for c in row) for row in arr.tolist())

    section("POINT_DATA", N, checked_p)
    section("CELL_DATA", T, checked_c)
    return "\n".join(out) + "\n"


def write_vtk(mesh, path, point_data=None, cell_data=None, title="pfb"):
    text = vtk_text(mesh, point_data, cell_data, title)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="ascii", newline="\n")
    return path


def read_vtk(path):
    """Read back a file produced by ``write_vtk``.

    Returns a dict with ``points`` (N, 2), ``cells`` (T, 3), ``point_data`` and
    ``cell_data`` (name -> array).
    """
    tokens = Path(path).read_text(encoding="ascii").split("\n")
    lines = [ln.strip() for ln in tokens]
    i = 4
    head = lines[i].split()
    n = int(head[1])
    pts = np.array([[float(v) for v in lines[i + 1 + k].split()[:2]] for k in range(n)])
    i += n + 1
    t = int(lines[i].split()[1])
    cells = np.array([[int(v) for v in lines[i + 1 + k].split()[1:]] for k in range(t)], dtype=np.int64)
    i += t + 1
    i += t + 1  # CELL_TYPES block
    data = {"point_data": {}, "cell_data": {}}
    target, count = None, 0
    while i < len(lines) and lines[i]:
        parts = lines[i].split()
        if parts[0] in ("POINT_DATA", "CELL_DATA"):
            target = data["point_data" if parts[0] == "POINT_DATA" else "cell_data"]
            count = int(parts[1])
            i += 1
        elif parts[0] == "SCALARS":
            target[parts[1]] = np.array([float(lines[i + 2 + k]) for k in range(count)])
            i += 2 + count
        elif parts[0] == "VECTORS":
            target[parts[1]] = np.array(
                [[float(v) for v in lines[i + 1 + k].split()] for k in range(count)]
            )
            i += 1 + count
        else:
            raise InvalidArgumentError(f"unexpected VTK line {lines[i]!r}")
    return {"points": pts, "cells": cells, **data}


def series_text(records: Sequence[Mapping], columns: Optional[Sequence[str]] = None) -> str:
    if columns is None:
        if not records:
            raise InvalidArgumentError("column names are required for an empty series")
        columns = list(records[0])
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(columns)
    for rec in records:
        missing = [c for c in columns if c not in rec]
        if missing:
            raise InvalidArgumentError(f"record lacks columns {missing}")
        w.writerow([_format_value(rec[c]) for c in columns])
    return buf.getvalue()


def write_series(records, path, columns=None):
    """Write scalar records as CSV with a header row (header only when empty)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(series_text(records, columns))
    return path


def read_series(path):
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    return header, [[float(v) if v else None for v in r] for r in body]


def _jsonable(obj):
    if isinstance(obj, Mapping):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if np.isfinite(x) else None
    return obj


def dumps_json(obj) -> str:
    """Canonical JSON text: sorted keys, two-space indent, non-finite floats as null."""
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_json(obj, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_json(obj), encoding="utf-8", newline="\n")
    return path

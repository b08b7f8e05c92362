"""CSV layout for datasets and responses.

Predictor file::

    sample_id,x0,x1,...          # header; column labels are free text
    domain,3.5,3.4985,...        # optional grid row
    cell-001,0.0012,0.0011,...

Response file::

    sample_id,y
    cell-001,1852

Floats are written with ``repr`` (shortest string that round-trips).
"""

from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import CsvParseError, InputError
from .preprocess import Dataset, transform_response


def fmt_float(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x == 0.0:
        return "0.0"  # collapse -0.0 so outputs diff cleanly
    return repr(x)


def _parse(cell: str, path, row: int, col: int) -> float:
    try:
        val = float(cell)
    except ValueError:
        raise CsvParseError(f"non-numeric cell {cell!r}", path, row, col) from None
    if not math.isfinite(val):
        raise CsvParseError(f"non-finite cell {cell!r}", path, row, col)
    return val


def _read_rows(path) -> list[list[str]]:
    path = Path(path)
    if not path.is_file():
        raise InputError(f"no such file: {path}")
    with path.open(newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise CsvParseError("empty file", path)
    return rows


def read_response(path) -> dict[str, float]:
    rows = _read_rows(path)
    out: dict[str, float] = {}
    for i, r in enumerate(rows[1:], start=2):
        if len(r) != 2:
            raise CsvParseError(f"expected 2 cells, got {len(r)}", path, i)
        key = r[0].strip()
        if key in out:
            raise CsvParseError(f"duplicate sample id {key!r}", path, i, 1)
        out[key] = _parse(r[1], path, i, 2)
    return out


def load_csv(path, response=None, response_transform: str | None = None, name: str | None = None) -> Dataset:
    """Read a predictor CSV and, optionally, a response CSV keyed by sample id."""
    rows = _read_rows(path)
    header = rows[0]
    width = len(header)
    if width < 2:
        raise CsvParseError("need a sample id column and at least one predictor", path, 1)
    body = rows[1:]
    domain = None
    if body and body[0][0].strip().lower() == "domain":
        r = body[0]
        if len(r) != width:
            raise CsvParseError(f"expected {width} cells, got {len(r)}", path, 2)
        domain = np.array([_parse(c, path, 2, j + 2) for j, c in enumerate(r[1:])])
        body = body[1:]
        first = 3
    else:
        first = 2
    if not body:
        raise CsvParseError("no data rows", path)
    ids: list[str] = []
    seen: set[str] = set()
    X = np.empty((len(body), width - 1))
    for i, r in enumerate(body):
        line = i + first
        if len(r) != width:
            raise CsvParseError(f"ragged row: expected {width} cells, got {len(r)}", path, line)
        sid = r[0].strip()
        if sid in seen:
            raise CsvParseError(f"duplicate sample id {sid!r}", path, line, 1)
        seen.add(sid)
        ids.append(sid)
        X[i] = [_parse(c, path, line, j + 2) for j, c in enumerate(r[1:])]

    y = None
    if response is not None:
        table = read_response(response)
        missing = [s for s in ids if s not in table]
        if missing:
            raise InputError(f"response file {response} has no value for sample id {missing[0]!r}")
        y = np.array([table[s] for s in ids])
    ds = Dataset(X, y, domain=domain, sample_ids=tuple(ids), name=name or Path(path).stem,
                 meta={"columns": tuple(h.strip() for h in header[1:])})
    if response_transform is not None:
        ds = transform_response(ds, response_transform)
    return ds


def save_csv(d: Dataset, path, response_path=None, column_labels: Sequence[str] | None = None) -> None:
    """Write ``d`` in the layout read by :func:`load_csv` (raw response if transformed)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    ids = d.sample_ids or tuple(f"s{i:04d}" for i in range(d.n))
    labels = column_labels or d.meta.get("columns") or tuple(f"x{j}" for j in range(d.p))
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["sample_id", *labels])
        if d.domain is not None:
            w.writerow(["domain", *map(fmt_float, d.domain)])
        for sid, row in zip(ids, d.X):
            w.writerow([sid, *map(fmt_float, row)])
    if response_path is not None:
        y = d.require_y()
        if d.response_transform == "log10":
            y = np.power(10.0, y)
        write_response(response_path, ids, y)


def write_response(path, ids: Iterable[str], y) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["sample_id", "y"])
        for sid, val in zip(ids, np.asarray(y, dtype=float)):
            w.writerow([sid, fmt_float(val)])


def convert_wide(path, out_path, out_response=None, id_column: str = "sample_id",
                 response_column: str | None = None, domain_row: int | None = None) -> Dataset:
    """Convert a wide CSV (ids in one named column, optional response column) to the canonical layout.

    ``domain_row`` is the 0-based data-row index holding the grid, if any.
    """
    rows = _read_rows(path)
    header = [h.strip() for h in rows[0]]
    if id_column not in header:
        raise CsvParseError(f"no column named {id_column!r}", path, 1)
    id_idx = header.index(id_column)
    resp_idx = header.index(response_column) if response_column else None
    if response_column and response_column not in header:
        raise CsvParseError(f"no column named {response_column!r}", path, 1)
    feat_idx = [j for j in range(len(header)) if j not in (id_idx, resp_idx)]
    domain = None
    ids, Xrows, ys = [], [], []
    for i, r in enumerate(rows[1:]):
        line = i + 2
        if len(r) != len(header):
            raise CsvParseError(f"ragged row: expected {len(header)} cells, got {len(r)}", path, line)
        vals = [_parse(r[j], path, line, j + 1) for j in feat_idx]
        if domain_row is not None and i == domain_row:
            domain = np.array(vals)
            continue
        ids.append(r[id_idx].strip())
        Xrows.append(vals)
        if resp_idx is not None:
            ys.append(_parse(r[resp_idx], path, line, resp_idx + 1))
    if len(set(ids)) != len(ids):
        raise CsvParseError("duplicate sample ids", path)
    ds = Dataset(np.array(Xrows), np.array(ys) if ys else None, domain=domain, sample_ids=tuple(ids),
                 meta={"columns": tuple(header[j] for j in feat_idx)})
    save_csv(ds, out_path, out_response if ys else None)
    return ds

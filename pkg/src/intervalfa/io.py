"""
CSV ingestion/emission of interval datasets and a deterministic JSON writer.

CSV layout: one header row, then one row per unit.  Each variable ``V``
occupies either two columns ``V.lower,V.upper`` or three columns
``V.lower,V.mode,V.upper``.  An optional first column whose name carries no
suffix holds unit labels.
"""

from __future__ import annotations

import csv
import json
import logging
import math
from pathlib import Path

import numpy as np

from .core import IntervalDataset
from .errors import InputFormatError, InvalidIntervalError

log = logging.getLogger(__name__)

_SUFFIXES = ("lower", "mode", "upper")
FORMATS = ("auto", "pairs", "triplets")


def _split_header(name: str):
    stem, dot, suffix = name.strip().rpartition(".")
    if dot and suffix.lower() in _SUFFIXES and stem:
        return stem, suffix.lower()
    return None, None


def _parse_header(header):
    label_col = None
    fields = [_split_header(h) for h in header]
    if header and fields[0][0] is None:
        label_col = 0
    variables: dict[str, dict[str, int]] = {}
    order = []
    for j, (stem, suffix) in enumerate(fields):
        if j == label_col:
            continue
        if stem is None:
            raise InputFormatError("header must use '<name>.lower', '<name>.mode' or '<name>.upper'", row=1, column=header[j])
        slots = variables.setdefault(stem, {})
        if stem not in order:
            order.append(stem)
        if suffix in slots:
            raise InputFormatError(f"duplicate column for variable {stem!r}", row=1, column=header[j])
        slots[suffix] = j
    if not variables:
        raise InputFormatError("no interval variables in header", row=1)
    for stem, slots in variables.items():
        if "lower" not in slots or "upper" not in slots:
            raise InputFormatError(f"variable {stem!r} needs both .lower and .upper columns", row=1, column=stem)
    return label_col, order, variables


def _cell(value: str, row: int, column: str) -> float:
    try:
        x = float(value)
    except ValueError:
        raise InputFormatError(f"malformed number {value!r}", row=row, column=column) from None
    if not math.isfinite(x):
        raise InputFormatError(f"non-finite number {value!r}", row=row, column=column)
    return x


def ingest_csv(path, format: str = "auto") -> IntervalDataset:
    """Read an interval dataset from a CSV file.

    Parameters
    ----------
    path : str or Path
    format : {"auto", "pairs", "triplets"}
        ``"pairs"`` ignores mode columns, ``"triplets"`` requires them.  With
        ``"auto"`` modes are kept only when every variable has a mode column.

    Raises
    ------
    InputFormatError
        Malformed header or cell, ragged row, empty file, ``lower > upper``
        or a mode outside its bounds.  Row numbers count the header as 1.
    """
    if format not in FORMATS:
        raise InputFormatError(f"unknown CSV format {format!r}")
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except FileNotFoundError:
        raise InputFormatError(f"no such file: {path}") from None
    except UnicodeDecodeError as exc:
        raise InputFormatError(f"file is not UTF-8: {exc}") from None
    rows = [r for r in rows if any(c.strip() for c in r)]
    if not rows:
        raise InputFormatError("empty file")
    header = [h.strip() for h in rows[0]]
    label_col, order, variables = _parse_header(header)
    with_mode = [("mode" in variables[v]) for v in order]
    if format == "triplets" and not all(with_mode):
        missing = order[with_mode.index(False)]
        raise InputFormatError("triplet format requires a mode column for every variable", column=missing)
    use_mode = format != "pairs" and all(with_mode)
    if format == "auto" and any(with_mode) and not use_mode:
        log.warning("mode columns present for only some variables; modes ignored")
    body = rows[1:]
    if not body:
        raise InputFormatError("no data rows")
    n, p = len(body), len(order)
    lower = np.empty((n, p))
    upper = np.empty((n, p))
    mode = np.empty((n, p)) if use_mode else None
    units = [] if label_col is not None else None
    for i, raw in enumerate(body):
        rownum = i + 2
        if len(raw) != len(header):
            raise InputFormatError(f"expected {len(header)} fields, found {len(raw)}", row=rownum)
        if units is not None:
            units.append(raw[label_col].strip())
        for j, name in enumerate(order):
            slots = variables[name]
            lo = _cell(raw[slots["lower"]], rownum, header[slots["lower"]])
            hi = _cell(raw[slots["upper"]], rownum, header[slots["upper"]])
            if lo > hi:
                raise InputFormatError(f"lower {lo} exceeds upper {hi}", row=rownum, column=name)
            lower[i, j], upper[i, j] = lo, hi
            if use_mode:
                md = _cell(raw[slots["mode"]], rownum, header[slots["mode"]])
                if not lo <= md <= hi:
                    raise InputFormatError(f"mode {md} outside [{lo}, {hi}]", row=rownum, column=name)
                mode[i, j] = md
    try:
        return IntervalDataset(lower, upper, mode, names=order, units=units)
    except InvalidIntervalError as exc:
        raise InputFormatError(str(exc)) from None


def emit_csv(data: IntervalDataset, path, with_mode: bool | None = None) -> None:
    """Write ``data`` in the layout read by :func:`ingest_csv`.

    Numbers use ``repr`` so that reading the file back reproduces the
    dataset exactly.
    """
    if with_mode is None:
        with_mode = data.has_mode
    if with_mode and not data.has_mode:
        raise InputFormatError("dataset has no modes to write")
    parts = _SUFFIXES if with_mode else ("lower", "upper")
    header = ([] if data.units is None else ["unit"]) + [f"{v}.{s}" for v in data.names for s in parts]
    arrays = {"lower": data.lower, "upper": data.upper, "mode": data.mode}
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for i in range(data.n):
            row = [] if data.units is None else [data.units[i]]
            for j in range(data.p):
                row.extend(repr(float(arrays[s][i, j])) for s in parts)
            writer.writerow(row)


# -- JSON -------------------------------------------------------------------------


def _encode(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return format(x, ".17g") if math.isfinite(x) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist(), indent, level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + _encode(v, indent, level + 1) for v in obj) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps_json(obj, indent: int = 2) -> str:
    """JSON text with floats at 17 significant digits and keys in insertion order.

    Non-finite floats become ``null``.
    """
    return _encode(obj, indent, 0) + "\n"


def write_json(obj, path, indent: int = 2) -> None:
    Path(path).write_text(dumps_json(obj, indent), encoding="utf-8")

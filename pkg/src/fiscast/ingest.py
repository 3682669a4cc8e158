"""Long-format CSV ingestion: ``year,series,value``."""

from __future__ import annotations

import csv
import re
from pathlib import Path

import numpy as np

from .errors import GapError, NonNumeric, SchemaError
from .series import AnnualSeries, SeriesFrame, align

HEADER = ("year", "series", "value")
_YEAR = re.compile(r"^\d{4}$")
_NUMBER = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")
_NAME = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")


def read_series(path) -> dict:
    """Parse the file into one :class:`AnnualSeries` per name.

    Series may cover different year spans but each must be gap-free.
    """
    path = Path(path)
    rows: dict = {}
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise SchemaError(1, "file is empty")
        if tuple(h.strip().lstrip("﻿") for h in header) != HEADER:
            raise SchemaError(1, f"header must be {','.join(HEADER)}")
        for line, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 3:
                raise SchemaError(line, f"expected 3 fields, got {len(row)}")
            year_s, name, value_s = (c.strip() for c in row)
            if not _YEAR.match(year_s):
                raise SchemaError(line, f"year {year_s!r} is not a 4-digit integer")
            if not _NAME.match(name):
                raise SchemaError(line, f"series name {name!r} is not an identifier")
            if not _NUMBER.match(value_s):
                raise NonNumeric(line, value_s)
            key = (int(year_s), name)
            if key in rows:
                raise SchemaError(line, f"duplicate row for {name} in {year_s}")
            rows[key] = float(value_s)
    if not rows:
        raise SchemaError(2, "no data rows")
    by_name: dict = {}
    for (year, name), v in rows.items():
        by_name.setdefault(name, {})[year] = v
    out = {}
    for name in sorted(by_name):
        points = by_name[name]
        first, last = min(points), max(points)
        for year in range(first, last + 1):
            if year not in points:
                raise GapError(name, year)
        out[name] = AnnualSeries(name, first, np.array([points[y] for y in range(first, last + 1)]))
    return out


def ingest_csv(path) -> SeriesFrame:
    """Validated frame of every series, trimmed to their common years."""
    return align(list(read_series(path).values()))

"""Annual series value types, alignment, splitting and growth rates."""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    DuplicateName,
    EmptyIntersection,
    HoldoutTooLarge,
    InvalidArgument,
    InvalidSeries,
    ZeroDenominator,
)


@dataclass(frozen=True, eq=False)
class AnnualSeries:
    """A named, gap-free annual series.

    ``values`` is stored as a read-only float array; element ``i`` belongs
    to year ``start_year + i``.
    """

    name: str
    start_year: int
    values: np.ndarray

    def __post_init__(self):
        arr = np.array(self.values, dtype=float).reshape(-1)
        if arr.size < 1:
            raise InvalidSeries(f"series {self.name!r} is empty")
        bad = ~np.isfinite(arr)
        if bad.any():
            year = self.start_year + int(np.argmax(bad))
            raise InvalidSeries(f"series {self.name!r} has a non-finite value at {year}")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "start_year", int(self.start_year))

    def __len__(self):
        return self.values.size

    def __repr__(self):
        return f"AnnualSeries({self.name!r}, {self.start_year}-{self.end_year}, n={len(self)})"

    def __eq__(self, other):
        if not isinstance(other, AnnualSeries):
            return NotImplemented
        return (
            self.name == other.name
            and self.start_year == other.start_year
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None

    @property
    def end_year(self) -> int:
        return self.start_year + len(self) - 1

    @property
    def years(self) -> np.ndarray:
        return np.arange(self.start_year, self.end_year + 1)

    def value_at(self, year: int) -> float:
        if not self.start_year <= year <= self.end_year:
            raise KeyError(year)
        return float(self.values[year - self.start_year])

    def window(self, first: int, last: int) -> AnnualSeries:
        """Restrict to the inclusive year range ``[first, last]``."""
        if first < self.start_year or last > self.end_year or first > last:
            raise InvalidArgument(
                f"window {first}-{last} outside {self.name!r} ({self.start_year}-{self.end_year})"
            )
        i, j = first - self.start_year, last - self.start_year + 1
        return AnnualSeries(self.name, first, self.values[i:j])

    def replace(self, *, name=None, start_year=None, values=None) -> AnnualSeries:
        return AnnualSeries(
            self.name if name is None else name,
            self.start_year if start_year is None else start_year,
            self.values if values is None else values,
        )

    def to_dict(self) -> dict:
        return {"name": self.name, "start_year": self.start_year, "values": self.values.tolist()}


@dataclass(frozen=True, eq=False)
class SeriesFrame:
    """Columns sharing exactly one inclusive year range."""

    year_range: tuple
    columns: Mapping[str, AnnualSeries] = field(default_factory=dict)

    def __post_init__(self):
        first, last = (int(y) for y in self.year_range)
        if not self.columns:
            raise InvalidArgument("a frame needs at least one column")
        for name, s in self.columns.items():
            if s.start_year != first or s.end_year != last:
                raise InvalidArgument(f"column {name!r} does not cover {first}-{last}")
        object.__setattr__(self, "year_range", (first, last))
        object.__setattr__(self, "columns", MappingProxyType(dict(self.columns)))

    @classmethod
    def from_arrays(cls, start_year: int, data: Mapping[str, Sequence[float]]) -> SeriesFrame:
        cols = {k: AnnualSeries(k, start_year, v) for k, v in data.items()}
        return align(list(cols.values()))

    def __getitem__(self, name: str) -> AnnualSeries:
        return self.columns[name]

    def __contains__(self, name):
        return name in self.columns

    def __len__(self):
        return self.year_range[1] - self.year_range[0] + 1

    def __repr__(self):
        return f"SeriesFrame({self.year_range[0]}-{self.year_range[1]}, columns={list(self.columns)})"

    @property
    def names(self) -> list:
        return list(self.columns)

    @property
    def years(self) -> np.ndarray:
        return np.arange(self.year_range[0], self.year_range[1] + 1)

    def matrix(self, names: Iterable[str]) -> np.ndarray:
        """Stack the named columns as an ``(n, k)`` array."""
        names = list(names)
        if not names:
            return np.empty((len(self), 0))
        return np.column_stack([self.columns[n].values for n in names])

    def select(self, names: Iterable[str]) -> SeriesFrame:
        return SeriesFrame(self.year_range, {n: self.columns[n] for n in names})

    def window(self, first: int, last: int) -> SeriesFrame:
        return SeriesFrame((first, last), {k: s.window(first, last) for k, s in self.columns.items()})

    def with_column(self, series: AnnualSeries) -> SeriesFrame:
        cols = dict(self.columns)
        cols[series.name] = series
        return SeriesFrame(self.year_range, cols)


def align(series_list: Sequence[AnnualSeries]) -> SeriesFrame:
    """Trim every series to the common year intersection."""
    if not series_list:
        raise InvalidArgument("align needs at least one series")
    seen = set()
    for s in series_list:
        if s.name in seen:
            raise DuplicateName(f"duplicate series name {s.name!r}")
        seen.add(s.name)
    first = max(s.start_year for s in series_list)
    last = min(s.end_year for s in series_list)
    if first > last:
        raise EmptyIntersection("series share no common years")
    return SeriesFrame((first, last), {s.name: s.window(first, last) for s in series_list})


def slice_train_test(frame: SeriesFrame, holdout_years: int):
    """Split off the last ``holdout_years`` years as a test frame."""
    if holdout_years < 1:
        raise InvalidArgument("holdout_years must be positive")
    if holdout_years >= len(frame):
        raise HoldoutTooLarge(f"holdout of {holdout_years} leaves no training data in {len(frame)} years")
    first, last = frame.year_range
    cut = last - holdout_years
    return frame.window(first, cut), frame.window(cut + 1, last)


def growth_rates(series: AnnualSeries) -> AnnualSeries:
    """Year-on-year proportional change ``(v_t - v_{t-1}) / v_{t-1}``."""
    v = series.values
    if v.size < 2:
        raise InvalidArgument("growth rates need at least two observations")
    prev = v[:-1]
    zero = np.flatnonzero(prev == 0)
    if zero.size:
        raise ZeroDenominator(series.start_year + int(zero[0]))
    return AnnualSeries(series.name, series.start_year + 1, np.diff(v) / prev)

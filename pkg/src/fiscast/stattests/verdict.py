"""Combined reading of several unit-root and stationarity tests."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidArgument
from ..series import AnnualSeries

TREND_LIKE_R2 = 0.8


@dataclass(frozen=True)
class StationarityVerdict:
    per_test: list
    concordant: bool
    recommended_transforms: list
    stationary: bool | None

    def to_dict(self) -> dict:
        return {
            "tests": [r.to_dict() for r in self.per_test],
            "concordant": self.concordant,
            "stationary": self.stationary,
            "recommended_transforms": list(self.recommended_transforms),
        }


def growth_is_trend_like(series: AnnualSeries) -> bool:
    """Strictly positive and log-linear in time (R^2 of ln y on a trend >= 0.8)."""
    v = series.values
    if v.size < 3 or np.any(v <= 0):
        return False
    ly = np.log(v)
    t = np.arange(v.size, dtype=float)
    X = np.column_stack([np.ones_like(t), t])
    resid = ly - X @ np.linalg.lstsq(X, ly, rcond=None)[0]
    sst = float(np.sum((ly - ly.mean()) ** 2))
    if sst == 0:
        return False
    return 1.0 - float(resid @ resid) / sst >= TREND_LIKE_R2


def stationarity_verdict(reports, series: AnnualSeries | None = None) -> StationarityVerdict:
    """Combine test outcomes, accounting for KPSS's reversed null.

    Agreement on stationarity recommends the level; agreement on a unit root
    recommends first differences and the HP filter; disagreement recommends
    the same pair, plus the log when ``series`` is positive with trend-like
    growth.
    """
    reports = list(reports)
    if len(reports) < 2:
        raise InvalidArgument("a verdict needs at least two test reports")
    votes = {r.suggests_stationary for r in reports}
    concordant = len(votes) == 1
    if concordant and votes == {True}:
        return StationarityVerdict(reports, True, ["level"], True)
    transforms = ["difference-1", "HP"]
    if not concordant and series is not None and growth_is_trend_like(series):
        transforms.append("log")
    return StationarityVerdict(reports, concordant, transforms, False if concordant else None)

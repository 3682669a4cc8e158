"""Forecast-error measures, error tables and accuracy gains.

Errors are ``forecast - actual``: a positive mean error is over-prediction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BothZero, BothZeroSeries, InvariantViolation, LengthMismatch, SampleMismatch, ZeroBaseline
from .series import AnnualSeries

SIGN_CONVENTION = "forecast - actual (positive ME = overestimation)"
MEASURES = ("me", "mae", "smae", "rmse", "theil_u1")
_INVARIANT_TOL = 1e-12


def _pair(actual, forecast):
    a = np.asarray(actual.values if isinstance(actual, AnnualSeries) else actual, dtype=float)
    f = np.asarray(forecast.values if isinstance(forecast, AnnualSeries) else forecast, dtype=float)
    if a.size != f.size:
        raise LengthMismatch(f"actual has {a.size} values, forecast {f.size}")
    if a.size < 1:
        raise LengthMismatch("no values to compare")
    return a, f


def mean_error(actual, forecast) -> float:
    a, f = _pair(actual, forecast)
    return float(np.mean(f - a))


def mae(actual, forecast) -> float:
    a, f = _pair(actual, forecast)
    return float(np.mean(np.abs(f - a)))


def smae(actual, forecast) -> float:
    """Mean of ``|f - a| / ((|a| + |f|) / 2)``."""
    a, f = _pair(actual, forecast)
    denom = (np.abs(a) + np.abs(f)) / 2.0
    zero = np.flatnonzero(denom == 0)
    if zero.size:
        raise BothZero(f"actual and forecast are both zero at position {int(zero[0])}")
    return float(np.mean(np.abs(f - a) / denom))


def rmse(actual, forecast) -> float:
    a, f = _pair(actual, forecast)
    return float(math.sqrt(np.mean((f - a) ** 2)))


def theil_u1(actual, forecast) -> float:
    """Bounded Theil U1: RMSE over the sum of the two root mean squares."""
    a, f = _pair(actual, forecast)
    denom = math.sqrt(np.mean(a**2)) + math.sqrt(np.mean(f**2))
    if denom == 0:
        raise BothZeroSeries("actual and forecast are identically zero")
    return float(math.sqrt(np.mean((f - a) ** 2)) / denom)


def invariant_violations(me, mae_, smae_, rmse_, u1, tol=_INVARIANT_TOL) -> list:
    out = []
    if mae_ < abs(me) - tol * max(1.0, abs(me)):
        out.append("MAE < |ME|")
    if rmse_ < mae_ - tol * max(1.0, mae_):
        out.append("RMSE < MAE")
    if rmse_ < abs(me) - tol * max(1.0, abs(me)):
        out.append("RMSE < |ME|")
    if not -tol <= u1 <= 1.0 + tol:
        out.append("U1 outside [0, 1]")
    if smae_ < -tol:
        out.append("sMAE < 0")
    return out


@dataclass(frozen=True)
class ErrorTable:
    """ME, MAE, sMAE, RMSE and Theil U1 over ``n`` evaluated years.

    Construction checks ``|ME| <= MAE <= RMSE``, ``U1 in [0, 1]`` and
    ``sMAE >= 0``.  ``check`` selects what a violation does: ``"raise"``
    (computed tables), ``"flag"`` (published figures, recorded in ``flags``)
    or ``"off"`` (delta tables, where the bounds do not apply).
    """

    me: float
    mae: float
    smae: float
    rmse: float
    theil_u1: float
    n: int
    label: str = ""
    check: str = field(default="raise", compare=False)
    flags: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if self.check == "off":
            return
        bad = invariant_violations(self.me, self.mae, self.smae, self.rmse, self.theil_u1)
        if bad and self.check == "raise":
            raise InvariantViolation(f"{self.label or 'error table'}: {', '.join(bad)}")
        object.__setattr__(self, "flags", tuple(bad))

    @classmethod
    def published(cls, me, mae_, smae_, rmse_, u1, n, label=""):
        """A table transcribed from elsewhere; inconsistencies are flagged, not raised."""
        return cls(me, mae_, smae_, rmse_, u1, n, label, check="flag")

    def values(self) -> tuple:
        return tuple(getattr(self, m) for m in MEASURES)

    def to_dict(self) -> dict:
        out = {m: getattr(self, m) for m in MEASURES}
        out.update(n=self.n, label=self.label, flags=list(self.flags))
        return out


def evaluate(actual, forecast, label: str = "") -> ErrorTable:
    if isinstance(actual, AnnualSeries) and isinstance(forecast, AnnualSeries):
        if (actual.start_year, len(actual)) != (forecast.start_year, len(forecast)):
            raise SampleMismatch("actual and forecast cover different years")
    a, f = _pair(actual, forecast)
    return ErrorTable(
        me=mean_error(a, f),
        mae=mae(a, f),
        smae=smae(a, f),
        rmse=rmse(a, f),
        theil_u1=theil_u1(a, f),
        n=a.size,
        label=label,
    )


def accuracy_gain(baseline: ErrorTable, proposed: ErrorTable, label: str = "Accuracy gain") -> ErrorTable:
    """Elementwise ``baseline - proposed``; positive means the proposal is better."""
    if baseline.n != proposed.n:
        raise SampleMismatch(f"tables cover {baseline.n} and {proposed.n} years")
    delta = [b - p for b, p in zip(baseline.values(), proposed.values())]
    return ErrorTable(*delta, n=baseline.n, label=label, check="off")


def relative_efficiency_gain(baseline_u1: float, proposed_u1: float) -> float:
    """Percentage reduction of Theil's U1."""
    if baseline_u1 <= 0:
        raise ZeroBaseline("baseline U1 must be positive")
    return (baseline_u1 - proposed_u1) / baseline_u1 * 100.0


"""Stationarity-inducing transformations and their inverses."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solveh_banded

from . import arma
from .errors import InvalidArgument, InvalidSeries, MissingAnchor, NonConvergence, NonPositiveValue, TooShort
from .series import AnnualSeries

HP_LAMBDA_ANNUAL = 100.0
HP_LAMBDA_RAVN_UHLIG = 6.25
HP_PRESETS = {"annual": HP_LAMBDA_ANNUAL, "ravn-uhlig": HP_LAMBDA_RAVN_UHLIG}

IDENTITY_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Decomposition:
    """Trend plus cycle split of ``source``; ``trend + cycle == source``."""

    method: str
    trend: AnnualSeries
    cycle: AnnualSeries
    parameter: object
    source_name: str
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.method not in ("HP", "BN"):
            raise InvalidArgument(f"unknown decomposition method {self.method!r}")
        if (self.trend.start_year, len(self.trend)) != (self.cycle.start_year, len(self.cycle)):
            raise InvalidArgument("trend and cycle must share a year range")

    def check_identity(self, source: AnnualSeries, tol=IDENTITY_TOL) -> float:
        gap = float(np.max(np.abs(self.trend.values + self.cycle.values - source.values)))
        if gap > tol:
            raise InvalidSeries(f"decomposition identity broken by {gap:.3g}")
        return gap


def difference(series: AnnualSeries, d: int = 1) -> AnnualSeries:
    if d < 0:
        raise InvalidArgument("d must be non-negative")
    if d == 0:
        return series
    if len(series) <= d:
        raise TooShort(f"cannot difference {len(series)} values {d} times")
    return AnnualSeries(series.name, series.start_year + d, np.diff(series.values, n=d))


def undifference(diff_forecast: AnnualSeries, anchors) -> AnnualSeries:
    """Integrate ``diff_forecast`` back to levels.

    ``anchors`` are the last ``d`` observed levels, oldest first; ``d`` is
    taken from their count.
    """
    a = np.asarray(anchors.values if isinstance(anchors, AnnualSeries) else anchors, dtype=float).reshape(-1)
    d = a.size
    if d < 1:
        raise MissingAnchor("undifference needs at least one anchor level")
    # Last value of each order of difference of the anchors, k = 0..d-1.
    lasts = [np.diff(a, n=k)[-1] for k in range(d)]
    level = np.asarray(diff_forecast.values, dtype=float)
    for k in reversed(range(d)):
        level = lasts[k] + np.cumsum(level)
    return AnnualSeries(diff_forecast.name, diff_forecast.start_year, level)


def natural_log(series: AnnualSeries) -> AnnualSeries:
    bad = np.flatnonzero(series.values <= 0)
    if bad.size:
        raise NonPositiveValue(series.start_year + int(bad[0]))
    return series.replace(values=np.log(series.values))


def exp_inverse(series: AnnualSeries) -> AnnualSeries:
    return series.replace(values=np.exp(series.values))


def _hp_banded(n, lam):
    """Upper banded storage of ``I + lam * K'K`` for the second-difference K."""
    d0 = np.zeros(n)
    d1 = np.zeros(n - 1)
    d2 = np.zeros(n - 2)
    for r in range(n - 2):
        d0[r] += 1.0
        d0[r + 1] += 4.0
        d0[r + 2] += 1.0
        d1[r] -= 2.0
        d1[r + 1] -= 2.0
        d2[r] += 1.0
    ab = np.zeros((3, n))
    ab[2] = 1.0 + lam * d0
    ab[1, 1:] = lam * d1
    ab[0, 2:] = lam * d2
    return ab


def hp_trend(values, lam: float) -> np.ndarray:
    """HP trend of a raw array by banded Cholesky on the pentadiagonal system."""
    y = np.asarray(values, dtype=float)
    if y.size < 4:
        raise TooShort("the HP filter needs at least 4 observations")
    if not lam > 0:
        raise InvalidArgument("lambda must be positive")
    return solveh_banded(_hp_banded(y.size, float(lam)), y)


def hp_filter(series: AnnualSeries, lam: float = HP_LAMBDA_ANNUAL) -> Decomposition:
    """Hodrick-Prescott decomposition with penalised least squares.

    No end-point padding is applied.  ``diagnostics['endpoint_sensitivity']``
    reports how much the trend's penultimate value moves when the final year
    is dropped, a measure of end-of-sample instability.
    """
    lam = float(lam)
    tau = hp_trend(series.values, lam)
    cycle = series.values - tau
    diagnostics = {"lambda": lam}
    if len(series) >= 5:
        shorter = hp_trend(series.values[:-1], lam)
        diagnostics["endpoint_sensitivity"] = float(tau[-2] - shorter[-1])
    dec = Decomposition(
        method="HP",
        trend=series.replace(name=f"{series.name}_trend", values=tau),
        cycle=series.replace(name=f"{series.name}_cycle", values=cycle),
        parameter=lam,
        source_name=series.name,
        diagnostics=diagnostics,
    )
    dec.check_identity(series)
    return dec


def extend_trend(trend, horizon: int) -> np.ndarray:
    """Continue a trend linearly with its last increment for ``horizon`` steps."""
    t = np.asarray(trend.values if isinstance(trend, AnnualSeries) else trend, dtype=float)
    if t.size < 2:
        raise TooShort("trend extension needs two points")
    step = t[-1] - t[-2]
    return t[-1] + step * np.arange(1, horizon + 1)


def bn_decompose(series: AnnualSeries, p: int = 1, q: int = 1) -> Decomposition:
    """Beveridge-Nelson decomposition from an ARIMA(p, 1, q) CSS fit.

    The trend at year t is the level plus all expected future demeaned
    increments given information at t.  The first year has no increment and
    is assigned a zero cycle.  The cycle is not forced to mean zero; its mean
    is reported in ``diagnostics['cycle_mean']``.
    """
    if p < 0 or q < 0:
        raise InvalidArgument("orders must be non-negative")
    if len(series) < p + q + 5:
        raise TooShort(f"BN({p},{q}) needs at least {p + q + 5} observations")
    y = series.values
    dy = np.diff(y)
    drift = float(dy.mean())
    w = dy - drift
    fit = arma.fit_css(w, p, q)
    if not fit.converged:
        raise NonConvergence(f"ARMA({p},{q}) CSS fit did not converge")
    alpha = arma.state_vectors(w, fit.residuals, fit.phi, fit.theta)
    weights = arma.cumulative_forecast_weights(fit.phi, fit.theta)
    trend = y.copy()
    trend[1:] = y[1:] + alpha @ weights
    cycle = y - trend
    dec = Decomposition(
        method="BN",
        trend=series.replace(name=f"{series.name}_trend", values=trend),
        cycle=series.replace(name=f"{series.name}_cycle", values=cycle),
        parameter=(p, q),
        source_name=series.name,
        diagnostics={
            "drift": drift,
            "ar": fit.phi.tolist(),
            "ma": fit.theta.tolist(),
            "sigma2": fit.sigma2,
            "cycle_mean": float(cycle.mean()),
            "innovations": fit.residuals.tolist(),
        },
    )
    dec.check_identity(series)
    return dec


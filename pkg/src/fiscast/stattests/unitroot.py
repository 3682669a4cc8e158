"""ADF, Phillips-Perron, KPSS and DF-GLS tests."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidArgument, InvariantViolation, SingularRegression, TooShort
from ..estimation import information_criteria, ols_arrays
from ..series import AnnualSeries
from . import critical_values as cv

SPECS = ("constant", "trend", "none")
LOW_POWER_N = 25
LEFT_TAILED = {"ADF": True, "PP": True, "DFGLS": True, "KPSS": False}
NULLS = {"ADF": "unit root", "PP": "unit root", "DFGLS": "unit root", "KPSS": "stationarity"}


@dataclass(frozen=True)
class TestReport:
    test_name: str
    spec: str
    lags: int
    statistic: float
    critical_values: dict
    reject_at_5pct: bool
    null_hypothesis: str
    nobs: int
    series_name: str = ""
    low_power: bool = False
    notes: dict = field(default_factory=dict)

    __test__ = False  # keep pytest from collecting this class

    def __post_init__(self):
        crit = self.critical_values["5%"]
        expected = self.statistic < crit if LEFT_TAILED[self.test_name] else self.statistic > crit
        if bool(expected) != bool(self.reject_at_5pct):
            raise InvariantViolation(f"{self.test_name} verdict inconsistent with its 5% critical value")

    @property
    def suggests_stationary(self) -> bool:
        """True when the outcome points to a stationary series."""
        if self.test_name == "KPSS":
            return not self.reject_at_5pct
        return self.reject_at_5pct

    def to_dict(self) -> dict:
        return {
            "test": self.test_name,
            "spec": self.spec,
            "lags": self.lags,
            "statistic": self.statistic,
            "critical_values": dict(self.critical_values),
            "reject_at_5pct": self.reject_at_5pct,
            "null_hypothesis": self.null_hypothesis,
            "nobs": self.nobs,
            "series": self.series_name,
            "low_power_warning": self.low_power,
        }


def _deterministic(spec, n, start=1):
    if spec == "none":
        return np.empty((n, 0))
    if spec == "constant":
        return np.ones((n, 1))
    if spec == "trend":
        return np.column_stack([np.ones(n), np.arange(start, start + n, dtype=float)])
    raise InvalidArgument(f"unknown deterministic spec {spec!r}")


def _values(series):
    if isinstance(series, AnnualSeries):
        return series.values, series.name
    return np.asarray(series, dtype=float), ""


def _bandwidth(n):
    return int(math.floor(4.0 * (n / 100.0) ** (2.0 / 9.0)))


def newey_west(resid, bandwidth):
    """Bartlett-kernel long-run variance with 1/T autocovariances."""
    e = np.asarray(resid, dtype=float)
    T = e.size
    lrv = float(e @ e) / T
    for j in range(1, bandwidth + 1):
        lrv += 2.0 * (1.0 - j / (bandwidth + 1.0)) * float(e[j:] @ e[:-j]) / T
    return lrv


def default_max_lags(n):
    return max(0, min(int(4.0 * (n / 100.0) ** 0.25), n - 8))


def _df_design(y, lags, first, det):
    """Rows of the DF regression of dy_t on y_{t-1}, deterministics and lagged dy.

    ``first`` is the first usable index into ``dy`` (at least ``lags``).
    """
    dy = np.diff(y)
    rows = dy.size - first
    cols = [y[first : first + rows]]
    if det is not None:
        D = _deterministic(det, rows, start=first + 1)
        if D.shape[1]:
            cols.insert(0, D)
    for i in range(1, lags + 1):
        cols.append(dy[first - i : first - i + rows])
    X = np.column_stack(cols)
    return dy[first:], X


def _gamma_col(det):
    return {"none": 0, "constant": 1, "trend": 2}[det]


def _df_regression(y, lags, first, det):
    target, X = _df_design(y, lags, first, det)
    fit = ols_arrays(target, X, error=SingularRegression)
    j = _gamma_col(det)
    return fit, j


def _select_lag(y, max_lags, det):
    """Lag order in ``0..max_lags`` with minimal AICc on a common sample."""
    best, best_crit = 0, math.inf
    for k in range(max_lags + 1):
        fit, _ = _df_regression(y, k, max_lags, det)
        n, npar = fit.resid.size, fit.beta.size
        if n <= npar + 1:
            continue
        crit = information_criteria(fit.loglik, npar, n)["aicc"]
        if crit < best_crit - 1e-12:
            best, best_crit = k, crit
    return best


def _t_ratio(fit, j):
    se = fit.stderr[j]
    if not np.isfinite(se) or se <= 0:
        raise SingularRegression("zero residual variance in the test regression")
    return float(fit.beta[j] / se)


def _report(name, spec, lags, stat, crit, nobs, series_name, notes=None):
    reject = stat < crit["5%"] if LEFT_TAILED[name] else stat > crit["5%"]
    return TestReport(
        test_name=name,
        spec=spec,
        lags=int(lags),
        statistic=float(stat),
        critical_values=crit,
        reject_at_5pct=bool(reject),
        null_hypothesis=NULLS[name],
        nobs=int(nobs),
        series_name=series_name,
        low_power=nobs < LOW_POWER_N,
        notes=notes or {},
    )


def adf_test(series, max_lags: int | None = None, spec: str = "constant") -> TestReport:
    """Augmented Dickey-Fuller t-test with AICc lag selection.

    The lag order is chosen over ``0..max_lags`` on the common sample that
    drops ``max_lags`` initial differences, then the chosen regression is
    re-estimated on its own full sample.
    """
    y, name = _values(series)
    if spec not in SPECS:
        raise InvalidArgument(f"unknown deterministic spec {spec!r}")
    if max_lags is None:
        max_lags = default_max_lags(y.size)
    if max_lags < 0:
        raise InvalidArgument("max_lags must be non-negative")
    if y.size < max_lags + 8:
        raise TooShort(f"ADF with up to {max_lags} lags needs {max_lags + 8} observations")
    lag = _select_lag(y, max_lags, spec)
    fit, j = _df_regression(y, lag, lag, spec)
    stat = _t_ratio(fit, j)
    nobs = fit.resid.size
    return _report("ADF", spec, lag, stat, cv.dickey_fuller(spec, nobs), nobs, name)


def pp_test(series, spec: str = "constant") -> TestReport:
    """Phillips-Perron Z-tau: the DF(0) t-ratio with a Newey-West correction."""
    y, name = _values(series)
    if spec not in SPECS:
        raise InvalidArgument(f"unknown deterministic spec {spec!r}")
    if y.size < 10:
        raise TooShort("PP needs at least 10 observations")
    fit, j = _df_regression(y, 0, 0, spec)
    t_stat = _t_ratio(fit, j)
    T = fit.resid.size
    k = fit.beta.size
    c0 = float(fit.resid @ fit.resid) / T
    s = math.sqrt(float(fit.resid @ fit.resid) / (T - k))
    bw = _bandwidth(T)
    lam2 = newey_west(fit.resid, bw)
    if lam2 <= 0:
        raise SingularRegression("non-positive long-run variance")
    stat = math.sqrt(c0 / lam2) * t_stat - 0.5 * (lam2 - c0) / math.sqrt(lam2) * (T * fit.stderr[j] / s)
    return _report("PP", spec, bw, stat, cv.dickey_fuller(spec, T), T, name, {"adf0_statistic": t_stat})


def kpss_test(series, spec: str = "constant") -> TestReport:
    """KPSS stationarity test; rejection lies in the right tail."""
    y, name = _values(series)
    if spec not in ("constant", "trend"):
        raise InvalidArgument(f"KPSS supports 'constant' or 'trend', not {spec!r}")
    n = y.size
    if n < 10:
        raise TooShort("KPSS needs at least 10 observations")
    D = _deterministic(spec, n)
    resid = ols_arrays(y, D).resid
    bw = _bandwidth(n)
    lam2 = newey_west(resid, bw)
    if lam2 <= 0:
        raise SingularRegression("zero long-run variance (constant series?)")
    partial = np.cumsum(resid)
    stat = float(partial @ partial) / (n**2 * lam2)
    return _report("KPSS", spec, bw, stat, cv.kpss(spec), n, name)


DFGLS_CBAR = {"constant": -7.0, "trend": -13.5}


def gls_detrend(y, spec: str = "constant") -> np.ndarray:
    """Quasi-difference GLS detrending used by DF-GLS."""
    y = np.asarray(y, dtype=float)
    n = y.size
    a = 1.0 + DFGLS_CBAR[spec] / n
    Z = _deterministic(spec, n)
    yq = np.concatenate([[y[0]], y[1:] - a * y[:-1]])
    Zq = np.vstack([Z[:1], Z[1:] - a * Z[:-1]])
    beta = np.linalg.lstsq(Zq, yq, rcond=None)[0]
    return y - Z @ beta


def dfgls_test(series, max_lags: int | None = None, spec: str = "constant") -> TestReport:
    y, name = _values(series)
    if spec not in DFGLS_CBAR:
        raise InvalidArgument(f"DF-GLS supports 'constant' or 'trend', not {spec!r}")
    if max_lags is None:
        max_lags = max(0, min(default_max_lags(y.size), y.size - 10))
    if y.size < max_lags + 10:
        raise TooShort(f"DF-GLS with up to {max_lags} lags needs {max_lags + 10} observations")
    yd = gls_detrend(y, spec)
    lag = _select_lag(yd, max_lags, "none")
    fit, j = _df_regression(yd, lag, lag, "none")
    stat = _t_ratio(fit, j)
    nobs = fit.resid.size
    return _report("DFGLS", spec, lag, stat, cv.dfgls(spec, nobs), nobs, name)

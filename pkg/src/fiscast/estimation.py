"""OLS, regression with ARIMA errors, AR(1) submodels and information criteria."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from . import arma
from .errors import (
    AiccUndefined,
    InvalidArgument,
    MissingPredictorYears,
    NonConvergence,
    NonInvertible,
    RankDeficient,
    TooFewObservations,
    TooShort,
)
from .series import AnnualSeries, SeriesFrame
from .transforms import HP_LAMBDA_ANNUAL, extend_trend, hp_trend

TRANSFORM_TAGS = ("level", "diff1", "HP", "log")
ESTIMATION_METHOD = "iterated feasible GLS with CSS ARMA errors (Hannan-Rissanen start, Nelder-Mead)"
GLS_TOL = 1e-6
GLS_MAX_ITER = 50
GLS_ACCEPT_TOL = 1e-4
SELECTION_ROOT_LIMIT = 1.01


def information_criteria(loglik: float, k: int, n: int) -> dict:
    """AIC, small-sample corrected AIC and BIC."""
    if n <= k + 1:
        raise AiccUndefined(f"AICc needs n > k + 1 (n={n}, k={k})")
    aic = 2.0 * k - 2.0 * loglik
    return {
        "aic": aic,
        "aicc": aic + 2.0 * k * (k + 1) / (n - k - 1),
        "bic": k * math.log(n) - 2.0 * loglik,
    }


@dataclass(frozen=True)
class OlsArrays:
    beta: np.ndarray
    resid: np.ndarray
    stderr: np.ndarray
    ssr: float
    loglik: float


def gaussian_loglik(ssr, n):
    """Concentrated Gaussian log-likelihood at the ML variance ``ssr / n``."""
    if ssr <= 0:
        return math.inf
    return -0.5 * n * (math.log(2.0 * math.pi * ssr / n) + 1.0)


def ols_arrays(y, X, error=RankDeficient) -> OlsArrays:
    """Least squares by QR with an explicit rank check."""
    y = np.asarray(y, dtype=float)
    X = np.asarray(X, dtype=float)
    n, k = X.shape
    if k == 0:
        ssr = float(y @ y)
        return OlsArrays(np.zeros(0), y.copy(), np.zeros(0), ssr, gaussian_loglik(ssr, n))
    if n < k or np.linalg.matrix_rank(X) < k:
        raise error(f"design matrix of shape {X.shape} is rank deficient")
    Q, R = np.linalg.qr(X)
    beta = linalg.solve_triangular(R, Q.T @ y)
    resid = y - X @ beta
    ssr = float(resid @ resid)
    if n > k:
        Rinv = linalg.solve_triangular(R, np.eye(k))
        stderr = np.sqrt(ssr / (n - k) * np.sum(Rinv**2, axis=1))
    else:
        stderr = np.full(k, np.nan)
    return OlsArrays(beta, resid, stderr, ssr, gaussian_loglik(ssr, n))


def _r2(y, resid, centered):
    sst = float(np.sum((y - y.mean()) ** 2)) if centered else float(y @ y)
    if sst == 0:
        return float("nan")
    return 1.0 - float(resid @ resid) / sst


@dataclass(frozen=True, eq=False)
class LinearModel:
    target: str
    coefficients: dict
    intercept_included: bool
    residuals: AnnualSeries
    sigma2: float
    loglik: float
    r2: float
    n_params: int
    stderr: dict = field(default_factory=dict)

    @property
    def nobs(self) -> int:
        return len(self.residuals)

    @property
    def criteria(self) -> dict:
        return information_criteria(self.loglik, self.n_params + 1, self.nobs)

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "coefficients": dict(self.coefficients),
            "stderr": dict(self.stderr),
            "intercept": self.intercept_included,
            "sigma2": self.sigma2,
            "loglik": self.loglik,
            "r2": self.r2,
            "n_params": self.n_params,
            "nobs": self.nobs,
            **self.criteria,
        }


def _design(frame, predictors, intercept):
    X = frame.matrix(predictors)
    names = list(predictors)
    if intercept:
        X = np.column_stack([np.ones(len(frame)), X])
        names = ["const"] + names
    return X, names


def ols_fit(frame: SeriesFrame, target: str, predictors, intercept: bool = False) -> LinearModel:
    """Ordinary least squares of ``target`` on ``predictors``.

    R^2 is centred when an intercept is present and uncentred otherwise.
    """
    predictors = list(predictors)
    X, names = _design(frame, predictors, intercept)
    y = frame[target].values
    if len(y) <= X.shape[1]:
        raise TooFewObservations(f"{len(y)} observations for {X.shape[1]} coefficients")
    fit = ols_arrays(y, X)
    return LinearModel(
        target=target,
        coefficients=dict(zip(names, fit.beta.tolist())),
        intercept_included=intercept,
        residuals=AnnualSeries(f"{target}_resid", frame.year_range[0], fit.resid),
        sigma2=fit.ssr / len(y),
        loglik=fit.loglik,
        r2=_r2(y, fit.resid, intercept),
        n_params=X.shape[1],
        stderr=dict(zip(names, fit.stderr.tolist())),
    )


def simple_regression(frame: SeriesFrame, target: str, predictor: str, intercept: bool = False) -> LinearModel:
    return ols_fit(frame, target, [predictor], intercept=intercept)


@dataclass(frozen=True)
class ArimaOrder:
    p: int = 0
    d: int = 0
    q: int = 0

    def __post_init__(self):
        if min(self.p, self.d, self.q) < 0:
            raise InvalidArgument("ARIMA orders must be non-negative")
        if self.d not in (0, 1, 2):
            raise InvalidArgument("d must be 0, 1 or 2")

    def __str__(self):
        return f"({self.p},{self.d},{self.q})"

    def as_tuple(self):
        return (self.p, self.d, self.q)


# -- transform tags ---------------------------------------------------------


def _tag_forward(tag, values, hp_lambda):
    """Transformed training array plus the state needed to invert it."""
    v = np.asarray(values, dtype=float)
    if tag == "level":
        return v, {}
    if tag == "log":
        if np.any(v <= 0):
            raise InvalidArgument("log transform needs strictly positive data")
        return np.log(v), {}
    if tag == "diff1":
        if v.size < 2:
            raise TooShort("diff1 needs two observations")
        return np.diff(v), {"last_level": float(v[-1])}
    if tag == "HP":
        trend = hp_trend(v, hp_lambda)
        return v - trend, {"trend_tail": trend[-2:].tolist()}
    raise InvalidArgument(f"unknown transform tag {tag!r}")


def _tag_future(tag, history, future, hp_lambda):
    """Transform future predictor values consistently with the training data."""
    h = np.asarray(history, dtype=float)
    f = np.asarray(future, dtype=float)
    if tag == "level":
        return f
    if tag == "log":
        if np.any(f <= 0):
            raise InvalidArgument("log transform needs strictly positive data")
        return np.log(f)
    if tag == "diff1":
        return np.diff(np.concatenate([h[-1:], f]))
    if tag == "HP":
        full = np.concatenate([h, f])
        return (full - hp_trend(full, hp_lambda))[h.size :]
    raise InvalidArgument(f"unknown transform tag {tag!r}")


def _tag_inverse(tag, state, forecast):
    if tag == "level":
        return forecast
    if tag == "log":
        return np.exp(forecast)
    if tag == "diff1":
        return state["last_level"] + np.cumsum(forecast)
    if tag == "HP":
        return forecast + extend_trend(state["trend_tail"], forecast.size)
    raise InvalidArgument(f"unknown transform tag {tag!r}")


def _tag_reapply(tag, state, level):
    """Map an at-level forecast back to the transformed scale."""
    level = np.asarray(level, dtype=float)
    if tag == "level":
        return level
    if tag == "log":
        return np.log(level)
    if tag == "diff1":
        return np.diff(np.concatenate([[state["last_level"]], level]))
    if tag == "HP":
        return level - extend_trend(state["trend_tail"], level.size)
    raise InvalidArgument(f"unknown transform tag {tag!r}")


def _undiff(values, anchors):
    """Integrate ``values`` given the last ``d`` levels (oldest first)."""
    a = np.asarray(anchors, dtype=float)
    out = np.asarray(values, dtype=float)
    for k in reversed(range(a.size)):
        out = np.diff(a, n=k)[-1] + np.cumsum(out)
    return out


@dataclass(frozen=True, eq=False)
class RegArimaModel:
    target: str
    predictors: list
    regression: LinearModel
    error_order: ArimaOrder
    ar_coeffs: np.ndarray
    ma_coeffs: np.ndarray
    innovation_variance: float
    loglik: float
    aic: float
    aicc: float
    bic: float
    r2: float
    transform_tag: str
    n_params: int
    nobs: int
    iterations: int
    final_change: float
    hp_lambda: float
    end_year: int
    # training data needed for forecasting
    train_predictors: dict = field(repr=False, default_factory=dict)
    tag_state: dict = field(repr=False, default_factory=dict)
    transformed_target: np.ndarray = field(repr=False, default=None)
    error_residuals: np.ndarray = field(repr=False, default=None)
    innovations: np.ndarray = field(repr=False, default=None)
    method: str = ESTIMATION_METHOD

    @property
    def beta(self) -> dict:
        return dict(self.regression.coefficients)

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "predictors": list(self.predictors),
            "transform": self.transform_tag,
            "order": list(self.error_order.as_tuple()),
            "coefficients": self.beta,
            "intercept": self.regression.intercept_included,
            "ar": self.ar_coeffs.tolist(),
            "ma": self.ma_coeffs.tolist(),
            "innovation_variance": self.innovation_variance,
            "loglik": self.loglik,
            "aic": self.aic,
            "aicc": self.aicc,
            "bic": self.bic,
            "r2": self.r2,
            "k": self.n_params,
            "nobs": self.nobs,
            "iterations": self.iterations,
            "hp_lambda": self.hp_lambda if self.transform_tag == "HP" else None,
            "method": self.method,
        }


def _gls(y, X, phi, theta) -> OlsArrays:
    """OLS on data whitened by the Cholesky factor of the ARMA covariance."""
    n = y.size
    gamma = arma.autocovariances(phi, theta, 1.0, n - 1)
    L = linalg.cholesky(linalg.toeplitz(gamma), lower=True)
    ys = linalg.solve_triangular(L, y, lower=True)
    Xs = linalg.solve_triangular(L, X, lower=True)
    return ols_arrays(ys, Xs)


def fit_regarima(
    frame: SeriesFrame,
    target: str,
    predictors,
    order: ArimaOrder = ArimaOrder(),
    transform_tag: str = "level",
    intercept: bool = False,
    hp_lambda: float = HP_LAMBDA_ANNUAL,
) -> RegArimaModel:
    """Regression of ``target`` on ``predictors`` with ARIMA(p, d, q) errors.

    The frame holds at-level data.  ``transform_tag`` is applied to the target
    and every predictor first, then both sides are differenced ``order.d``
    times.  Estimation alternates a CSS fit of the ARMA(p, q) error process
    on the regression residuals with a GLS update of the coefficients under
    that process's exact covariance, until the largest change in any
    parameter is below ``GLS_TOL`` or ``GLS_MAX_ITER`` rounds have run.
    """
    predictors = list(predictors)
    if transform_tag not in TRANSFORM_TAGS:
        raise InvalidArgument(f"unknown transform tag {transform_tag!r}")
    p, d, q = order.as_tuple()
    y_tag, state = _tag_forward(transform_tag, frame[target].values, hp_lambda)
    X_tag = np.column_stack(
        [_tag_forward(transform_tag, frame[c].values, hp_lambda)[0] for c in predictors]
    ) if predictors else np.empty((y_tag.size, 0))
    y = np.diff(y_tag, n=d) if d else y_tag
    X = np.diff(X_tag, n=d, axis=0) if d else X_tag
    if intercept:
        X = np.column_stack([np.ones(y.size), X])
    names = (["const"] if intercept else []) + predictors
    n_beta = X.shape[1]
    k = n_beta + p + q + 1
    if y.size <= k + 2:
        raise TooFewObservations(f"{y.size} usable observations for {k} parameters")

    fit = ols_arrays(y, X)
    beta = fit.beta
    phi, theta = np.zeros(p), np.zeros(q)
    iterations, change = 0, 0.0
    if p + q:
        prev = None
        for iterations in range(1, GLS_MAX_ITER + 1):
            u = y - X @ beta
            af = arma.fit_css(u, p, q, start=prev)
            beta_new = _gls(y, X, af.phi, af.theta).beta
            dpar = np.concatenate([beta_new - beta, af.phi - phi, af.theta - theta])
            scale = max(1.0, float(np.max(np.abs(beta_new))) if beta_new.size else 1.0)
            change = float(np.max(np.abs(dpar[:n_beta]))) / scale if n_beta else 0.0
            change = max(change, float(np.max(np.abs(dpar[n_beta:]))))
            beta, phi, theta = beta_new, af.phi, af.theta
            prev = (phi, theta)
            if change < GLS_TOL:
                break
        else:
            if change > GLS_ACCEPT_TOL:
                raise NonConvergence(f"FGLS stopped after {GLS_MAX_ITER} rounds with change {change:.2e}")
        if not (arma.is_stationary(phi) and arma.is_invertible(theta)):
            raise NonInvertible("error process left the stationary/invertible region")

    stderr = _gls(y, X, phi, theta).stderr if p + q else fit.stderr
    u = y - X @ beta
    e = arma.css_residuals(u, phi, theta, p)
    n_eff = y.size - p
    css = float(e[p:] @ e[p:])
    loglik = arma.css_loglik(css, n_eff) if css > 0 else math.inf
    crit = information_criteria(loglik, k, n_eff)
    y_eff = y[p:]
    r2 = _r2(y_eff, e[p:], intercept)
    first_year = frame.year_range[0] + (1 if transform_tag == "diff1" else 0) + d
    reg = LinearModel(
        target=target,
        coefficients=dict(zip(names, beta.tolist())),
        intercept_included=intercept,
        residuals=AnnualSeries(f"{target}_resid", first_year, u),
        sigma2=float(u @ u) / u.size,
        loglik=loglik,
        r2=r2,
        n_params=n_beta,
        stderr=dict(zip(names, stderr.tolist())),
    )
    return RegArimaModel(
        target=target,
        predictors=predictors,
        regression=reg,
        error_order=order,
        ar_coeffs=phi,
        ma_coeffs=theta,
        innovation_variance=css / n_eff,
        loglik=loglik,
        aic=crit["aic"],
        aicc=crit["aicc"],
        bic=crit["bic"],
        r2=r2,
        transform_tag=transform_tag,
        n_params=k,
        nobs=n_eff,
        iterations=iterations,
        final_change=change,
        hp_lambda=float(hp_lambda),
        end_year=frame.year_range[1],
        train_predictors={c: frame[c].values.copy() for c in predictors},
        tag_state=state,
        transformed_target=y_tag,
        error_residuals=u,
        innovations=e,
    )


def auto_order(residuals, grid_max_p: int = 2, grid_max_q: int = 2, d: int = 0) -> ArimaOrder:
    """Pick (p, q) on a full grid by minimal AICc.

    Every candidate conditions on the first ``grid_max_p`` observations so
    all criteria share one sample.  Candidates whose AR or MA roots end up
    within ``SELECTION_ROOT_LIMIT`` of the unit circle are skipped: in short
    samples CSS often parks an MA root on the boundary and buys a spurious
    likelihood gain there.  Ties go to the smaller ``p + q``, then the
    smaller ``q``.
    """
    w = residuals.values if isinstance(residuals, AnnualSeries) else np.asarray(residuals, dtype=float)
    if w.size < 10:
        raise TooShort("order selection needs at least 10 observations")
    best, best_key = (0, 0), None
    for p in range(grid_max_p + 1):
        for q in range(grid_max_q + 1):
            try:
                fit = arma.fit_css(w, p, q, n_cond=grid_max_p)
                crit = information_criteria(fit.loglik, p + q + 1, fit.n_eff)["aicc"]
            except (AiccUndefined, TooShort):
                continue
            if arma.min_root_modulus(fit.phi, fit.theta) < SELECTION_ROOT_LIMIT:
                continue
            key = (round(crit, 10), p + q, q)
            if best_key is None or key < best_key:
                best, best_key = (p, q), key
    return ArimaOrder(best[0], d, best[1])


def _future_matrix(model, future_predictors, horizon):
    first, last = model.end_year + 1, model.end_year + horizon
    cols = []
    for c in model.predictors:
        if c not in future_predictors:
            raise MissingPredictorYears(f"future values for {c!r} are missing")
        s = future_predictors[c]
        if s.start_year > first or s.end_year < last:
            raise MissingPredictorYears(f"{c!r} does not cover {first}-{last}")
        cols.append(s.window(first, last).values)
    return cols


def forecast_regarima(model: RegArimaModel, future_predictors: SeriesFrame, horizon: int, at_level: bool = True):
    """``horizon``-step forecasts after the training sample.

    The regression part uses the future predictors transformed like the
    training data; the error part is the recursive ARMA forecast from the
    last residuals.  Differencing of order d and the transform tag are then
    inverted so the result is at level unless ``at_level`` is False.
    """
    if horizon < 1:
        raise InvalidArgument("horizon must be positive")
    p, d, q = model.error_order.as_tuple()
    tag = model.transform_tag
    fut = _future_matrix(model, future_predictors, horizon)
    Xf_tag = []
    for c, f in zip(model.predictors, fut):
        hist = model.train_predictors[c]
        hist_tag = _tag_forward(tag, hist, model.hp_lambda)[0]
        f_tag = _tag_future(tag, hist, f, model.hp_lambda)
        Xf_tag.append(np.diff(np.concatenate([hist_tag, f_tag]), n=d)[-horizon:] if d else f_tag)
    Xf = np.column_stack(Xf_tag) if Xf_tag else np.empty((horizon, 0))
    if model.regression.intercept_included:
        Xf = np.column_stack([np.ones(horizon), Xf])
    beta = np.array(list(model.regression.coefficients.values()))
    reg = Xf @ beta
    err = arma.forecast(model.error_residuals, model.innovations, model.ar_coeffs, model.ma_coeffs, horizon)
    fc = reg + err
    if d:
        fc = _undiff(fc, model.transformed_target[-d:])
    if at_level:
        fc = _tag_inverse(tag, model.tag_state, fc)
    return AnnualSeries(model.target, model.end_year + 1, fc)


def to_transformed_scale(model: RegArimaModel, level_forecast: AnnualSeries) -> AnnualSeries:
    """Apply the model's transform tag to an at-level forecast."""
    return level_forecast.replace(values=_tag_reapply(model.transform_tag, model.tag_state, level_forecast.values))


@dataclass(frozen=True)
class AR1Model:
    phi0: float
    innovation_variance: float
    name: str = ""
    last_year: int = 0

    @property
    def nonstationary(self) -> bool:
        return abs(self.phi0) >= 1.0


def ar1_fit(series: AnnualSeries) -> AR1Model:
    """No-intercept AR(1) by least squares of v_t on v_{t-1}."""
    v = series.values
    if v.size < 4:
        raise TooShort("AR(1) needs at least 4 observations")
    lag, cur = v[:-1], v[1:]
    denom = float(lag @ lag)
    if denom == 0:
        raise InvalidArgument("AR(1) is undefined for an all-zero series")
    phi0 = float(lag @ cur) / denom
    resid = cur - phi0 * lag
    model = AR1Model(phi0, float(resid @ resid) / resid.size, series.name, series.end_year)
    if model.nonstationary:
        warnings.warn(f"AR(1) coefficient {phi0:.4f} for {series.name!r} is non-stationary", stacklevel=2)
    return model


def ar1_forecast(model: AR1Model, last_value: float, horizon: int) -> AnnualSeries:
    h = np.arange(1, horizon + 1)
    return AnnualSeries(model.name, model.last_year + 1, model.phi0**h * last_value)

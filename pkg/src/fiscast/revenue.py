"""Tax-specific pipelines: profit identities, proposed models, elasticity baseline."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    FiscastError,
    InvalidArgument,
    LengthMismatch,
    MissingElasticity,
    MissingPredictorYears,
    NoViableVariant,
    SpecError,
    TooShort,
    YearMismatch,
)
from .estimation import (
    ESTIMATION_METHOD,
    ArimaOrder,
    RegArimaModel,
    ar1_fit,
    ar1_forecast,
    auto_order,
    fit_regarima,
    forecast_regarima,
    to_transformed_scale,
)
from .evaluation import SIGN_CONVENTION, ErrorTable, accuracy_gain, evaluate, mean_error, relative_efficiency_gain
from .series import AnnualSeries, SeriesFrame, growth_rates, slice_train_test
from .stattests import adf_test, dfgls_test, johansen_max_eigen, kpss_test, pp_test, stationarity_verdict
from .transforms import HP_LAMBDA_ANNUAL

log = logging.getLogger(__name__)

TAX_EQUATIONS = {
    "PIT": ("WAGE", "SOC"),
    "KD_DDD": ("PI_NF", "PI_F"),
    "DZP": ("PRM",),
}
DEFAULT_TARGETS = {"PIT": "PIT", "KD_DDD": "KD_DDD", "DZP": "DZP"}
PIT_BASELINE_PREDICTORS = ("EMP", "U", "AWG", "CE", "BVP")
CIT_BASELINE_PREDICTORS = ("PI", "ADV", "EQC", "REF", "TLS")
TREND_RULE = "HP trend extended linearly with its last in-sample increment"
SELECTION_RULES = ("holdout_rmse", "aicc")
MIN_TRAIN_EXTRA = 8


# -- profit construction -----------------------------------------------------


def _check_aligned(*series):
    first = series[0]
    for s in series[1:]:
        if (s.start_year, len(s)) != (first.start_year, len(first)):
            raise LengthMismatch(f"{s.name!r} and {first.name!r} cover different years")


def insurer_profit(turnover: AnnualSeries, claims: AnnualSeries, purchases: AnnualSeries) -> AnnualSeries:
    """Turnover less gross claims incurred and purchases."""
    _check_aligned(turnover, claims, purchases)
    return AnnualSeries(
        "PI_INSURANCE", turnover.start_year, turnover.values - (claims.values + purchases.values)
    )


def financial_profit(insurance: AnnualSeries, investment: AnnualSeries, pension: AnnualSeries) -> AnnualSeries:
    _check_aligned(insurance, investment, pension)
    return AnnualSeries("PI_F", insurance.start_year, insurance.values + investment.values + pension.values)


def nonfinancial_profit(
    turnover: AnnualSeries, expenses: AnnualSeries, purchases: AnnualSeries, variant: str = "RXP"
) -> AnnualSeries:
    """Turnover less staff-type expenses and purchases.

    ``variant`` names the expense concept (``RXP`` remuneration or ``SXP``
    staff expenses) and is carried into the series name.
    """
    if variant not in ("RXP", "SXP"):
        raise InvalidArgument("variant must be 'RXP' or 'SXP'")
    _check_aligned(turnover, expenses, purchases)
    return AnnualSeries(
        f"PI_NF_{variant}", turnover.start_year, turnover.values - (expenses.values + purchases.values)
    )


# -- proposed models ---------------------------------------------------------


@dataclass(frozen=True)
class TaxModelSpec:
    tax: str
    target_column: str = ""
    predictor_columns: tuple = ()
    transform: str = "auto"
    arima_order: object = "auto"
    holdout_years: int = 3
    hp_lambda: float = HP_LAMBDA_ANNUAL
    intercept: bool = False
    selection: str = "holdout_rmse"
    johansen_lag: int = 1

    def __post_init__(self):
        if self.tax not in TAX_EQUATIONS:
            raise SpecError(f"unknown tax {self.tax!r}")
        if not self.target_column:
            object.__setattr__(self, "target_column", DEFAULT_TARGETS[self.tax])
        cols = tuple(self.predictor_columns) or TAX_EQUATIONS[self.tax]
        if set(cols) != set(TAX_EQUATIONS[self.tax]):
            raise SpecError(f"{self.tax} predictors must be {TAX_EQUATIONS[self.tax]}, got {cols}")
        object.__setattr__(self, "predictor_columns", cols)
        if self.transform not in ("auto", "level", "diff1", "HP", "log"):
            raise SpecError(f"unknown transform {self.transform!r}")
        if self.arima_order != "auto" and not isinstance(self.arima_order, ArimaOrder):
            object.__setattr__(self, "arima_order", ArimaOrder(*self.arima_order))
        if self.selection not in SELECTION_RULES:
            raise SpecError(f"selection must be one of {SELECTION_RULES}")
        if self.holdout_years < 1:
            raise SpecError("holdout_years must be positive")


@dataclass
class VariantResult:
    transform: str
    model: RegArimaModel | None = None
    forecast: AnnualSeries | None = None
    errors: ErrorTable | None = None
    failure: str | None = None
    transformed_forecast: AnnualSeries | None = None

    def row(self) -> dict:
        if self.model is None:
            return {"transform": self.transform, "failure": self.failure}
        m = self.model
        return {
            "transform": self.transform,
            "order": list(m.error_order.as_tuple()),
            "loglik": m.loglik,
            "aic": m.aic,
            "aicc": m.aicc,
            "bic": m.bic,
            "r2": m.r2,
            "k": m.n_params,
            "nobs": m.nobs,
            "holdout_rmse": None if self.errors is None else self.errors.rmse,
        }


@dataclass
class PipelineResult:
    tax: str
    target: str
    selected: VariantResult
    variants: list
    actual: AnnualSeries
    verdict: object = None
    johansen: object = None
    notes: dict = field(default_factory=dict)

    @property
    def model(self) -> RegArimaModel:
        return self.selected.model

    @property
    def errors(self) -> ErrorTable:
        return self.selected.errors

    @property
    def forecast(self) -> AnnualSeries:
        return self.selected.forecast


def _diagnose_target(series: AnnualSeries):
    reports, notes = [], {}
    for name, fn in (("ADF", adf_test), ("PP", pp_test), ("KPSS", kpss_test), ("DFGLS", dfgls_test)):
        try:
            reports.append(fn(series))
        except FiscastError as exc:
            notes[name] = f"{type(exc).__name__}: {exc}"
    verdict = stationarity_verdict(reports, series) if len(reports) >= 2 else None
    return verdict, notes


def _choose_order(spec, train, target, predictors, tag):
    if spec.arima_order != "auto":
        return spec.arima_order, None
    sub = fit_regarima(train, target, predictors, ArimaOrder(), tag, spec.intercept, spec.hp_lambda)
    resid = sub.error_residuals
    try:
        return auto_order(resid), None
    except TooShort as exc:
        return ArimaOrder(), f"order search skipped ({exc}); using (0,0,0)"


def _fit_variant(spec, train, test, tag) -> VariantResult:
    target, predictors = spec.target_column, list(spec.predictor_columns)
    try:
        order, note = _choose_order(spec, train, target, predictors, tag)
        try:
            model = fit_regarima(train, target, predictors, order, tag, spec.intercept, spec.hp_lambda)
        except FiscastError as exc:
            if order == ArimaOrder(0, order.d, 0):
                raise
            note = f"ARIMA{order} failed ({type(exc).__name__}); fell back to (0,{order.d},0)"
            model = fit_regarima(
                train, target, predictors, ArimaOrder(0, order.d, 0), tag, spec.intercept, spec.hp_lambda
            )
        fc = forecast_regarima(model, test, len(test))
        internal = forecast_regarima(model, test, len(test), at_level=False)
        errors = evaluate(test[target], fc, label=f"{spec.tax} {tag}")
        if note:
            log.info("%s %s: %s", spec.tax, tag, note)
        return VariantResult(tag, model, fc, errors, transformed_forecast=internal)
    except FiscastError as exc:
        return VariantResult(tag, failure=f"{type(exc).__name__}: {exc}")


def _select(variants, rule):
    ok = [v for v in variants if v.model is not None]
    if not ok:
        raise NoViableVariant("every candidate transform failed: " + "; ".join(str(v.failure) for v in variants))
    if rule == "aicc":
        return min(ok, key=lambda v: (v.model.aicc, v.transform))
    return min(ok, key=lambda v: (v.errors.rmse, v.model.aicc, v.transform))


def candidate_transforms(spec: TaxModelSpec, johansen_rank, verdict) -> list:
    if spec.transform != "auto":
        return [spec.transform]
    out = []
    level_ok = (johansen_rank or 0) >= 1 or (verdict is not None and "level" in verdict.recommended_transforms)
    if level_ok:
        out.append("level")
    out += ["diff1", "HP"]
    if spec.tax == "DZP":
        out.append("log")
    return out


def run_proposed_pipeline(spec: TaxModelSpec, frame: SeriesFrame) -> PipelineResult:
    """Split, diagnose, fit every candidate transform, select, and evaluate.

    Candidates are the level (only when Johansen's test finds cointegration
    among target and predictors, or all unit-root tests agree on
    stationarity), first differences, HP cycles, and logs for DZP.  With
    ``selection='holdout_rmse'`` the variant with the smallest at-level
    holdout RMSE wins; ``'aicc'`` picks the smallest AICc across variants.
    """
    cols = [spec.target_column, *spec.predictor_columns]
    for c in cols:
        if c not in frame:
            raise SpecError(f"column {c!r} is missing from the data")
    frame = frame.select(cols)
    if len(frame) < spec.holdout_years + MIN_TRAIN_EXTRA:
        raise TooShort(f"{spec.tax} needs at least {spec.holdout_years + MIN_TRAIN_EXTRA} years")
    train, test = slice_train_test(frame, spec.holdout_years)
    verdict, notes = _diagnose_target(train[spec.target_column])
    try:
        johansen = johansen_max_eigen(train, spec.johansen_lag, cols)
    except FiscastError as exc:
        johansen = None
        notes["johansen"] = f"{type(exc).__name__}: {exc}"
    rank = None if johansen is None else johansen.cointegration_rank
    variants = [_fit_variant(spec, train, test, tag) for tag in candidate_transforms(spec, rank, verdict)]
    selected = _select(variants, spec.selection)
    notes.update(
        selection=spec.selection,
        hp_lambda=spec.hp_lambda,
        trend_rule=TREND_RULE,
        estimation=ESTIMATION_METHOD,
        parameter_count="k = regression coefficients + p + q + 1",
        johansen_case="unrestricted constant",
        train_years=list(train.year_range),
        test_years=list(test.year_range),
    )
    return PipelineResult(
        tax=spec.tax,
        target=spec.target_column,
        selected=selected,
        variants=variants,
        actual=test[spec.target_column],
        verdict=verdict,
        johansen=johansen,
        notes=notes,
    )


def run_dzp_pipeline(
    frame: SeriesFrame,
    holdout_years: int = 3,
    target: str = "DZP",
    predictor: str = "PRM",
    selection: str = "aicc",
) -> PipelineResult:
    """Simple regression of DZP on PRM under log and first-difference variants.

    Selection is by AICc unless ``selection='holdout_rmse'``; evaluation is
    at level after inverting the transform.
    """
    frame = frame.select([target, predictor])
    train, test = slice_train_test(frame, holdout_years)
    spec = TaxModelSpec(
        "DZP", target, (predictor,), arima_order=ArimaOrder(), holdout_years=holdout_years, selection=selection
    )
    variants = [_fit_variant(spec, train, test, tag) for tag in ("log", "diff1")]
    selected = _select(variants, selection)
    return PipelineResult(
        tax="DZP",
        target=target,
        selected=selected,
        variants=variants,
        actual=test[target],
        notes={"selection": selection, "model": "simple linear regression, no intercept"},
    )


# -- elasticity baseline ------------------------------------------------------


@dataclass(frozen=True)
class ElasticityBaselineSpec:
    """Inputs of the elasticity emulator.

    ``base_revenue`` is the last observed revenue, in year ``base_year``.
    """

    elasticities: dict
    predictor_columns: tuple
    base_revenue: float
    base_year: int
    name: str = "baseline"

    def __post_init__(self):
        missing = [c for c in self.predictor_columns if c not in self.elasticities]
        if missing:
            raise MissingElasticity(f"no elasticity for {missing}")


def run_baseline_elasticity(spec: ElasticityBaselineSpec, frame: SeriesFrame, horizon: int) -> AnnualSeries:
    """Recursive revenue path ``R_{t+1} = R_t (1 + sum_X eta_X g_{X,t+1})``.

    ``g`` is the year-on-year growth rate of each predictor, read from
    ``frame`` over ``base_year .. base_year + horizon``.
    """
    if horizon < 1:
        raise InvalidArgument("horizon must be positive")
    first, last = spec.base_year, spec.base_year + horizon
    combined = np.zeros(horizon)
    for c in spec.predictor_columns:
        if c not in frame:
            raise MissingPredictorYears(f"predictor {c!r} not supplied")
        s = frame[c]
        if s.start_year > first or s.end_year < last:
            raise MissingPredictorYears(f"{c!r} must cover {first}-{last}")
        combined += spec.elasticities[c] * growth_rates(s.window(first, last)).values
    path = spec.base_revenue * np.cumprod(1.0 + combined)
    return AnnualSeries(spec.name, first + 1, path)


def run_cit_baseline(
    kd_spec: ElasticityBaselineSpec,
    frame: SeriesFrame,
    horizon: int,
    ddd_history: AnnualSeries,
    dzp_forecast: AnnualSeries | None = None,
    residual: AnnualSeries | None = None,
) -> dict:
    """KD by elasticities, DDD by a no-intercept AR(1), plus optional DZP and residual.

    Returns the components and their ``total`` keyed by name.
    """
    kd = run_baseline_elasticity(kd_spec, frame, horizon).replace(name="KD")
    if ddd_history.end_year != kd_spec.base_year:
        raise YearMismatch("DDD history must end in the base year")
    ddd_model = ar1_fit(ddd_history)
    ddd = ar1_forecast(ddd_model, ddd_history.values[-1], horizon).replace(name="DDD")
    parts = {"KD": kd, "DDD": ddd}
    for name, extra in (("DZP", dzp_forecast), ("residual", residual)):
        if extra is None:
            continue
        if extra.start_year > kd.start_year or extra.end_year < kd.end_year:
            raise YearMismatch(f"{name} does not cover {kd.start_year}-{kd.end_year}")
        parts[name] = extra.window(kd.start_year, kd.end_year).replace(name=name)
    total = sum(p.values for p in parts.values())
    parts["total"] = AnnualSeries("CIT", kd.start_year, total)
    parts["ddd_phi0"] = ddd_model.phi0
    return parts


# -- comparison --------------------------------------------------------------


@dataclass
class ReproductionReport:
    tax: str
    variant_table: list
    error_tables: dict
    accuracy_gain: ErrorTable | None
    relative_efficiency_pct: float | None
    provenance: dict
    plot_rows: list
    selected_transform: str | None = None
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "tax": self.tax,
            "selected_transform": self.selected_transform,
            "variants": self.variant_table,
            "error_tables": {k: v.to_dict() for k, v in self.error_tables.items()},
            "accuracy_gain": None if self.accuracy_gain is None else self.accuracy_gain.to_dict(),
            "relative_efficiency_pct": self.relative_efficiency_pct,
            "provenance": self.provenance,
            "diagnostics": self.diagnostics,
            "plot_rows": self.plot_rows,
        }


def _same_years(a: AnnualSeries, b: AnnualSeries, what):
    if (a.start_year, len(a)) != (b.start_year, len(b)):
        raise YearMismatch(f"{what}: {a.start_year}-{a.end_year} vs {b.start_year}-{b.end_year}")


def compare_models(
    actual: AnnualSeries,
    baseline: AnnualSeries | None,
    proposed,
    tax: str = "",
    provenance: dict | None = None,
) -> ReproductionReport:
    """Score baseline and proposed forecasts on the common holdout.

    ``proposed`` is either a :class:`PipelineResult` or a forecast series.
    """
    result = proposed if isinstance(proposed, PipelineResult) else None
    fc = result.forecast if result else proposed
    _same_years(actual, fc, "proposed forecast")
    tables = {"proposed": evaluate(actual, fc, "Proposed model")}
    gain = eff = None
    if baseline is not None:
        _same_years(actual, baseline, "baseline forecast")
        tables = {"baseline": evaluate(actual, baseline, "Baseline"), **tables}
        gain = accuracy_gain(tables["baseline"], tables["proposed"])
        if tables["baseline"].theil_u1 > 0:
            eff = relative_efficiency_gain(tables["baseline"].theil_u1, tables["proposed"].theil_u1)
    prov = {"sign_convention": SIGN_CONVENTION, "holdout_years": [actual.start_year, actual.end_year]}
    diagnostics = {}
    variants = []
    selected = None
    if result is not None:
        prov.update(result.notes)
        variants = [v.row() for v in result.variants]
        selected = result.selected.transform
        model = result.model
        prov["order"] = list(model.error_order.as_tuple())
        if model.transform_tag != "level":
            # ME of the model on the scale it was fitted on, next to the at-level ME
            reference = _transformed_actual(model, actual)
            if reference is not None:
                internal = result.selected.transformed_forecast
                diagnostics["me_transformed_scale"] = mean_error(reference, internal.values)
        if result.verdict is not None:
            diagnostics["stationarity"] = result.verdict.to_dict()
        if result.johansen is not None:
            diagnostics["johansen"] = result.johansen.to_dict()
    if provenance:
        prov.update(provenance)
    rows = []
    for i, year in enumerate(actual.years):
        rows.append(
            {
                "year": int(year),
                "actual": float(actual.values[i]),
                "baseline": None if baseline is None else float(baseline.values[i]),
                "proposed": float(fc.values[i]),
            }
        )
    return ReproductionReport(
        tax=tax or (result.tax if result else ""),
        variant_table=variants,
        error_tables=tables,
        accuracy_gain=gain,
        relative_efficiency_pct=eff,
        provenance=prov,
        plot_rows=rows,
        selected_transform=selected,
        diagnostics=diagnostics,
    )


def _transformed_actual(model: RegArimaModel, actual: AnnualSeries):
    try:
        return to_transformed_scale(model, actual).values
    except FiscastError:
        return None

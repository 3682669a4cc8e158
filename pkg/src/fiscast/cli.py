"""``fiscast`` command-line interface."""

from __future__ import annotations

import argparse
import hashlib
import logging
import sys
from pathlib import Path

from . import __version__, plotting, reporting
from .config import RunConfig, load_config
from .errors import ConfigError, FiscastError, SpecError, all_error_classes
from .estimation import ArimaOrder, fit_regarima, forecast_regarima
from .evaluation import ErrorTable, evaluate
from .ingest import read_series
from .revenue import (
    ElasticityBaselineSpec,
    TaxModelSpec,
    compare_models,
    run_baseline_elasticity,
    run_dzp_pipeline,
    run_proposed_pipeline,
)
from .series import AnnualSeries, SeriesFrame, align
from .stattests import adf_test, dfgls_test, johansen_max_eigen, kpss_test, pp_test, stationarity_verdict
from .transforms import hp_filter
from .association import predictor_screen

COMMANDS = ("diagnose", "screen", "fit", "forecast", "evaluate", "compare")
log = logging.getLogger("fiscast")


# -- helpers -----------------------------------------------------------------


def _frame(series: dict, names) -> SeriesFrame:
    missing = [n for n in names if n not in series]
    if missing:
        raise SpecError(f"series not found in the data: {', '.join(missing)}")
    return align([series[n] for n in names])


def _spec(cfg: RunConfig) -> TaxModelSpec:
    return TaxModelSpec(
        cfg.tax,
        cfg.target_column,
        cfg.predictor_columns,
        transform=cfg.transform,
        arima_order="auto" if cfg.arima == "auto" else ArimaOrder(*cfg.arima),
        holdout_years=cfg.holdout_years,
        hp_lambda=cfg.hp_lambda,
        intercept=cfg.intercept,
        selection=cfg.selection,
        johansen_lag=cfg.johansen_lag,
    )


def _pipeline(cfg: RunConfig, series: dict):
    frame = _frame(series, [cfg.target_column, *cfg.predictor_columns])
    if cfg.tax == "DZP" and cfg.transform == "auto" and cfg.arima == "auto":
        return run_dzp_pipeline(
            frame, cfg.holdout_years, cfg.target_column, cfg.predictor_columns[0], selection=cfg.selection
        )
    return run_proposed_pipeline(_spec(cfg), frame)


def _baseline(cfg: RunConfig, series: dict, actual: AnnualSeries):
    """Baseline forecast over the years of ``actual``, if one is configured."""
    name = cfg.baseline_column or f"{cfg.target_column}_MF"
    if cfg.elasticities and not cfg.baseline_column:
        base_year = actual.start_year - 1
        target = series[cfg.target_column]
        spec = ElasticityBaselineSpec(
            dict(cfg.elasticities),
            tuple(sorted(cfg.elasticities)),
            base_revenue=target.value_at(base_year),
            base_year=base_year,
            name="baseline",
        )
        preds = {k: series[k] for k in spec.predictor_columns if k in series}
        frame = align(list(preds.values())) if preds else None
        if frame is None:
            raise SpecError("elasticity predictors are not in the data")
        return run_baseline_elasticity(spec, frame, len(actual)), "elasticity emulator"
    if name in series:
        s = series[name]
        return s.window(actual.start_year, actual.end_year), f"column {name}"
    if cfg.baseline_column:
        raise SpecError(f"baseline column {name!r} not in the data")
    return None, None


def _published(cfg: RunConfig) -> list:
    return [
        ErrorTable.published(*row, n=cfg.holdout_years, label=label).to_dict()
        for label, row in sorted(cfg.published.items())
    ]


def _plot_rows(actual: AnnualSeries, baseline, proposed):
    rows = []
    for i, year in enumerate(actual.years):
        rows.append(
            {
                "year": int(year),
                "actual": float(actual.values[i]),
                "baseline": None if baseline is None else float(baseline.values[i]),
                "proposed": None if proposed is None else float(proposed.values[i]),
            }
        )
    return rows


# -- commands ----------------------------------------------------------------


def cmd_diagnose(cfg: RunConfig, series: dict):
    names = list(cfg.diagnose_series) or [cfg.target_column, *cfg.predictor_columns]
    frame = _frame(series, names)
    unit_root = {}
    for name in names:
        s = frame[name]
        reports, errors = [], {}
        for label, fn in (("ADF", adf_test), ("PP", pp_test), ("KPSS", kpss_test), ("DFGLS", dfgls_test)):
            try:
                reports.append(fn(s))
            except FiscastError as exc:
                errors[label] = f"{type(exc).__name__}: {exc}"
        verdict = stationarity_verdict(reports, s) if len(reports) >= 2 else None
        unit_root[name] = {"verdict": verdict, "errors": errors}
    result = {"unit_root": unit_root, "johansen": None}
    try:
        result["johansen"] = johansen_max_eigen(frame, cfg.johansen_lag, names[: 5])
    except FiscastError as exc:
        result["johansen_error"] = f"{type(exc).__name__}: {exc}"
    dec = hp_filter(frame[names[0]], cfg.hp_lambda)
    result["decomposition"] = {"series": names[0], "method": "HP", "lambda": cfg.hp_lambda}
    return result, {"decomposition": (frame[names[0]], dec)}


def cmd_screen(cfg: RunConfig, series: dict):
    predictors = list(cfg.screen_predictors) or list(cfg.predictor_columns)
    frame = _frame(series, [cfg.target_column, *predictors])
    reports = predictor_screen(
        frame, cfg.target_column, predictors, cfg.screen_threshold, cfg.significance, cfg.chi2_bins
    )
    return {"target": cfg.target_column, "screen": reports, "years": list(frame.year_range)}, {}


def cmd_fit(cfg: RunConfig, series: dict):
    res = _pipeline(cfg, series)
    baseline, _ = _baseline(cfg, series, res.actual)
    result = {
        "selected_transform": res.selected.transform,
        "variants": [v.row() for v in res.variants],
        "model": res.model,
        "error_tables": {"proposed": res.errors},
        "provenance": dict(res.notes),
        "stationarity": res.verdict,
        "johansen": res.johansen,
    }
    return result, {"plot_rows": _plot_rows(res.actual, baseline, res.forecast)}


def cmd_forecast(cfg: RunConfig, series: dict):
    res = _pipeline(cfg, series)
    chosen = res.model
    frame = _frame(series, [cfg.target_column, *cfg.predictor_columns])
    model = fit_regarima(
        frame, cfg.target_column, list(cfg.predictor_columns), chosen.error_order, chosen.transform_tag,
        cfg.intercept, cfg.hp_lambda,
    )
    last = frame.year_range[1]
    future_end = min(series[c].end_year for c in cfg.predictor_columns)
    horizon = future_end - last
    if horizon < 1:
        raise SpecError("no predictor values beyond the last revenue year; nothing to forecast")
    future = align([series[c].window(last + 1, future_end) for c in cfg.predictor_columns])
    fc = forecast_regarima(model, future, horizon)
    rows = [{"year": int(y), "actual": None, "baseline": None, "proposed": float(v)} for y, v in zip(fc.years, fc.values)]
    result = {
        "selected_transform": res.selected.transform,
        "variants": [v.row() for v in res.variants],
        "model": model,
        "forecast": fc.to_dict(),
        "provenance": {**res.notes, "refit_years": [frame.year_range[0], last]},
    }
    return result, {"plot_rows": rows}


def cmd_evaluate(cfg: RunConfig, series: dict):
    actual_all = _frame(series, [cfg.target_column])[cfg.target_column]
    columns = list(cfg.forecast_columns) or [cfg.baseline_column or f"{cfg.target_column}_MF"]
    tables, first = {}, None
    for name in columns:
        if name not in series:
            raise SpecError(f"forecast column {name!r} not in the data")
        fc = series[name]
        actual = actual_all.window(fc.start_year, fc.end_year)
        tables[name] = evaluate(actual, fc, label=name)
        if first is None:
            first = (actual, fc)
    result = {"error_tables": tables, "published": _published(cfg)}
    return result, {"plot_rows": _plot_rows(first[0], first[1], None)}


def cmd_compare(cfg: RunConfig, series: dict):
    if cfg.proposed_column:
        if cfg.proposed_column not in series:
            raise SpecError(f"proposed column {cfg.proposed_column!r} not in the data")
        proposed = series[cfg.proposed_column]
        actual = series[cfg.target_column].window(proposed.start_year, proposed.end_year)
        source = f"column {cfg.proposed_column}"
    else:
        proposed = _pipeline(cfg, series)
        actual = proposed.actual
        source = "pipeline"
    baseline, baseline_source = _baseline(cfg, series, actual)
    report = compare_models(
        actual,
        baseline,
        proposed,
        tax=cfg.tax,
        provenance={"baseline_source": baseline_source, "proposed_source": source, "seed": cfg.seed},
    )
    result = report.to_dict()
    result["published"] = _published(cfg)
    if not isinstance(proposed, AnnualSeries):
        result["model"] = proposed.model
    return result, {"plot_rows": report.plot_rows}


HANDLERS = {
    "diagnose": cmd_diagnose,
    "screen": cmd_screen,
    "fit": cmd_fit,
    "forecast": cmd_forecast,
    "evaluate": cmd_evaluate,
    "compare": cmd_compare,
}


def run(command: str, cfg: RunConfig) -> dict:
    """Run one command, write its outputs under ``output_dir/<command>``, and return the report.

    Each handler returns the report body plus extras that only feed the
    plot-data file and figures.
    """
    data = cfg.data_file
    if not data.is_file():
        raise ConfigError(f"data file {str(data)!r} not found")
    series = read_series(data)
    result, extras = HANDLERS[command](cfg, series)
    report = {
        "command": command,
        "version": __version__,
        "config": cfg.to_dict(),
        "config_fingerprint": cfg.fingerprint(),
        "data_sha256": hashlib.sha256(Path(data).read_bytes()).hexdigest(),
        "seed": cfg.seed,
        "result": result,
    }
    out = cfg.out_dir / command
    reporting.write_reports(out, report)
    if "plot_rows" in extras:
        rows = extras["plot_rows"]
        reporting.write_plotdata(rows, out / f"plotdata_{cfg.tax}.csv")
        plotting.forecast_figure(rows, out / f"figure_{cfg.tax}.png", title=f"{cfg.tax}: {command}")
    if "decomposition" in extras:
        s, dec = extras["decomposition"]
        plotting.decomposition_figure(s, dec.trend.values, dec.cycle.values, out / f"decomposition_{s.name}.png",
                                      title=f"{s.name}: HP trend and cycle")
    return report


def exit_code_table() -> list:
    return sorted((cls.exit_code, cls.__name__) for cls in all_error_classes())


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fiscast", description="Annual tax-revenue forecasting workflow.")
    p.add_argument("--version", action="version", version=f"fiscast {__version__}")
    sub = p.add_subparsers(dest="command", required=True, metavar="command")
    for name in COMMANDS:
        c = sub.add_parser(name, help=HANDLERS[name].__name__.replace("cmd_", "") + " command")
        c.add_argument("--config", required=True, help="JSON configuration file")
        c.add_argument("--seed", type=int, help="override the configured seed")
        c.add_argument("--lambda", dest="hp_lambda", type=float, help="override the HP smoothing parameter")
        c.add_argument("--holdout", type=int, help="override the number of holdout years")
        c.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config).with_overrides(args.seed, args.hp_lambda, args.holdout)
        report = run(args.command, cfg)
    except FiscastError as exc:
        print(f"fiscast: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    print(f"fiscast {args.command}: wrote {cfg.out_dir / args.command / 'report.json'}")
    log.info("config sha256 %s", report["config_fingerprint"])
    return 0


if __name__ == "__main__":
    sys.exit(main())

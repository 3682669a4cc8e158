"""JSON, text and plot-data emission."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

PLOT_COLUMNS = ("year", "actual", "baseline", "proposed")


def to_jsonable(obj):
    """Plain JSON types; non-finite floats become the strings ``"inf"``, ``"-inf"``, ``"nan"``."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isfinite(x):
            return x
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    if obj is None or isinstance(obj, str):
        return obj
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(report: dict) -> str:
    return json.dumps(to_jsonable(report), sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def _fmt(v, digits=4):
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, float):
        if not math.isfinite(v):
            return str(v)
        return f"{v:.{digits}f}"
    if isinstance(v, (list, tuple)):
        return "(" + ",".join(str(x) for x in v) + ")"
    return str(v)


def format_table(headers, rows, digits=4) -> str:
    cells = [[_fmt(v, digits) for v in row] for row in rows]
    widths = [max(len(str(h)), *(len(r[i]) for r in cells)) if cells else len(str(h)) for i, h in enumerate(headers)]
    lines = ["  ".join(str(h).rjust(w) if i else str(h).ljust(w) for i, (h, w) in enumerate(zip(headers, widths)))]
    lines.append("  ".join("-" * w for w in widths))
    for r in cells:
        lines.append("  ".join(c.rjust(w) if i else c.ljust(w) for i, (c, w) in enumerate(zip(r, widths))))
    return "\n".join(lines)


def _error_rows(tables: dict):
    rows = []
    for t in tables.values():
        rows.append([t["label"], t["me"], t["mae"], t["smae"], t["rmse"], t["theil_u1"]])
    return rows


ERROR_HEADERS = ("Model", "ME", "MAE", "sMAE", "RMSE", "Theil U1")


def render_text(report: dict) -> str:
    """Aligned plain-text rendering of a report produced by the CLI."""
    r = to_jsonable(report)
    out = [f"fiscast {r['command']}", f"config sha256 {r['config_fingerprint']}", ""]
    res = r["result"]
    if "unit_root" in res:
        rows = []
        for name, block in res["unit_root"].items():
            for t in block["verdict"]["tests"] if block.get("verdict") else block.get("tests", []):
                rows.append([name, t["test"], t["lags"], t["statistic"], t["critical_values"]["5%"], t["reject_at_5pct"], t["low_power_warning"]])
        out += ["Unit-root and stationarity tests", format_table(("Series", "Test", "Lags", "Stat", "5% cv", "Reject", "Low power"), rows, 3), ""]
        rec = [[n, b["verdict"]["concordant"] if b.get("verdict") else None, ", ".join(b["verdict"]["recommended_transforms"]) if b.get("verdict") else "-"] for n, b in res["unit_root"].items()]
        out += [format_table(("Series", "Concordant", "Recommended"), rec), ""]
    if res.get("stationarity"):
        v = res["stationarity"]
        rows = [[t["test"], t["lags"], t["statistic"], t["critical_values"]["5%"], t["reject_at_5pct"]] for t in v["tests"]]
        out += [f"Stationarity of the training target (recommended: {', '.join(v['recommended_transforms'])})",
                format_table(("Test", "Lags", "Stat", "5% cv", "Reject"), rows, 3), ""]
    if res.get("johansen"):
        j = res["johansen"]
        rows = [[f"r = {i}", lam, s, c] for i, (lam, s, c) in enumerate(zip(j["eigenvalues"], j["max_eigen_statistics"], j["critical_values_5pct"]))]
        out += [f"Johansen max-eigenvalue test ({j['deterministic']}, lag {j['lag_order']}), rank {j['cointegration_rank']}",
                format_table(("Null", "Eigenvalue", "Lambda-max", "5% cv"), rows, 3), ""]
    if "screen" in res:
        rows = []
        for s in res["screen"]:
            t, mw = s["tests"].get("t"), s["tests"].get("mannwhitney")
            rows.append([s["predictor"], s["r"], s["tau"], s["rho"], t and t["p_value"], mw and mw["p_value"], s["passes"]])
        out += [f"Predictor screen against {res.get('target', '')}", format_table(("Predictor", "Pearson", "Kendall", "Spearman", "p(t)", "p(MW)", "Passes"), rows, 3), ""]
    if res.get("variants"):
        rows = []
        for v in res["variants"]:
            if "failure" in v:
                rows.append([v["transform"], "-", "-", "-", "-", "-", "-", v["failure"]])
            else:
                rows.append([v["transform"], v["order"], v["loglik"], v["aic"], v["aicc"], v["bic"], v["r2"], v["holdout_rmse"]])
        out += [f"Estimated variants (selected: {res.get('selected_transform')})",
                format_table(("Transform", "Order", "LogL", "AIC", "AICc", "BIC", "R2", "Holdout RMSE"), rows, 2), ""]
    if res.get("model"):
        m = res["model"]
        rows = [[k, v] for k, v in m["coefficients"].items()]
        rows += [[f"ar{i + 1}", v] for i, v in enumerate(m["ar"])] + [[f"ma{i + 1}", v] for i, v in enumerate(m["ma"])]
        out += [f"Selected model: {m['target']} on {', '.join(m['predictors'])}, {m['transform']}, ARIMA{_fmt(m['order'])}",
                format_table(("Parameter", "Estimate"), rows, 4), ""]
    if res.get("error_tables"):
        rows = _error_rows(res["error_tables"])
        if res.get("accuracy_gain"):
            rows += _error_rows({"gain": res["accuracy_gain"]})
        out += ["Forecasting errors", format_table(ERROR_HEADERS, rows, 2), ""]
        if res.get("relative_efficiency_pct") is not None:
            out += [f"Relative efficiency gain (Theil U1): {res['relative_efficiency_pct']:.1f}%", ""]
    if res.get("published"):
        rows = [[p["label"], p["me"], p["mae"], p["smae"], p["rmse"], p["theil_u1"], "; ".join(p["flags"]) or "-"] for p in res["published"]]
        out += ["Published rows", format_table((*ERROR_HEADERS, "Flags"), rows, 2), ""]
    if res.get("forecast"):
        f = res["forecast"]
        rows = [[y, v] for y, v in zip(range(f["start_year"], f["start_year"] + len(f["values"])), f["values"])]
        out += [f"Forecast of {f['name']}", format_table(("Year", "Value"), rows, 2), ""]
    if res.get("provenance"):
        out += ["Provenance"] + [f"  {k}: {_fmt(v)}" for k, v in sorted(res["provenance"].items())] + [""]
    if res.get("diagnostics", {}).get("me_transformed_scale") is not None:
        out += [f"ME on the fitted scale: {res['diagnostics']['me_transformed_scale']:.4f}", ""]
    return "\n".join(out).rstrip() + "\n"


def write_plotdata(rows, path) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(PLOT_COLUMNS)
        for row in rows:
            w.writerow(["" if row.get(c) is None else repr(row[c]) if isinstance(row[c], float) else row[c] for c in PLOT_COLUMNS])
    return path


def write_reports(out_dir, report: dict) -> dict:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {"json": out_dir / "report.json", "text": out_dir / "report.txt"}
    paths["json"].write_text(dumps(report), encoding="utf-8")
    paths["text"].write_text(render_text(report), encoding="utf-8")
    return paths

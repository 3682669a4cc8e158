"""Run configuration: a JSON object with a fixed set of keys."""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .revenue import DEFAULT_TARGETS, SELECTION_RULES, TAX_EQUATIONS
from .transforms import HP_LAMBDA_ANNUAL

TRANSFORMS = ("auto", "level", "diff1", "HP", "log")


@dataclass(frozen=True)
class RunConfig:
    data_path: str
    tax: str = "PIT"
    target: str = ""
    holdout_years: int = 3
    hp_lambda: float = HP_LAMBDA_ANNUAL
    arima: object = "auto"
    transform: str = "auto"
    selection: str = "holdout_rmse"
    intercept: bool = False
    significance: float = 0.01
    screen_threshold: float = 0.7
    chi2_bins: int = 2
    johansen_lag: int = 1
    seed: int = 0
    output_dir: str = "fiscast_out"
    baseline_column: str = ""
    proposed_column: str = ""
    elasticities: dict = field(default_factory=dict)
    diagnose_series: tuple = ()
    screen_predictors: tuple = ()
    forecast_columns: tuple = ()
    published: dict = field(default_factory=dict)
    base_dir: str = field(default=".", compare=False, repr=False)

    def __post_init__(self):
        if not isinstance(self.data_path, str) or not self.data_path:
            raise ConfigError("data_path must be a non-empty string")
        if self.tax not in TAX_EQUATIONS:
            raise ConfigError(f"tax must be one of {sorted(TAX_EQUATIONS)}")
        _int_in("holdout_years", self.holdout_years, 1, 10)
        _int_in("chi2_bins", self.chi2_bins, 2, 5)
        _int_in("johansen_lag", self.johansen_lag, 1, 3)
        _int_in("seed", self.seed, 0, 2**32 - 1)
        _num_in("hp_lambda", self.hp_lambda, 0.0, 1e8, open_low=True)
        _num_in("significance", self.significance, 0.0, 0.5, open_low=True)
        _num_in("screen_threshold", self.screen_threshold, 0.0, 1.0)
        if self.transform not in TRANSFORMS:
            raise ConfigError(f"transform must be one of {TRANSFORMS}")
        if self.selection not in SELECTION_RULES:
            raise ConfigError(f"selection must be one of {SELECTION_RULES}")
        if not isinstance(self.intercept, bool):
            raise ConfigError("intercept must be true or false")
        if self.arima != "auto":
            order = self.arima
            if (
                not isinstance(order, (list, tuple))
                or len(order) != 3
                or not all(isinstance(v, int) and not isinstance(v, bool) and 0 <= v <= 3 for v in order)
                or order[1] > 2
            ):
                raise ConfigError('arima must be "auto" or [p, d, q] with p, q <= 3 and d <= 2')
            object.__setattr__(self, "arima", tuple(order))
        for name in ("diagnose_series", "screen_predictors", "forecast_columns"):
            value = getattr(self, name)
            if not isinstance(value, (list, tuple)) or not all(isinstance(v, str) for v in value):
                raise ConfigError(f"{name} must be a list of series names")
            object.__setattr__(self, name, tuple(value))
        for k, v in self.elasticities.items():
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                raise ConfigError(f"elasticity for {k!r} must be a number")
        for label, row in self.published.items():
            if not isinstance(row, (list, tuple)) or len(row) != 5:
                raise ConfigError(f"published row {label!r} needs [ME, MAE, sMAE, RMSE, U1]")

    @property
    def target_column(self) -> str:
        return self.target or DEFAULT_TARGETS[self.tax]

    @property
    def predictor_columns(self) -> tuple:
        return TAX_EQUATIONS[self.tax]

    @property
    def data_file(self) -> Path:
        p = Path(self.data_path)
        return p if p.is_absolute() else Path(self.base_dir) / p

    @property
    def out_dir(self) -> Path:
        p = Path(self.output_dir)
        return p if p.is_absolute() else Path(self.base_dir) / p

    def to_dict(self) -> dict:
        out = {f.name: getattr(self, f.name) for f in dataclasses.fields(self) if f.name != "base_dir"}
        for k, v in out.items():
            if isinstance(v, tuple):
                out[k] = list(v)
        return out

    def fingerprint(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()

    def with_overrides(self, seed=None, hp_lambda=None, holdout=None) -> RunConfig:
        changes = {}
        if seed is not None:
            changes["seed"] = seed
        if hp_lambda is not None:
            changes["hp_lambda"] = hp_lambda
        if holdout is not None:
            changes["holdout_years"] = holdout
        return dataclasses.replace(self, **changes) if changes else self


def _int_in(name, v, lo, hi):
    if not isinstance(v, int) or isinstance(v, bool) or not lo <= v <= hi:
        raise ConfigError(f"{name} must be an integer in [{lo}, {hi}]")


def _num_in(name, v, lo, hi, open_low=False):
    ok = isinstance(v, (int, float)) and not isinstance(v, bool)
    if ok:
        ok = (lo < v if open_low else lo <= v) and v <= hi
    if not ok:
        raise ConfigError(f"{name} must be a number in {'(' if open_low else '['}{lo}, {hi}]")


def parse_config(data: dict, base_dir=".") -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a JSON object")
    known = {f.name for f in dataclasses.fields(RunConfig)} - {"base_dir"}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"unknown configuration keys: {', '.join(unknown)}")
    if "data_path" not in data:
        raise ConfigError("data_path is required")
    try:
        return RunConfig(**data, base_dir=str(base_dir))
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"configuration file {str(path)!r} not found") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"configuration is not valid JSON: {exc}") from None
    return parse_config(data, base_dir=path.parent)

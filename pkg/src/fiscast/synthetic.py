"""Seeded synthetic data with known structure, and the bundled fixture."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .series import AnnualSeries, SeriesFrame

FIXTURE_SEED = 20240601
FIXTURE_START = 2000
FIXTURE_YEARS = 20
FUTURE_YEARS = 2


def random_walk(n: int, rng, scale: float = 1.0, drift: float = 0.0) -> np.ndarray:
    return np.cumsum(drift + scale * rng.standard_normal(n))


def ar1_noise(n: int, phi: float, rng, scale: float = 1.0, burn: int = 50) -> np.ndarray:
    e = scale * rng.standard_normal(n + burn)
    out = np.empty_like(e)
    out[0] = e[0]
    for t in range(1, e.size):
        out[t] = phi * out[t - 1] + e[t]
    return out[burn:]


def cointegrated_frame(n: int, beta, seed: int, start_year: int = 2000, noise: float = 1.0, phi: float = 0.0):
    """``y = X beta + u`` with random-walk columns of X and stationary ``u``."""
    rng = np.random.default_rng(seed)
    beta = np.asarray(beta, dtype=float)
    X = np.column_stack([100.0 + random_walk(n, rng, scale=3.0, drift=1.0) for _ in beta])
    u = ar1_noise(n, phi, rng, scale=noise) if phi else noise * rng.standard_normal(n)
    data = {f"x{i + 1}": X[:, i] for i in range(beta.size)}
    data["y"] = X @ beta + u
    return SeriesFrame.from_arrays(start_year, data)


def fixture_series(seed: int = FIXTURE_SEED) -> list:
    """Revenue, base and baseline-forecast series on a common calendar.

    Predictors run ``FUTURE_YEARS`` past the revenue series so the forecast
    command has something to project.  ``*_MF`` columns are baseline
    forecasts covering only the last three revenue years.
    """
    rng = np.random.default_rng(seed)
    n, m = FIXTURE_YEARS, FIXTURE_YEARS + FUTURE_YEARS
    t = np.arange(m)
    wage = 800.0 * np.exp(0.06 * t) * (1 + 0.02 * np.sin(t / 2.0)) + 5.0 * rng.standard_normal(m)
    soc = 300.0 * np.exp(0.05 * t) + 4.0 * rng.standard_normal(m)
    pit = 0.1 * wage + 0.06 * soc + ar1_noise(m, 0.4, rng, scale=2.0)
    pi_nf = 1500.0 * np.exp(0.05 * t) + 40.0 * np.cumsum(rng.standard_normal(m))
    pi_f = 400.0 * np.exp(0.04 * t) + 10.0 * np.cumsum(rng.standard_normal(m))
    kd_ddd = 0.1 * pi_nf + 0.08 * pi_f + 4.0 * rng.standard_normal(m)
    prm = 200.0 * np.exp(0.07 * t + 0.05 * rng.standard_normal(m))
    dzp = prm**0.75 * np.exp(0.01 * rng.standard_normal(m))
    ddd = 25.0 * 0.9 ** np.arange(n) + 15.0 + rng.standard_normal(n)
    out = [
        AnnualSeries("WAGE", FIXTURE_START, wage),
        AnnualSeries("SOC", FIXTURE_START, soc),
        AnnualSeries("PI_NF", FIXTURE_START, pi_nf),
        AnnualSeries("PI_F", FIXTURE_START, pi_f),
        AnnualSeries("PRM", FIXTURE_START, prm),
        AnnualSeries("PIT", FIXTURE_START, pit[:n]),
        AnnualSeries("KD_DDD", FIXTURE_START, kd_ddd[:n]),
        AnnualSeries("DZP", FIXTURE_START, dzp[:n]),
        AnnualSeries("DDD", FIXTURE_START, ddd),
    ]
    last3 = FIXTURE_START + n - 3
    for name, bias, spread in (("PIT", 6.0, 4.0), ("KD_DDD", -10.0, 8.0), ("DZP", 1.0, 0.5)):
        actual = {s.name: s for s in out}[name].values[-3:]
        mf = actual + bias + spread * rng.standard_normal(3)
        out.append(AnnualSeries(f"{name}_MF", last3, mf))
    return out


def write_long_csv(series, path) -> Path:
    """Write series as ``year,series,value`` rows (shortest exact float repr)."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["year", "series", "value"])
        for s in series:
            for year, v in zip(s.years, s.values):
                w.writerow([int(year), s.name, repr(float(v))])
    return path

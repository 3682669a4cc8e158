import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fiscast.errors import InvariantViolation, SingularMoment, SingularRegression
from fiscast.series import SeriesFrame
from fiscast.stattests import (
    TestReport,
    adf_test,
    dfgls_test,
    johansen_max_eigen,
    kpss_test,
    pp_test,
    stationarity_verdict,
)
from fiscast.stattests import critical_values as cv
from fiscast.stattests.unitroot import default_max_lags, gls_detrend, newey_west

from conftest import series

FIXED20 = np.array(
    [3.1, 2.4, 4.0, 5.2, 4.4, 6.1, 5.0, 7.3, 6.6, 8.0, 7.2, 6.5, 8.8, 9.1, 8.2, 10.4, 9.6, 11.0, 10.1, 12.3]
)


def walk(n, seed):
    return np.random.default_rng(seed).standard_normal(n).cumsum()


def noise(n, seed):
    return np.random.default_rng(seed).standard_normal(n)


def fake_report(name, reject):
    crit = {"1%": -3.5, "5%": -2.9, "10%": -2.6} if name != "KPSS" else {"1%": 0.739, "5%": 0.463, "10%": 0.347}
    if name == "KPSS":
        stat = 1.0 if reject else 0.1
    else:
        stat = -4.0 if reject else -1.0
    null = "stationarity" if name == "KPSS" else "unit root"
    return TestReport(name, "constant", 0, stat, crit, reject, null, 16)


# -- ADF ---------------------------------------------------------------------


def test_adf_matches_hand_ols():
    y = FIXED20
    dy = np.diff(y)
    X = np.column_stack([np.ones(dy.size), y[:-1]])
    beta = np.linalg.solve(X.T @ X, X.T @ dy)
    resid = dy - X @ beta
    s2 = resid @ resid / (dy.size - 2)
    se = np.sqrt(s2 * np.linalg.inv(X.T @ X)[1, 1])
    rep = adf_test(series(y), max_lags=0)
    assert rep.statistic == pytest.approx(beta[1] / se, abs=1e-8)
    assert rep.lags == 0 and rep.nobs == 19
    assert rep.low_power


def test_adf_random_walk_and_noise():
    assert not adf_test(series(walk(100, 1))).reject_at_5pct
    assert adf_test(series(noise(100, 1))).reject_at_5pct


def test_adf_size_and_power_small_mc():
    rw = sum(adf_test(walk(100, s)).reject_at_5pct for s in range(100))
    wn = sum(adf_test(noise(100, s)).reject_at_5pct for s in range(100))
    assert rw <= 10 and wn >= 90


@settings(max_examples=30, deadline=None)
@given(st.floats(0.01, 100), st.floats(-1e3, 1e3), st.integers(0, 1000))
def test_adf_affine_invariance(a, b, seed):
    y = walk(40, seed)
    r1 = adf_test(y, max_lags=2)
    r2 = adf_test(a * y + b, max_lags=2)
    assert r1.lags == r2.lags
    assert r2.statistic == pytest.approx(r1.statistic, abs=1e-8)


def test_default_max_lags():
    assert default_max_lags(100) == 4
    assert default_max_lags(16) == 2
    assert default_max_lags(8) == 0


# -- PP ----------------------------------------------------------------------


def test_pp_close_to_adf0_on_noise():
    for seed in range(5):
        y = noise(100, seed)
        pp = pp_test(y)
        adf0 = adf_test(y, max_lags=0)
        assert abs(pp.statistic - adf0.statistic) <= 0.15 * abs(adf0.statistic)


def test_pp_constant_series():
    with pytest.raises(SingularRegression):
        pp_test(np.full(20, 3.0))


def test_pp_size_small_mc():
    assert sum(pp_test(walk(100, s)).reject_at_5pct for s in range(100)) <= 10


# -- KPSS --------------------------------------------------------------------


def test_kpss_critical_value():
    assert cv.kpss("constant")["5%"] == 0.463
    assert cv.kpss("trend")["5%"] == 0.146


def test_kpss_size_small_mc():
    assert sum(kpss_test(noise(100, s)).reject_at_5pct for s in range(100)) <= 10


@settings(max_examples=30, deadline=None)
@given(st.floats(-1e4, 1e4), st.integers(0, 1000))
def test_kpss_shift_invariance(c, seed):
    y = walk(30, seed)
    assert kpss_test(y + c).statistic == pytest.approx(kpss_test(y).statistic, abs=1e-8)


def test_newey_west_zero_bandwidth_is_variance():
    e = noise(50, 3)
    assert newey_west(e, 0) == pytest.approx(e @ e / 50)


# -- DF-GLS ------------------------------------------------------------------


def test_gls_detrend_constant_series():
    np.testing.assert_allclose(gls_detrend(np.full(25, 7.0)), 0.0, atol=1e-12)


def test_dfgls_size_small_mc():
    assert sum(dfgls_test(walk(100, s)).reject_at_5pct for s in range(100)) <= 10


def test_dfgls_power_against_ar1():
    hits = 0
    for seed in range(100):
        e = noise(150, seed)
        u = np.zeros(150)
        for t in range(1, 150):
            u[t] = 0.5 * u[t - 1] + e[t]
        hits += dfgls_test(u[50:]).reject_at_5pct
    assert hits >= 70


# -- critical values -----------------------------------------------------------


def test_dickey_fuller_asymptotic_values():
    big = cv.dickey_fuller("constant", 10**9)
    assert big["5%"] == pytest.approx(-2.86154, abs=1e-4)
    assert cv.dickey_fuller("trend", 10**9)["1%"] == pytest.approx(-3.95877, abs=1e-4)


def test_critical_values_are_monotone():
    for spec in ("none", "constant", "trend"):
        c = cv.dickey_fuller(spec, 16)
        assert c["1%"] < c["5%"] < c["10%"]
    for m in range(1, cv.JOHANSEN_MAX_DIM):
        assert cv.johansen_max_eigen(m + 1) > cv.johansen_max_eigen(m)


# -- reports and verdicts ----------------------------------------------------


def test_report_rejects_inconsistent_verdict():
    with pytest.raises(InvariantViolation):
        TestReport("ADF", "constant", 0, -4.0, {"1%": -3.5, "5%": -2.9, "10%": -2.6}, False, "unit root", 16)


def test_verdict_concordant_stationary():
    v = stationarity_verdict([fake_report("ADF", True), fake_report("KPSS", False)])
    assert v.concordant and v.recommended_transforms == ["level"]


def test_verdict_concordant_unit_root():
    v = stationarity_verdict([fake_report("ADF", False), fake_report("KPSS", True)])
    assert v.concordant and v.recommended_transforms == ["difference-1", "HP"]


def test_verdict_discordant():
    v = stationarity_verdict([fake_report("ADF", True), fake_report("KPSS", True)])
    assert not v.concordant and v.recommended_transforms[:2] == ["difference-1", "HP"]


def test_verdict_discordant_adds_log_for_growth():
    grow = series(100 * 1.05 ** np.arange(16))
    v = stationarity_verdict([fake_report("ADF", True), fake_report("KPSS", True)], grow)
    assert v.recommended_transforms == ["difference-1", "HP", "log"]


# -- Johansen ----------------------------------------------------------------


def pair(seed, cointegrated):
    rng = np.random.default_rng(seed)
    y1 = rng.standard_normal(200).cumsum()
    y2 = 2 * y1 + rng.standard_normal(200) if cointegrated else rng.standard_normal(200).cumsum()
    return SeriesFrame.from_arrays(1800, {"y1": y1, "y2": y2})


def test_johansen_duplicate_column():
    y = walk(50, 0)
    with pytest.raises(SingularMoment):
        johansen_max_eigen(SeriesFrame.from_arrays(1900, {"a": y, "b": y}))


def test_johansen_detects_cointegration():
    assert sum(johansen_max_eigen(pair(s, True)).cointegration_rank >= 1 for s in range(30)) >= 27


def test_johansen_independent_walks():
    assert sum(johansen_max_eigen(pair(s, False)).cointegration_rank == 0 for s in range(30)) >= 25


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 2))
def test_johansen_report_invariants(seed, lag):
    rng = np.random.default_rng(seed)
    f = SeriesFrame.from_arrays(1900, {c: rng.standard_normal(40).cumsum() for c in "abc"})
    r = johansen_max_eigen(f, lag)
    lam = np.array(r.eigenvalues)
    assert np.all(lam >= 0) and np.all(lam < 1)
    assert np.all(np.diff(lam) <= 1e-12)
    assert all(s >= 0 for s in r.max_eigen_statistics)
    expected = 0
    for s, c in zip(r.max_eigen_statistics, r.critical_values_5pct):
        if s > c:
            expected += 1
        else:
            break
    assert r.cointegration_rank == expected

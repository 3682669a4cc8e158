import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fiscast.errors import (
    DuplicateName,
    EmptyIntersection,
    HoldoutTooLarge,
    InvalidSeries,
    ZeroDenominator,
)
from fiscast.series import AnnualSeries, SeriesFrame, align, growth_rates, slice_train_test

from conftest import series


def span(name, first, last):
    return AnnualSeries(name, first, np.arange(last - first + 1, dtype=float) + 1.0)


def test_series_rejects_nan_and_empty():
    with pytest.raises(InvalidSeries):
        series([1.0, np.nan])
    with pytest.raises(InvalidSeries):
        series([])


def test_series_values_are_read_only():
    s = series([1, 2, 3])
    with pytest.raises(ValueError):
        s.values[0] = 5.0


def test_align_intersects_ranges():
    f = align([span("A", 2004, 2020), span("B", 2005, 2017)])
    assert f.year_range == (2005, 2017)
    assert f["A"].start_year == 2005 and f["A"].end_year == 2017


def test_align_single_series_is_identity():
    f = align([span("A", 2004, 2010)])
    assert f.year_range == (2004, 2010)
    assert f.names == ["A"]


def test_align_disjoint_raises():
    with pytest.raises(EmptyIntersection):
        align([span("A", 2004, 2006), span("B", 2010, 2012)])


def test_align_duplicate_names():
    with pytest.raises(DuplicateName):
        align([span("A", 2004, 2006), span("A", 2004, 2006)])


def test_frame_requires_exact_cover():
    with pytest.raises(Exception):
        SeriesFrame((2000, 2005), {"A": span("A", 2000, 2004)})


def test_slice_three_year_holdout():
    f = align([span("A", 2005, 2020)])
    train, test = slice_train_test(f, 3)
    assert train.year_range == (2005, 2017)
    assert test.year_range == (2018, 2020)


def test_slice_minimal():
    train, test = slice_train_test(align([span("A", 2000, 2001)]), 1)
    assert len(train) == 1 and len(test) == 1


def test_slice_too_large():
    with pytest.raises(HoldoutTooLarge):
        slice_train_test(align([span("A", 2000, 2002)]), 3)


def test_growth_rates_hand_values():
    g = growth_rates(series([100, 110, 99]))
    np.testing.assert_allclose(g.values, [0.10, -0.10], rtol=1e-12)
    assert g.start_year == 2001


def test_growth_rates_constant():
    np.testing.assert_array_equal(growth_rates(series([7, 7, 7])).values, [0.0, 0.0])


def test_growth_rates_zero_denominator_reports_year():
    with pytest.raises(ZeroDenominator) as exc:
        growth_rates(series([0, 5], start=2010))
    assert exc.value.year == 2010


@settings(max_examples=50, deadline=None)
@given(
    st.lists(st.tuples(st.integers(1990, 2010), st.integers(0, 15)), min_size=1, max_size=4),
)
def test_align_idempotent(spans):
    first = max(a for a, _ in spans)
    last = min(a + n for a, n in spans)
    items = [span(f"S{i}", a, a + n) for i, (a, n) in enumerate(spans)]
    if first > last:
        with pytest.raises(EmptyIntersection):
            align(items)
        return
    f = align(items)
    g = align(list(f.columns.values()))
    assert g.year_range == f.year_range
    assert all(g[n] == f[n] for n in f.names)


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 30), st.data())
def test_slice_partitions(n, data):
    h = data.draw(st.integers(1, n - 1))
    f = align([AnnualSeries("A", 2000, np.arange(n, dtype=float))])
    train, test = slice_train_test(f, h)
    years = list(train.years) + list(test.years)
    assert years == list(f.years)
    joined = np.concatenate([train["A"].values, test["A"].values])
    np.testing.assert_array_equal(joined, f["A"].values)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.5, 2.0), st.floats(0.1, 1e4), st.integers(2, 25))
def test_growth_of_geometric_series(r, a, n):
    g = growth_rates(series(a * r ** np.arange(n)))
    np.testing.assert_allclose(g.values, r - 1.0, rtol=1e-12, atol=1e-12)

"""Correlation coefficients, significance tests and predictor screening."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .errors import (
    AllTied,
    AllZeroDifferences,
    FiscastError,
    InvalidArgument,
    LengthMismatch,
    SparseCells,
    ZeroVariance,
)
from .series import AnnualSeries, SeriesFrame

WILCOXON_EXACT_MAX_N = 25
MW_EXACT_MAX_MIN = 10
MW_EXACT_MAX_TOTAL = 20
STRENGTH_THRESHOLD = 0.7
SIGNIFICANCE = 0.01
# Distances within this of the observed one count as "at least as extreme".
_EXTREME_EPS = 1e-9


def _arr(x):
    return np.asarray(x.values if isinstance(x, AnnualSeries) else x, dtype=float)


def _pair(x, y, min_len=3):
    a, b = _arr(x), _arr(y)
    if a.size != b.size:
        raise LengthMismatch(f"lengths differ ({a.size} vs {b.size})")
    if a.size < min_len:
        raise InvalidArgument(f"need at least {min_len} observations")
    return a, b


def pearson_r(x, y) -> float:
    a, b = _pair(x, y)
    da, db = a - a.mean(), b - b.mean()
    sa, sb = float(da @ da), float(db @ db)
    if sa == 0 or sb == 0:
        raise ZeroVariance("Pearson correlation is undefined for a constant series")
    r = float(da @ db) / math.sqrt(sa * sb)
    return max(-1.0, min(1.0, r))


def kendall_tau_b(x, y) -> float:
    """Tau-b by enumerating all pairs, with tie corrections."""
    a, b = _pair(x, y)
    n = a.size
    sx = np.sign(a[:, None] - a[None, :])
    sy = np.sign(b[:, None] - b[None, :])
    iu = np.triu_indices(n, k=1)
    sx, sy = sx[iu], sy[iu]
    n0 = sx.size
    n1 = int(np.sum(sx == 0))
    n2 = int(np.sum(sy == 0))
    if n0 == n1 or n0 == n2:
        raise AllTied("every pair is tied in one of the series")
    s = float(np.sum(sx * sy))
    return max(-1.0, min(1.0, s / math.sqrt((n0 - n1) * (n0 - n2))))


def midranks(x) -> np.ndarray:
    return stats.rankdata(_arr(x), method="average")


def spearman_rho(x, y) -> float:
    a, b = _pair(x, y)
    return pearson_r(midranks(a), midranks(b))


def correlation_t_test(x, y):
    """Student t test of zero Pearson correlation, ``n - 2`` df."""
    a, b = _pair(x, y)
    r = pearson_r(a, b)
    df = a.size - 2
    if df < 1:
        raise InvalidArgument("need at least three observations")
    if abs(r) >= 1.0:
        return math.copysign(math.inf, r), 0.0
    t = r * math.sqrt(df / (1.0 - r * r))
    return t, float(min(1.0, 2.0 * stats.t.sf(abs(t), df)))


def paired_t_test(x, y):
    """One-sample t test on the paired differences, two-sided."""
    a, b = _pair(x, y)
    d = a - b
    sd = float(np.std(d, ddof=1))
    if sd == 0:
        raise ZeroVariance("paired differences have zero spread")
    n = d.size
    t = float(d.mean()) / (sd / math.sqrt(n))
    return t, float(min(1.0, 2.0 * stats.t.sf(abs(t), n - 1)))


def _subset_sum_counts(weights):
    """Counts of sign assignments by sum of the integer ``weights`` included."""
    total = int(sum(weights))
    counts = np.zeros(total + 1, dtype=object)
    counts[0] = 1
    for w in weights:
        w = int(w)
        shifted = np.zeros_like(counts)
        shifted[w:] = counts[: total + 1 - w]
        counts = counts + shifted
    return counts


def _two_sided_from_counts(counts, observed, center):
    s = np.arange(counts.size, dtype=float)
    extreme = np.abs(s - center) >= abs(observed - center) - _EXTREME_EPS
    num = sum(int(c) for c in counts[extreme])
    den = sum(int(c) for c in counts)
    return min(1.0, num / den)


def wilcoxon_signed_rank(x, y):
    """Signed-rank statistic ``W+`` and a two-sided p-value.

    Zero differences are dropped.  Up to ``WILCOXON_EXACT_MAX_N`` non-zero
    differences the null distribution is enumerated exactly over doubled
    mid-ranks, so ties are handled exactly; beyond that a normal
    approximation with tie and continuity corrections is used.
    """
    a, b = _arr(x), _arr(y)
    if a.size != b.size:
        raise LengthMismatch(f"lengths differ ({a.size} vs {b.size})")
    d = a - b
    d = d[d != 0]
    if d.size == 0:
        raise AllZeroDifferences("all paired differences are zero")
    n = d.size
    ranks = stats.rankdata(np.abs(d), method="average")
    w_plus = float(ranks[d > 0].sum())
    if n <= WILCOXON_EXACT_MAX_N:
        doubled = np.rint(2 * ranks).astype(int)
        counts = _subset_sum_counts(doubled)
        p = _two_sided_from_counts(counts, 2 * w_plus, doubled.sum() / 2.0)
        return w_plus, p
    mean = n * (n + 1) / 4.0
    _, t = np.unique(np.abs(d), return_counts=True)
    var = n * (n + 1) * (2 * n + 1) / 24.0 - float(np.sum(t**3 - t)) / 48.0
    dev = max(abs(w_plus - mean) - 0.5, 0.0)
    return w_plus, float(min(1.0, 2.0 * stats.norm.sf(dev / math.sqrt(var))))


def _rank_sum_counts(doubled, k):
    """dp[s] = number of size-k subsets of ``doubled`` summing to s."""
    total = int(doubled.sum())
    dp = [np.zeros(total + 1, dtype=object) for _ in range(k + 1)]
    dp[0][0] = 1
    for w in doubled:
        w = int(w)
        for j in range(k, 0, -1):
            dp[j][w:] = dp[j][w:] + dp[j - 1][: total + 1 - w]
    return dp[k]


def mann_whitney_u(x, y):
    """Rank-sum statistic ``U`` of ``x`` (pairs with x > y, ties counting half).

    The p-value is exact, by enumerating rank-sum subsets of the pooled
    mid-ranks, when the smaller sample has at most 10 values and the total
    at most 20; otherwise a tie-corrected normal approximation is used.
    """
    a, b = _arr(x), _arr(y)
    nx, ny = a.size, b.size
    if nx < 3 or ny < 3:
        raise InvalidArgument("each sample needs at least three values")
    pooled = np.concatenate([a, b])
    ranks = stats.rankdata(pooled, method="average")
    rx = float(ranks[:nx].sum())
    u = rx - nx * (nx + 1) / 2.0
    N = nx + ny
    if min(nx, ny) <= MW_EXACT_MAX_MIN and N <= MW_EXACT_MAX_TOTAL:
        doubled = np.rint(2 * ranks).astype(int)
        counts = _rank_sum_counts(doubled, nx)
        center = nx * (N + 1)  # doubled mean rank sum
        return u, _two_sided_from_counts(counts, 2 * rx, center)
    mean = nx * ny / 2.0
    _, t = np.unique(pooled, return_counts=True)
    var = nx * ny / 12.0 * ((N + 1) - float(np.sum(t**3 - t)) / (N * (N - 1)))
    if var <= 0:
        return u, 1.0
    dev = max(abs(u - mean) - 0.5, 0.0)
    return u, float(min(1.0, 2.0 * stats.norm.sf(dev / math.sqrt(var))))


def quantile_bins(x, bins):
    x = _arr(x)
    edges = np.quantile(x, np.arange(1, bins) / bins)
    return np.searchsorted(edges, x, side="right")


def chi_square_independence(x, y, bins: int = 2):
    """Pearson chi-square on a quantile-binned ``bins x bins`` table."""
    a, b = _arr(x), _arr(y)
    if a.size != b.size:
        raise LengthMismatch(f"lengths differ ({a.size} vs {b.size})")
    if bins < 2:
        raise InvalidArgument("need at least two bins")
    if a.size < 3 * bins * bins:
        raise InvalidArgument(f"need at least {3 * bins * bins} observations for {bins} bins")
    table = np.zeros((bins, bins))
    np.add.at(table, (quantile_bins(a, bins), quantile_bins(b, bins)), 1.0)
    expected = np.outer(table.sum(axis=1), table.sum(axis=0)) / a.size
    if np.any(expected < 1.0):
        raise SparseCells("an expected cell count is below 1")
    stat = float(np.sum((table - expected) ** 2 / expected))
    return stat, float(stats.chi2.sf(stat, (bins - 1) ** 2))


@dataclass(frozen=True)
class ScreenReport:
    predictor: str
    target: str
    r: float
    tau: float
    rho: float
    tests: dict
    passes: bool
    notes: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "predictor": self.predictor,
            "target": self.target,
            "r": self.r,
            "tau": self.tau,
            "rho": self.rho,
            "tests": {
                k: None if v is None else {"statistic": v[0], "p_value": v[1]} for k, v in self.tests.items()
            },
            "passes": self.passes,
            "notes": dict(self.notes),
        }


def _safe(fn, *args):
    try:
        return fn(*args), None
    except FiscastError as exc:
        return None, f"{type(exc).__name__}: {exc}"


def screen_pair(x, y, predictor="", target="", threshold=STRENGTH_THRESHOLD, alpha=SIGNIFICANCE, bins=2):
    """Strength and significance screen of one predictor against the target.

    ``passes`` requires ``max(|r|, |tau|, |rho|) >= threshold`` and a
    two-sided p-value below ``alpha`` for ``tests['t']``, the t test of zero
    correlation.  The paired t, chi-square, signed-rank and rank-sum tests
    are reported alongside as robustness checks and do not gate.
    """
    r, tau, rho = pearson_r(x, y), kendall_tau_b(x, y), spearman_rho(x, y)
    tests, notes = {}, {}
    for key, fn in (
        ("t", correlation_t_test),
        ("paired_t", paired_t_test),
        ("chi2", lambda a, b: chi_square_independence(a, b, bins)),
        ("wilcoxon", wilcoxon_signed_rank),
        ("mannwhitney", mann_whitney_u),
    ):
        tests[key], why = _safe(fn, x, y)
        if why:
            notes[key] = why
    strong = max(abs(r), abs(tau), abs(rho)) >= threshold
    significant = tests["t"] is not None and tests["t"][1] < alpha
    return ScreenReport(predictor, target, r, tau, rho, tests, bool(strong and significant), notes)


def predictor_screen(
    frame: SeriesFrame,
    target: str,
    predictors,
    threshold: float = STRENGTH_THRESHOLD,
    alpha: float = SIGNIFICANCE,
    bins: int = 2,
):
    """One :class:`ScreenReport` per predictor, plus one for their sum when
    there are several predictors."""
    predictors = list(predictors)
    for name in [target] + predictors:
        if name not in frame:
            raise InvalidArgument(f"column {name!r} not in frame")
    y = frame[target].values
    out = [
        screen_pair(frame[p].values, y, p, target, threshold, alpha, bins) for p in predictors
    ]
    if len(predictors) > 1:
        agg = frame.matrix(predictors).sum(axis=1)
        out.append(screen_pair(agg, y, "+".join(predictors), target, threshold, alpha, bins))
    return out

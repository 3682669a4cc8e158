"""Brute-force reference implementations shared by the unit and acceptance tests."""

import itertools
import math

import numpy as np


def dense_hp(y, lam):
    """Assemble I + lam K'K densely and solve."""
    n = len(y)
    K = np.zeros((n - 2, n))
    for i in range(n - 2):
        K[i, i : i + 3] = (1.0, -2.0, 1.0)
    return np.linalg.solve(np.eye(n) + lam * K.T @ K, y)


def loop_metrics(actual, forecast):
    n = len(actual)
    me = mae = smae = sq = sa = sf = 0.0
    for a, f in zip(actual, forecast):
        e = f - a
        me += e
        mae += abs(e)
        smae += abs(e) / ((abs(a) + abs(f)) / 2.0)
        sq += e * e
        sa += a * a
        sf += f * f
    rmse = math.sqrt(sq / n)
    return {
        "me": me / n,
        "mae": mae / n,
        "smae": smae / n,
        "rmse": rmse,
        "theil_u1": rmse / (math.sqrt(sa / n) + math.sqrt(sf / n)),
    }


def tau_by_pairs(x, y):
    """Kendall tau for tie-free data: (concordant - discordant) / pairs."""
    n = len(x)
    c = d = 0
    for i in range(n):
        for j in range(i + 1, n):
            s = (x[i] - x[j]) * (y[i] - y[j])
            c += s > 0
            d += s < 0
    return (c - d) / (n * (n - 1) / 2)


def rho_by_ranks(x, y):
    """Spearman rho for tie-free data via 1 - 6 sum d^2 / (n (n^2 - 1))."""
    n = len(x)
    rx = {v: i + 1 for i, v in enumerate(sorted(x))}
    ry = {v: i + 1 for i, v in enumerate(sorted(y))}
    d2 = sum((rx[a] - ry[b]) ** 2 for a, b in zip(x, y))
    return 1 - 6 * d2 / (n * (n * n - 1))


def midranks(values):
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        for k in range(i, j + 1):
            ranks[order[k]] = (i + j) / 2 + 1
        i = j + 1
    return ranks


def wilcoxon_enumerated(d):
    """Two-sided p of W+ over all 2^n sign patterns of the non-zero |d| midranks."""
    d = [v for v in d if v != 0]
    r2 = np.rint(2 * np.array(midranks([abs(v) for v in d]))).astype(np.int64)
    n = r2.size
    obs = int(sum(r for r, v in zip(r2, d) if v > 0))
    center2 = int(r2.sum())  # twice the doubled mean
    half = n // 2

    def all_sums(w):
        sums = np.zeros(1, dtype=np.int64)
        for v in w:
            sums = np.concatenate([sums, sums + v])
        return sums

    left, right = all_sums(r2[:half]), all_sums(r2[half:])
    target = abs(2 * obs - center2)
    hits = 0
    for s in left:
        hits += int(np.count_nonzero(np.abs(2 * (s + right) - center2) >= target))
    return obs / 2.0, min(1.0, hits / 2.0**n)


def mann_whitney_enumerated(x, y):
    """Two-sided p of the rank sum over every split of the pooled midranks."""
    pooled = list(x) + list(y)
    r2 = [int(round(2 * r)) for r in midranks(pooled)]
    nx, N = len(x), len(pooled)
    obs = sum(r2[:nx])
    center = nx * (N + 1)
    target = abs(obs - center)
    hits = total = 0
    for combo in itertools.combinations(r2, nx):
        total += 1
        hits += abs(sum(combo) - center) >= target
    u = obs / 2.0 - nx * (nx + 1) / 2.0
    return u, min(1.0, hits / total)

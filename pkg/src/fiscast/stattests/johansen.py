"""Johansen maximum-eigenvalue cointegration test (unrestricted constant)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from ..errors import InvalidArgument, SingularMoment, TooShort
from ..series import SeriesFrame
from . import critical_values as cv

DETERMINISTIC_CASE = "unrestricted constant"
_SINGULAR_RTOL = 1e-10


@dataclass(frozen=True)
class JohansenReport:
    lag_order: int
    eigenvalues: list
    max_eigen_statistics: list
    critical_values_5pct: list
    cointegration_rank: int
    nobs: int
    columns: list
    deterministic: str = DETERMINISTIC_CASE

    def to_dict(self) -> dict:
        return {
            "lag_order": self.lag_order,
            "columns": list(self.columns),
            "eigenvalues": list(self.eigenvalues),
            "max_eigen_statistics": list(self.max_eigen_statistics),
            "critical_values_5pct": list(self.critical_values_5pct),
            "cointegration_rank": self.cointegration_rank,
            "nobs": self.nobs,
            "deterministic": self.deterministic,
        }


def _moment(A, B, T):
    return A.T @ B / T


def _check_pd(S, what):
    w = np.linalg.eigvalsh(S)
    if w[0] <= _SINGULAR_RTOL * max(w[-1], 1e-300):
        raise SingularMoment(f"{what} product-moment matrix is rank deficient")


def johansen_max_eigen(frame: SeriesFrame, lag_order: int = 1, columns=None) -> JohansenReport:
    """Max-eigenvalue statistics for a VAR(``lag_order``) in levels.

    The VECM has ``lag_order - 1`` lagged differences and an unrestricted
    constant.  Statistics are ``-T ln(1 - lambda_i)`` with
    ``T = n - lag_order``; the rank is the number of nulls rejected in
    sequence from rank 0 at the 5% level.
    """
    names = list(columns) if columns is not None else frame.names
    m = len(names)
    if m < 2:
        raise InvalidArgument("Johansen's test needs at least two columns")
    if m > cv.JOHANSEN_MAX_DIM:
        raise InvalidArgument(f"critical values are tabulated for at most {cv.JOHANSEN_MAX_DIM} columns")
    if lag_order < 1:
        raise InvalidArgument("lag_order must be at least 1")
    Y = frame.matrix(names)
    n = Y.shape[0]
    if n < m * lag_order + 8:
        raise TooShort(f"Johansen with {m} columns and lag {lag_order} needs {m * lag_order + 8} years")
    dY = np.diff(Y, axis=0)
    k = lag_order
    T = n - k
    Z0 = dY[k - 1 :]
    Z1 = Y[k - 1 : n - 1]
    Z2 = [np.ones((T, 1))]
    for i in range(1, k):
        Z2.append(dY[k - 1 - i : n - 1 - i])
    Z2 = np.hstack(Z2)
    proj = np.linalg.lstsq(Z2, np.hstack([Z0, Z1]), rcond=None)[0]
    R = np.hstack([Z0, Z1]) - Z2 @ proj
    R0, R1 = R[:, :m], R[:, m:]
    S00 = _moment(R0, R0, T)
    S11 = _moment(R1, R1, T)
    S01 = _moment(R0, R1, T)
    _check_pd(S11, "lagged-level")
    _check_pd(S00, "difference")
    M = S01.T @ np.linalg.solve(S00, S01)
    M = 0.5 * (M + M.T)
    lam = linalg.eigh(M, S11, eigvals_only=True)[::-1]
    lam = np.clip(lam, 0.0, 1.0 - 1e-15)
    stats = [-T * math.log(1.0 - float(x)) for x in lam]
    crits = [cv.johansen_max_eigen(m - r) for r in range(m)]
    rank = 0
    for r in range(m):
        if stats[r] > crits[r]:
            rank += 1
        else:
            break
    return JohansenReport(
        lag_order=k,
        eigenvalues=[float(x) for x in lam],
        max_eigen_statistics=stats,
        critical_values_5pct=crits,
        cointegration_rank=rank,
        nobs=T,
        columns=names,
    )

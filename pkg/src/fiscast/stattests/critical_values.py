"""Embedded critical-value tables.

Dickey-Fuller tau quantiles use MacKinnon (2010) response surfaces
``b0 + b1/T + b2/T^2 + b3/T^3`` evaluated at the effective sample size.
DF-GLS with a trend uses the Elliott-Rothenberg-Stock table, linearly
interpolated in T and clamped at its smallest tabulated size.  KPSS values are
the asymptotic ones.  Johansen maximum-eigenvalue values are Osterwald-Lenum
(1992) for a VAR with an unrestricted constant.
"""

import numpy as np

from ..errors import InvalidArgument

LEVELS = ("1%", "5%", "10%")

# spec -> rows for 1%, 5%, 10%
_MACKINNON_TAU = {
    "none": (
        (-2.56574, -2.2358, -3.627, 0.0),
        (-1.94100, -0.2686, -3.365, 31.223),
        (-1.61682, 0.2656, -2.714, 25.364),
    ),
    "constant": (
        (-3.43035, -6.5393, -16.786, -79.433),
        (-2.86154, -2.8903, -4.234, -40.040),
        (-2.56677, -1.5384, -2.809, 0.0),
    ),
    "trend": (
        (-3.95877, -9.0531, -28.428, -134.155),
        (-3.41049, -4.3904, -9.036, -45.374),
        (-3.12705, -2.5856, -3.925, -22.380),
    ),
}

KPSS_CRITICAL = {
    "constant": {"10%": 0.347, "5%": 0.463, "1%": 0.739},
    "trend": {"10%": 0.119, "5%": 0.146, "1%": 0.216},
}

# ERS DF-GLS (trend case): sample size -> (1%, 5%, 10%); inf uses 1e9.
_ERS_TREND = (
    (50, (-3.77, -3.19, -2.89)),
    (100, (-3.58, -3.03, -2.74)),
    (200, (-3.46, -2.93, -2.64)),
    (1e9, (-3.48, -2.89, -2.57)),
)

# Osterwald-Lenum, lambda-max, unrestricted constant; index = n - r - 1.
_OL_MAX_EIGEN = {
    "10%": (2.69, 12.07, 18.60, 24.73, 30.90),
    "5%": (3.76, 14.07, 20.97, 27.07, 33.46),
    "1%": (6.65, 18.63, 25.52, 32.24, 38.77),
}
JOHANSEN_MAX_DIM = len(_OL_MAX_EIGEN["5%"])


def _check_spec(spec):
    if spec not in _MACKINNON_TAU:
        raise InvalidArgument(f"unknown deterministic spec {spec!r}")


def dickey_fuller(spec: str, nobs: int) -> dict:
    _check_spec(spec)
    T = float(nobs)
    out = {}
    for level, (b0, b1, b2, b3) in zip(LEVELS, _MACKINNON_TAU[spec]):
        out[level] = b0 + b1 / T + b2 / T**2 + b3 / T**3
    return out


def kpss(spec: str) -> dict:
    if spec not in KPSS_CRITICAL:
        raise InvalidArgument(f"KPSS supports 'constant' or 'trend', not {spec!r}")
    return {k: KPSS_CRITICAL[spec][k] for k in LEVELS}


def dfgls(spec: str, nobs: int) -> dict:
    if spec == "constant":
        return dickey_fuller("none", nobs)
    if spec != "trend":
        raise InvalidArgument(f"DF-GLS supports 'constant' or 'trend', not {spec!r}")
    sizes = np.array([row[0] for row in _ERS_TREND])
    vals = np.array([row[1] for row in _ERS_TREND])
    T = min(max(float(nobs), sizes[0]), sizes[-1])
    return {lvl: float(np.interp(T, sizes, vals[:, i])) for i, lvl in enumerate(LEVELS)}


def johansen_max_eigen(n_minus_r: int, level: str = "5%") -> float:
    if not 1 <= n_minus_r <= JOHANSEN_MAX_DIM:
        raise InvalidArgument(f"no Johansen critical value for n - r = {n_minus_r}")
    return _OL_MAX_EIGEN[level][n_minus_r - 1]

"""ARMA error-process machinery shared by the BN filter and RegARIMA.

Conventions: AR polynomial ``1 - phi_1 z - ... - phi_p z^p``, MA polynomial
``1 + theta_1 z + ... + theta_q z^q``.  Estimation is by conditional sum of
squares (CSS): the first ``n_cond`` observations are conditioned on and
pre-sample innovations are set to zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, signal

from .errors import NonConvergence, TooShort

#: Roots are kept at least this far outside the unit circle.
ROOT_MARGIN = 1e-3
#: Simplex convergence tolerance on the (standardised) CSS objective.
CSS_FATOL = 1e-8
CSS_XATOL = 1e-8


def _poly_roots(coefs_ascending):
    c = np.trim_zeros(np.asarray(coefs_ascending, dtype=float), "b")
    if c.size <= 1:
        return np.empty(0, dtype=complex)
    return np.roots(c[::-1])


def _reflect(lag_coefs, sign):
    """Map a lag polynomial's roots outside the unit circle.

    Roots inside (or within ``ROOT_MARGIN`` of) the unit circle are replaced
    by their conjugate reciprocals, then pushed out to radius
    ``1 + ROOT_MARGIN`` if still too close.  Coefficients whose roots are
    already admissible are returned unchanged.
    """
    lag_coefs = np.asarray(lag_coefs, dtype=float)
    if lag_coefs.size == 0:
        return lag_coefs
    poly = np.concatenate([[1.0], sign * lag_coefs])
    roots = _poly_roots(poly)
    limit = 1.0 + ROOT_MARGIN
    if roots.size == 0 or np.all(np.abs(roots) >= limit):
        return lag_coefs
    fixed = []
    for r in roots:
        mod = abs(r)
        if mod < 1e-12:
            r, mod = complex(1e12), 1e12
        elif mod < 1.0:
            r = 1.0 / np.conj(r)
            mod = abs(r)
        if mod < limit:
            r = r * (limit / mod)
        fixed.append(r)
    # Rebuild 1 + c_1 z + ... from the roots: prod (1 - z / r_i).
    monic = np.poly(np.array(fixed))[::-1]
    asc = np.real(monic / monic[0])
    out = np.zeros_like(lag_coefs)
    out[: asc.size - 1] = sign * asc[1:]
    return out


def reflect_ar(phi):
    return _reflect(phi, -1.0)


def reflect_ma(theta):
    return _reflect(theta, 1.0)


def is_stationary(phi) -> bool:
    roots = _poly_roots(np.concatenate([[1.0], -np.asarray(phi, dtype=float)]))
    return bool(np.all(np.abs(roots) > 1.0))


def is_invertible(theta) -> bool:
    roots = _poly_roots(np.concatenate([[1.0], np.asarray(theta, dtype=float)]))
    return bool(np.all(np.abs(roots) > 1.0))


def min_root_modulus(phi, theta) -> float:
    """Smallest modulus over the AR and MA polynomial roots (inf if none)."""
    mods = [np.abs(_poly_roots(np.concatenate([[1.0], -np.asarray(phi, dtype=float)])))]
    mods.append(np.abs(_poly_roots(np.concatenate([[1.0], np.asarray(theta, dtype=float)]))))
    allm = np.concatenate(mods)
    return float(allm.min()) if allm.size else math.inf


def css_residuals(w, phi, theta, n_cond):
    """Innovations of the CSS recursion; entries before ``n_cond`` are zero."""
    w = np.asarray(w, dtype=float)
    phi = np.asarray(phi, dtype=float)
    theta = np.asarray(theta, dtype=float)
    n = w.size
    a = w[n_cond:].copy()
    for i, ph in enumerate(phi, start=1):
        a -= ph * w[n_cond - i : n - i]
    e = np.zeros(n)
    e[n_cond:] = signal.lfilter([1.0], np.concatenate([[1.0], theta]), a)
    return e


def _lagmat(x, lags, first):
    return np.column_stack([x[first - i : x.size - i] for i in range(1, lags + 1)])


def hannan_rissanen(w, p, q):
    """Two-stage long-AR start values for an ARMA(p, q) fit."""
    w = np.asarray(w, dtype=float)
    n = w.size
    if p == 0 and q == 0:
        return np.zeros(0), np.zeros(0)
    zeros = np.zeros(p), np.zeros(q)
    if q == 0:
        if n - p < p + 2:
            return zeros
        X = _lagmat(w, p, p)
        coef = np.linalg.lstsq(X, w[p:], rcond=None)[0]
        return reflect_ar(coef), np.zeros(0)
    m = max(p, q) + 2
    m = max(m, min(int(math.ceil(math.log(n) ** 1.5)), n // 4))
    first = m + q
    if n - first < p + q + 2:
        m = max(p, q) + 1
        first = m + q
        if n - first < p + q + 2:
            return zeros
    X = _lagmat(w, m, m)
    ar_long = np.linalg.lstsq(X, w[m:], rcond=None)[0]
    ehat = np.zeros(n)
    ehat[m:] = w[m:] - X @ ar_long
    cols = []
    if p:
        cols.append(_lagmat(w, p, first))
    cols.append(_lagmat(ehat, q, first))
    Z = np.column_stack(cols)
    coef = np.linalg.lstsq(Z, w[first:], rcond=None)[0]
    return reflect_ar(coef[:p]), reflect_ma(coef[p:])


@dataclass(frozen=True)
class ArmaFit:
    phi: np.ndarray
    theta: np.ndarray
    sigma2: float
    css: float
    n_eff: int
    n_cond: int
    loglik: float
    residuals: np.ndarray
    converged: bool
    evaluations: int

    @property
    def order(self):
        return self.phi.size, self.theta.size


def css_loglik(css, n_eff):
    sigma2 = css / n_eff
    if sigma2 <= 0:
        return math.inf
    return -0.5 * n_eff * (math.log(2.0 * math.pi * sigma2) + 1.0)


def fit_css(w, p, q, n_cond=None, start=None) -> ArmaFit:
    """Fit a zero-mean ARMA(p, q) to ``w`` by conditional sum of squares.

    Start values come from :func:`hannan_rissanen` unless ``start`` is
    given.  The objective is minimised with the Nelder-Mead simplex on the
    series scaled to unit variance; parameters are reflected into the
    stationary and invertible region before every evaluation.
    """
    w = np.asarray(w, dtype=float)
    n_cond = p if n_cond is None else n_cond
    if n_cond < p:
        raise ValueError("n_cond must be at least p")
    n_eff = w.size - n_cond
    if n_eff < p + q + 1:
        raise TooShort(f"ARMA({p},{q}) needs more than {p + q + n_cond} observations")
    scale = float(np.sqrt(np.mean(w**2)))
    if scale == 0.0:
        scale = 1.0
    ws = w / scale

    def unpack(x):
        return reflect_ar(x[:p]), reflect_ma(x[p:])

    def objective(x):
        ph, th = unpack(x)
        e = css_residuals(ws, ph, th, n_cond)
        return float(np.dot(e[n_cond:], e[n_cond:]))

    converged, nfev = True, 1
    if p + q == 0:
        phi, theta = np.zeros(0), np.zeros(0)
    else:
        if start is None:
            x0 = np.concatenate(hannan_rissanen(ws, p, q))
        else:
            x0 = np.concatenate([reflect_ar(start[0]), reflect_ma(start[1])])
        dim = p + q
        # Nelder-Mead's default simplex is degenerate at a zero start.
        simplex = np.vstack([x0] + [x0 + 0.1 * np.eye(dim)[i] for i in range(dim)])
        res = optimize.minimize(
            objective,
            x0,
            method="Nelder-Mead",
            options={
                "fatol": CSS_FATOL,
                "xatol": CSS_XATOL,
                "maxiter": 2000 * dim,
                "maxfev": 4000 * dim,
                "initial_simplex": simplex,
            },
        )
        converged, nfev = bool(res.success), int(res.nfev)
        phi, theta = unpack(res.x)
    e = css_residuals(w, phi, theta, n_cond)
    css = float(np.dot(e[n_cond:], e[n_cond:]))
    return ArmaFit(
        phi=phi,
        theta=theta,
        sigma2=css / n_eff,
        css=css,
        n_eff=n_eff,
        n_cond=n_cond,
        loglik=css_loglik(css, n_eff),
        residuals=e,
        converged=converged,
        evaluations=nfev,
    )


def psi_weights(phi, theta, n):
    """First ``n`` MA(infinity) weights, starting with ``psi_0 = 1``."""
    impulse = np.zeros(n)
    impulse[0] = 1.0
    return signal.lfilter(
        np.concatenate([[1.0], theta]), np.concatenate([[1.0], -np.asarray(phi, dtype=float)]), impulse
    )


def autocovariances(phi, theta, sigma2, nlags):
    """Exact autocovariances ``gamma(0..nlags)`` of a stationary ARMA."""
    phi = np.asarray(phi, dtype=float)
    theta = np.asarray(theta, dtype=float)
    p, q = phi.size, theta.size
    th = np.concatenate([[1.0], theta])
    psi = psi_weights(phi, theta, q + 1)

    def rhs(k):
        return sigma2 * sum(th[j] * psi[j - k] for j in range(k, q + 1))

    A = np.eye(p + 1)
    b = np.array([rhs(k) for k in range(p + 1)])
    for k in range(p + 1):
        for i in range(1, p + 1):
            A[k, abs(k - i)] -= phi[i - 1]
    gamma = np.zeros(max(nlags, p) + 1)
    gamma[: p + 1] = np.linalg.solve(A, b)
    for k in range(p + 1, gamma.size):
        gamma[k] = sum(phi[i - 1] * gamma[k - i] for i in range(1, p + 1)) + (rhs(k) if k <= q else 0.0)
    return gamma[: nlags + 1]


def forecast(w, e, phi, theta, horizon):
    """Recursive h-step forecasts of ``w`` given its history and innovations."""
    phi = np.asarray(phi, dtype=float)
    theta = np.asarray(theta, dtype=float)
    p, q = phi.size, theta.size
    wh = list(np.asarray(w, dtype=float))
    eh = list(np.asarray(e, dtype=float)) + [0.0] * horizon
    n = len(wh)
    out = np.empty(horizon)
    for h in range(horizon):
        t = n + h
        val = sum(phi[i - 1] * wh[t - i] for i in range(1, p + 1) if t - i >= 0)
        val += sum(theta[j - 1] * eh[t - j] for j in range(1, q + 1) if t - j >= 0)
        wh.append(val)
        out[h] = val
    return out


def state_vectors(w, e, phi, theta):
    """Harvey-form state ``alpha_t`` for every t, built from the histories.

    ``alpha_t[0] = w_t`` and ``alpha_t[k] = sum_{i>k} phi_i w_{t+k-i}
    + sum_{j>=k} theta_j e_{t+k-j}``; pre-sample values count as zero.
    """
    w = np.asarray(w, dtype=float)
    e = np.asarray(e, dtype=float)
    p, q = len(phi), len(theta)
    r = max(p, q + 1)
    ph = np.zeros(r)
    ph[:p] = phi
    th = np.zeros(r)
    th[:q] = theta
    n = w.size
    alpha = np.zeros((n, r))
    alpha[:, 0] = w
    for t in range(n):
        for k in range(1, r):
            acc = 0.0
            for i in range(k + 1, r + 1):
                s = t + k - i
                if s >= 0:
                    acc += ph[i - 1] * w[s]
            for j in range(k, r):
                s = t + k - j
                if s >= 0:
                    acc += th[j - 1] * e[s]
            alpha[t, k] = acc
    return alpha


def transition_matrix(phi, theta):
    p, q = len(phi), len(theta)
    r = max(p, q + 1)
    F = np.zeros((r, r))
    F[:p, 0] = phi
    F[: r - 1, 1:] = np.eye(r - 1)
    return F


def cumulative_forecast_weights(phi, theta):
    """Row vector ``c`` with ``sum_{h>=1} E_t w_{t+h} = c @ alpha_t``."""
    F = transition_matrix(phi, theta)
    r = F.shape[0]
    try:
        M = F @ np.linalg.inv(np.eye(r) - F)
    except np.linalg.LinAlgError as exc:
        raise NonConvergence("AR polynomial has a unit root") from exc
    return M[0]

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fiscast import arma


def simulate(phi, theta, n, seed, burn=200):
    rng = np.random.default_rng(seed)
    e = rng.standard_normal(n + burn)
    w = np.zeros_like(e)
    for t in range(e.size):
        w[t] = e[t]
        w[t] += sum(phi[i] * w[t - 1 - i] for i in range(len(phi)) if t - 1 - i >= 0)
        w[t] += sum(theta[j] * e[t - 1 - j] for j in range(len(theta)) if t - 1 - j >= 0)
    return w[burn:]


def test_reflection_lands_inside_region():
    assert arma.is_stationary(arma.reflect_ar([1.5]))
    assert arma.is_invertible(arma.reflect_ma([-2.0]))
    np.testing.assert_allclose(arma.reflect_ar([0.5]), [0.5])


def test_css_residuals_loop_oracle():
    rng = np.random.default_rng(0)
    w = rng.standard_normal(30)
    phi, theta = [0.4, -0.2], [0.3]
    e = arma.css_residuals(w, phi, theta, 2)
    ref = np.zeros(30)
    for t in range(2, 30):
        ref[t] = w[t] - phi[0] * w[t - 1] - phi[1] * w[t - 2] - theta[0] * ref[t - 1]
    np.testing.assert_allclose(e, ref, atol=1e-12)


def test_fit_css_recovers_ar1():
    fit = arma.fit_css(simulate([0.6], [], 400, 4), 1, 0)
    assert abs(fit.phi[0] - 0.6) < 0.08
    assert fit.converged


def test_fit_css_recovers_ma1():
    fit = arma.fit_css(simulate([], [0.5], 400, 5), 0, 1)
    assert abs(fit.theta[0] - 0.5) < 0.1


def test_fit_css_too_short():
    with pytest.raises(Exception):
        arma.fit_css(np.ones(3), 2, 2)


@pytest.mark.parametrize("phi,theta", [([0.5], []), ([], [0.4]), ([0.6, -0.3], [0.2]), ([0.3], [-0.5, 0.2])])
def test_autocovariances_match_psi_sums(phi, theta):
    psi = arma.psi_weights(phi, theta, 3000)
    exact = arma.autocovariances(phi, theta, 2.0, 5)
    approx = [2.0 * float(psi[: 3000 - k] @ psi[k:]) for k in range(6)]
    np.testing.assert_allclose(exact, approx, atol=1e-10)


def test_forecast_recursion_oracle():
    w = simulate([0.5], [0.3], 50, 8)
    e = arma.css_residuals(w, [0.5], [0.3], 1)
    fc = arma.forecast(w, e, [0.5], [0.3], 3)
    f1 = 0.5 * w[-1] + 0.3 * e[-1]
    np.testing.assert_allclose(fc, [f1, 0.5 * f1, 0.25 * f1], atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.floats(-0.95, 0.95), st.floats(-0.9, 0.9))
def test_bn_weights_match_truncated_sum(phi, theta):
    # c @ alpha_t equals the sum of h-step forecasts for an ARMA(1,1)
    rng = np.random.default_rng(0)
    w, e = rng.standard_normal(12), rng.standard_normal(12)
    alpha = arma.state_vectors(w, e, [phi], [theta])[-1]
    c = arma.cumulative_forecast_weights([phi], [theta])
    fc = arma.forecast(w, e, [phi], [theta], 4000)
    assert c @ alpha == pytest.approx(fc.sum(), abs=1e-8)

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from sirbridge.meanfield import (
    MeanFieldParams, NoGrowthError, confound, dilation_pair_gap, early_time_approximation,
    fit_exponential, indistinguishability_gap, integrate, time_dilation_check,
)

from oracles import meanfield_ivp

EXAMPLE = MeanFieldParams.from_delta_gamma(2.0, 1.0, 0.01, 0.01)


def fit_curve(params, t_end=0.3, stride=30):
    curve = integrate(params, t_end)
    idx = np.arange(0, curve.t.size, stride)
    return fit_exponential(curve.t[idx], curve.observed[idx])


class TestParams:
    def test_rejects_bad_init(self):
        with pytest.raises(ValueError):
            MeanFieldParams(1, 1, (0.5, 0.4, 0.0))
        with pytest.raises(ValueError):
            MeanFieldParams(1, 1, (1.1, -0.1, 0.0))

    def test_r0(self):
        assert EXAMPLE.r0 == 2.0


class TestIntegrate:
    def test_no_infection_closed_form(self):
        p = MeanFieldParams(0.0, 0.7, (0.6, 0.3, 0.1))
        c = integrate(p, 3.0, 1e-3)
        iota = 0.3 * np.exp(-0.7 * c.t)
        np.testing.assert_allclose(c.iota, iota, atol=1e-8)
        np.testing.assert_allclose(c.rho, 1 - 0.6 - iota, atol=1e-8)

    def test_no_recovery_logistic(self):
        p = MeanFieldParams(1.5, 0.0, (0.95, 0.05, 0.0))
        c = integrate(p, 4.0, 1e-3)
        growth = 0.05 * np.exp(1.5 * c.t)
        np.testing.assert_allclose(c.iota, growth / (0.95 + growth), atol=1e-10)
        np.testing.assert_allclose(c.sigma + c.iota, 1.0, atol=1e-12)

    def test_matches_ivp_solver(self):
        c = integrate(EXAMPLE, 8.0, 1e-3)
        ref = meanfield_ivp(2.0, 1.0, EXAMPLE.init, c.t)
        for got, want in zip((c.sigma, c.iota, c.rho), ref):
            np.testing.assert_allclose(got, want, atol=1e-9)

    @settings(max_examples=30, deadline=None)
    @given(st.floats(0, 6), st.floats(0, 3), st.floats(0, 0.5), st.floats(0, 0.5))
    def test_conservation_and_monotonicity(self, beta, mu, delta, gamma):
        c = integrate(MeanFieldParams.from_delta_gamma(beta, mu, delta, gamma), 5.0, 1e-3)
        assert np.max(np.abs(c.sigma + c.iota + c.rho - 1)) <= 1e-10
        assert np.all(np.diff(c.sigma) <= 1e-15)
        assert np.all(np.diff(c.rho) >= -1e-15)

    def test_early_time_approximation(self):
        a, b, c = early_time_approximation(EXAMPLE)
        assert (a, b, c) == pytest.approx((0.0, 0.02, 1.0), abs=1e-15)
        curve = integrate(EXAMPLE, 0.5)
        approx = a + b * np.exp(c * curve.t)
        assert np.max(np.abs(curve.observed - approx)) <= 5e-3

    @pytest.mark.parametrize("dt,t_end", [(0.0, 1.0), (1e-3, 0.0)])
    def test_bad_grid(self, dt, t_end):
        with pytest.raises(ValueError):
            integrate(EXAMPLE, t_end, dt)


class TestFit:
    def test_noiseless(self):
        t = np.linspace(0, 0.5, 50)
        a, b, c = fit_exponential(t, 0.02 * np.exp(t))
        assert (a, b, c) == pytest.approx((0.0, 0.02, 1.0), abs=1e-6)

    @given(st.floats(-1, 1), st.floats(0.01, 2), st.floats(0.1, 5))
    def test_noiseless_recovery(self, a, b, c):
        t = np.linspace(0, 1, 40)
        fa, fb, fc = fit_exponential(t, a + b * np.exp(c * t))
        assert fc == pytest.approx(c, rel=1e-4)
        assert fb == pytest.approx(b, rel=1e-3)

    def test_constant(self):
        with pytest.raises(NoGrowthError):
            fit_exponential(np.linspace(0, 1, 20), np.full(20, 0.5))

    def test_decaying(self):
        t = np.linspace(0, 1, 20)
        with pytest.raises(NoGrowthError):
            fit_exponential(t, 1 - 0.1 * np.exp(t))

    def test_too_few(self):
        with pytest.raises(ValueError):
            fit_exponential([0, 1, 2], [1, 2, 3])

    @pytest.mark.xfail(strict=True, reason="at delta=gamma=0.01 the susceptible fraction is "
                       "0.98, so the fitted rate on [0, 0.3] is 0.930, not within 0.05 of 1")
    def test_example_rate_is_beta_minus_mu(self):
        assert fit_curve(EXAMPLE)[2] == pytest.approx(1.0, abs=0.05)

    def test_example_rate_is_initial_growth_rate(self):
        # the observable grows at beta*sigma0 - mu = 0.96 initially
        _, _, c = fit_curve(EXAMPLE)
        assert c == pytest.approx(2.0 * 0.98 - 1.0, abs=0.05)
        assert c == pytest.approx(0.9302522144122379, rel=1e-9)


class TestConfound:
    def test_examples(self):
        assert confound(0, 0.02, 1, 2) == pytest.approx((1, 0.01, 0.01))
        assert confound(0, 0.02, 1, 3) == pytest.approx((2, 0.02 / 3, 0.04 / 3))
        assert confound(0.3, 0.1, 2, 2) == pytest.approx((0, 0.1, 0.3))

    def test_invalid(self):
        with pytest.raises(ValueError):
            confound(0, 0.02, 1, 0.5)

    @given(st.floats(-0.1, 0.1), st.floats(0.001, 0.1), st.floats(0.1, 3), st.floats(0, 3))
    def test_reproduces_early_approximation(self, a, b, c, extra):
        beta = c + extra
        mu, delta, gamma = confound(a, b, c, beta)
        assume(delta + gamma <= 1 and gamma >= 0)
        approx = early_time_approximation(MeanFieldParams.from_delta_gamma(beta, mu, delta, gamma))
        assert approx == pytest.approx((a, b, c), abs=1e-12)

    @pytest.mark.xfail(strict=True, reason="the mu recovered at delta=gamma=0.01 is 1.070")
    def test_round_trip_example(self):
        mu, delta, gamma = confound(*fit_curve(EXAMPLE), 2.0)
        assert (mu, delta, gamma) == pytest.approx((1.0, 0.01, 0.01), rel=0.05)

    @settings(max_examples=20, deadline=None)
    @given(st.floats(1.5, 3), st.floats(0.5, 1), st.floats(1e-4, 1e-3), st.floats(1e-4, 1e-3))
    def test_round_trip(self, beta, mu, delta, gamma):
        params = MeanFieldParams.from_delta_gamma(beta, mu, delta, gamma)
        got = confound(*fit_curve(params), beta)
        assert got == pytest.approx((mu, delta, gamma), rel=0.05)


class TestIndistinguishability:
    def pair(self):
        mu, delta, gamma = confound(0.0, 0.02, 1.0, 3.0)
        return EXAMPLE, MeanFieldParams.from_delta_gamma(3.0, mu, delta, gamma)

    def test_early_gap_small(self):
        assert indistinguishability_gap(*self.pair(), 0.3) <= 5e-3

    def test_late_gap_large(self):
        assert indistinguishability_gap(*self.pair(), 5.0, 1e-3) > 5e-2

    def test_identical(self):
        assert indistinguishability_gap(EXAMPLE, EXAMPLE, 1.0, 1e-3) == 0.0


class TestDilation:
    def test_unit_recovery(self):
        assert time_dilation_check(EXAMPLE, 5.0, 1e-3) <= 1e-8

    def test_slow_recovery(self):
        p = MeanFieldParams.from_delta_gamma(2.0, 0.5, 0.01, 0.01)
        assert time_dilation_check(p, 10.0, 1e-3) <= 1e-6

    def test_equal_r0_pair(self):
        p1 = MeanFieldParams.from_delta_gamma(3.0, 2.0, 0.01, 0.01)
        p2 = MeanFieldParams.from_delta_gamma(1.5, 1.0, 0.01, 0.01)
        assert dilation_pair_gap(p1, p2, 5.0, 1e-3) <= 1e-6

    def test_pair_needs_equal_r0(self):
        with pytest.raises(ValueError):
            dilation_pair_gap(EXAMPLE, MeanFieldParams.from_delta_gamma(3.0, 1.0, 0.01, 0.01), 1.0)

    def test_needs_recovery(self):
        with pytest.raises(ValueError):
            time_dilation_check(MeanFieldParams(1.0, 0.0, (0.9, 0.1, 0.0)), 1.0)

    def test_dilation_against_ivp(self):
        # independent route: solve the dilated system directly and compare on
        # matching time points
        p = MeanFieldParams.from_delta_gamma(2.4, 0.8, 0.02, 0.0)
        c = integrate(p, 6.0, 1e-3)
        s = 0.8 * c.t
        ref = meanfield_ivp(3.0, 1.0, p.init, s)
        np.testing.assert_allclose(c.iota, ref[1], atol=1e-9)

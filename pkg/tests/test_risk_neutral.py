import math

import numpy as np
import pytest
from scipy.integrate import quad

from rainbow_pricer import Component, GaussianMixture, calibrate_sdf, risk_neutralize
from rainbow_pricer.risk_neutral import (
    BlackScholesQuote,
    bs_call_relative,
    mixture_call_relative,
    put_from_parity,
    rn_call_relative,
)


def single(mu, sigma):
    return GaussianMixture((Component(1.0, mu, sigma),))


class TestCalibrateSdf:
    @pytest.mark.parametrize("mu,sigma,r", [(0.0005, 0.02, 0.025), (-0.01, 0.3, 0.0), (0.04, 0.1, -0.01)])
    def test_single_component_closed_form(self, mu, sigma, r):
        sdf = calibrate_sdf(single(mu, sigma), r)
        assert sdf.alpha == pytest.approx((r - mu - 0.5 * sigma**2) / sigma**2, abs=1e-10)

    def test_already_risk_neutral(self):
        sigma = 0.12
        r = 0.03
        m = single(r - 0.5 * sigma**2, sigma)
        sdf = calibrate_sdf(m, r)
        assert sdf.alpha == pytest.approx(0.0, abs=1e-12)
        assert sdf.beta == pytest.approx(-r, abs=1e-12)

    @pytest.mark.parametrize("r", [0.0, 0.01, 0.025, 0.1])
    def test_identities(self, asset1_mixture, r):
        sdf = calibrate_sdf(asset1_mixture, r)
        log_m = asset1_mixture.log_mgf
        # E[M] = e^{beta} mgf(alpha), E[M e^X] = e^{beta} mgf(alpha+1)
        e_m = math.exp(sdf.beta + log_m(sdf.alpha))
        e_mx = math.exp(sdf.beta + log_m(sdf.alpha + 1.0))
        assert abs(e_m - math.exp(-r)) <= 1e-10
        assert abs(e_mx - 1.0) <= 1e-10

    def test_martingale_identity(self, asset2_mixture, rate):
        sdf = calibrate_sdf(asset2_mixture, rate)
        rn = risk_neutralize(asset2_mixture, sdf.alpha, rate)
        fwd = sum(w * math.exp(mu + 0.5 * s * s) for w, mu, s in zip(rn.weights, rn.means, rn.sigmas))
        assert abs(fwd - math.exp(rate)) <= 1e-10

    def test_solved_alpha_documented_vs_printed(self, asset1_mixture, asset2_mixture, rate):
        # the printed loadings are not reproduced by the pricing equation
        # for the printed mixtures; the solver's answers are stable values
        a1 = calibrate_sdf(asset1_mixture, rate).alpha
        a2 = calibrate_sdf(asset2_mixture, rate).alpha
        assert a1 == pytest.approx(27.73510392, abs=1e-6)
        assert a2 == pytest.approx(50.20473246, abs=1e-6)


class TestRiskNeutralize:
    def test_alpha_zero_is_identity(self, asset1_mixture):
        rn = risk_neutralize(asset1_mixture, 0.0, 0.0)
        assert np.allclose(rn.weights, asset1_mixture.weights, atol=1e-14)
        assert np.allclose(rn.means, asset1_mixture.means, atol=1e-14)
        assert np.allclose(rn.sigmas, asset1_mixture.sigmas, atol=1e-14)

    def test_weights_vs_quadrature(self, asset1_mixture, rate):
        alpha = calibrate_sdf(asset1_mixture, rate).alpha
        rn = risk_neutralize(asset1_mixture, alpha, rate)
        mgf = asset1_mixture.mgf(alpha)
        for i, c in enumerate(asset1_mixture.components):
            num = quad(
                lambda x, c=c: c.p
                * math.exp(-0.5 * ((x - c.mu) / c.sigma) ** 2)
                / (c.sigma * math.sqrt(2 * math.pi))
                * math.exp(alpha * x),
                -1.0,
                1.0,
                epsabs=1e-14,
                limit=300,
            )[0]
            assert rn.weights[i] == pytest.approx(num / mgf, rel=1e-9)

    def test_equal_sigma_weights_proportional_to_exp(self):
        m = GaussianMixture((Component(0.5, -0.01, 0.02), Component(0.5, 0.01, 0.02)))
        alpha = 3.0
        rn = risk_neutralize(m, alpha, 0.0)
        # common Gaussian factor cancels, leaving v_i proportional to e^{mu_i alpha}
        expect = np.array([math.exp(-0.01 * alpha), math.exp(0.01 * alpha)])
        expect /= expect.sum()
        assert np.allclose(rn.weights, expect, atol=1e-14)

    def test_means_shift_sigmas_fixed(self, asset2_mixture):
        rn = risk_neutralize(asset2_mixture, 10.0, 0.025)
        for c, mu, s in zip(asset2_mixture.components, rn.means, rn.sigmas):
            assert mu == pytest.approx(c.mu + 10.0 * c.sigma**2, abs=1e-14)
            assert s == c.sigma

    def test_weights_normalized(self, asset1_mixture):
        rn = risk_neutralize(asset1_mixture, 36.1209027, 0.025)
        assert sum(rn.weights) == pytest.approx(1.0, abs=1e-14)

    def test_cdf_alpha_zero_equals_physical(self, asset1_mixture):
        rn = risk_neutralize(asset1_mixture, 0.0, 0.0)
        xs = np.linspace(-0.2, 0.2, 41)
        assert np.allclose(rn.cdf(xs), asset1_mixture.cdf(xs), atol=1e-14)

    def test_rn_cdf_matches_put_strike_derivative(self, asset1_mixture, rate):
        # e^r d(put)/d(kappa) is the risk-neutral CDF at ln(kappa)
        sdf = calibrate_sdf(asset1_mixture, rate)
        rn = risk_neutralize(asset1_mixture, sdf.alpha, rate)
        kappa, h = 0.98, 1e-5

        def put(k):
            return put_from_parity(mixture_call_relative(asset1_mixture, sdf, k), k, rate, 1.0)

        deriv = (put(kappa + h) - put(kappa - h)) / (2.0 * h)
        assert math.exp(rate) * deriv == pytest.approx(rn.cdf(math.log(kappa)), abs=1e-5)


class TestBlackScholes:
    def test_deep_itm_limit(self):
        q = BlackScholesQuote.make(sigma2=0.04, kappa=1e-12, r=0.0, tau=1.0)
        assert bs_call_relative(q) == pytest.approx(1.0, abs=1e-9)

    def test_atm_reference_value(self):
        q = BlackScholesQuote.make(sigma2=0.04, kappa=1.0, r=0.0, tau=1.0)
        from scipy.special import ndtr

        assert bs_call_relative(q) == pytest.approx(2.0 * ndtr(0.1) - 1.0, abs=1e-12)
        assert bs_call_relative(q) == pytest.approx(0.0796557, abs=1e-7)

    def test_zero_vol_limit(self):
        q = BlackScholesQuote.make(sigma2=1e-14, kappa=0.9, r=0.02, tau=1.0)
        assert bs_call_relative(q) == pytest.approx(1.0 - 0.9 * math.exp(-0.02), abs=1e-9)

    def test_monotone_in_strike(self):
        kappas = np.linspace(0.5, 2.0, 40)
        prices = [
            bs_call_relative(BlackScholesQuote.make(0.09, k, 0.01, 1.0)) for k in kappas
        ]
        assert all(a >= b - 1e-15 for a, b in zip(prices, prices[1:]))


class TestMixtureCall:
    def test_single_regime_reduces_to_bs(self):
        sigma = 0.2
        r = 0.03
        m = single(r - 0.5 * sigma**2, sigma)  # gamma = 1 at alpha = 0
        sdf = calibrate_sdf(m, r)
        kappa = 1.1
        got = mixture_call_relative(m, sdf, kappa)
        want = bs_call_relative(BlackScholesQuote.make(sigma**2, kappa, r, 1.0))
        assert got == pytest.approx(want, abs=1e-12)

    def test_against_quadrature(self, asset1_mixture, rate):
        sdf = calibrate_sdf(asset1_mixture, rate)
        rn = risk_neutralize(asset1_mixture, sdf.alpha, rate)
        kappa = 0.9
        oracle = math.exp(-rate) * quad(
            lambda x: (math.exp(x) - kappa) * rn.as_mixture().pdf(x),
            math.log(kappa),
            1.0,
            epsabs=1e-13,
            limit=300,
        )[0]
        assert mixture_call_relative(asset1_mixture, sdf, kappa) == pytest.approx(oracle, rel=1e-8)

    def test_far_otm_vanishes_monotonically(self, asset2_mixture, rate):
        # strikes in relative terms; the margin sd is ~0.016 so 1.3 is
        # already dozens of sigmas out of the money
        sdf = calibrate_sdf(asset2_mixture, rate)
        prices = [mixture_call_relative(asset2_mixture, sdf, k) for k in (1.05, 1.1, 1.3)]
        assert prices[0] > prices[1] > prices[2] >= 0.0
        assert prices[2] < 1e-12

    def test_convex_nonincreasing_in_kappa(self, asset1_mixture, rate):
        sdf = calibrate_sdf(asset1_mixture, rate)
        grid = np.linspace(0.7, 1.4, 50)
        c = np.array([mixture_call_relative(asset1_mixture, sdf, k) for k in grid])
        assert np.all(np.diff(c) <= 1e-12)
        assert np.all(np.diff(c, 2) >= -1e-8)

    def test_rn_call_relative_consistent(self, asset1_mixture, rate):
        sdf = calibrate_sdf(asset1_mixture, rate)
        rn = risk_neutralize(asset1_mixture, sdf.alpha, rate)
        k = 1.02
        assert rn_call_relative(rn, rate, k) == pytest.approx(
            mixture_call_relative(asset1_mixture, sdf, k), abs=1e-14
        )


class TestParity:
    def test_worthless_put(self):
        assert put_from_parity(1.0, 1e-14, 0.05, 1.0) == pytest.approx(0.0, abs=1e-13)

    def test_atm_symmetry_r_zero(self):
        assert put_from_parity(0.0796557, 1.0, 0.0, 1.0) == pytest.approx(0.0796557, abs=1e-12)

    def test_involution(self):
        c, kappa, r = 0.2, 0.95, 0.01
        p = put_from_parity(c, kappa, r, 1.0)
        back = p - kappa * math.exp(-r) + 1.0
        assert back == pytest.approx(c, abs=1e-15)

    def test_parity_violation_detected(self):
        with pytest.raises(ValueError, match="parity"):
            put_from_parity(0.0, 0.5, 0.0, 1.0)

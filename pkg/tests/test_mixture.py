import math

import numpy as np
import pytest
from scipy.integrate import quad

from rainbow_pricer import Component, EmConfig, GaussianMixture, fit_em

SYMMETRIC = GaussianMixture((Component(0.5, -1.0, 1.0), Component(0.5, 1.0, 1.0)))
STANDARD = GaussianMixture((Component(1.0, 0.0, 1.0),))


class TestValidation:
    def test_weights_must_sum_to_one(self):
        with pytest.raises(ValueError, match="sum"):
            GaussianMixture((Component(0.6, 0.0, 1.0), Component(0.6, 0.0, 1.0)))

    @pytest.mark.parametrize("p", [0.0, -0.1, 1.2])
    def test_weight_domain(self, p):
        with pytest.raises(ValueError):
            GaussianMixture((Component(p, 0.0, 1.0), Component(1.0 - p, 0.0, 1.0)))

    def test_sigma_positive(self):
        with pytest.raises(ValueError, match="sigma"):
            GaussianMixture((Component(1.0, 0.0, 0.0),))

    def test_dict_round_trip(self, asset1_mixture):
        again = GaussianMixture.from_dict(asset1_mixture.to_dict())
        assert again == asset1_mixture


class TestPdfCdf:
    def test_standard_normal_mode(self):
        assert STANDARD.pdf(0.0) == pytest.approx(1.0 / math.sqrt(2.0 * math.pi), abs=1e-12)

    def test_symmetric_pdf_value(self):
        # equals the N(1,1) density at 0 because both components contribute equally
        expect = math.exp(-0.5) / math.sqrt(2.0 * math.pi)
        assert SYMMETRIC.pdf(0.0) == pytest.approx(expect, abs=1e-12)
        assert SYMMETRIC.pdf(0.0) == pytest.approx(0.241971, abs=1e-6)

    def test_pdf_integrates_to_one(self, asset1_mixture):
        lo = min(c.mu - 12.0 * c.sigma for c in asset1_mixture.components)
        hi = max(c.mu + 12.0 * c.sigma for c in asset1_mixture.components)
        total, _ = quad(asset1_mixture.pdf, lo, hi, epsabs=1e-12, limit=200)
        assert total == pytest.approx(1.0, abs=1e-8)

    def test_cdf_limits_and_symmetry(self):
        assert SYMMETRIC.cdf(-60.0) == pytest.approx(0.0, abs=1e-300)
        assert SYMMETRIC.cdf(60.0) == pytest.approx(1.0, abs=1e-15)
        assert SYMMETRIC.cdf(0.0) == pytest.approx(0.5, abs=1e-14)

    def test_cdf_nondecreasing(self, asset2_mixture):
        xs = np.linspace(-0.3, 0.3, 4001)
        vals = asset2_mixture.cdf(xs)
        assert np.all(np.diff(vals) >= 0.0)


class TestQuantile:
    def test_symmetric_median_is_zero(self):
        assert SYMMETRIC.quantile(0.5) == pytest.approx(0.0, abs=1e-12)

    def test_single_component_matches_normal(self):
        m = GaussianMixture((Component(1.0, 0.002, 0.04),))
        assert m.quantile(0.975) == pytest.approx(0.002 + 1.959964 * 0.04, abs=1e-7)

    @pytest.mark.parametrize("p", [0.3, 1e-6, 0.5, 0.97, 1.0 - 1e-9])
    def test_round_trip(self, asset1_mixture, p):
        assert asset1_mixture.cdf(asset1_mixture.quantile(p)) == pytest.approx(p, abs=1e-10)

    def test_median_round_trip(self, asset1_mixture):
        med = asset1_mixture.quantile(0.5)
        assert asset1_mixture.cdf(med) == pytest.approx(0.5, abs=1e-10)

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.2, 1.5])
    def test_domain(self, p):
        with pytest.raises(ValueError):
            STANDARD.quantile(p)

    def test_vectorized_round_trip(self, asset2_mixture):
        ps = np.random.default_rng(1).random(200)
        xs = asset2_mixture.quantile(ps)
        assert np.max(np.abs(asset2_mixture.cdf(xs) - ps)) <= 1e-10


class TestSample:
    def test_lln_on_standard_normal(self):
        x = STANDARD.sample(100_000, seed=4)
        assert abs(float(np.mean(x))) <= 4.0 / math.sqrt(100_000)

    def test_deterministic_per_seed(self):
        a = SYMMETRIC.sample(64, seed=9)
        b = SYMMETRIC.sample(64, seed=9)
        assert np.array_equal(a, b)

    def test_sample_sd_matches_table_value(self, asset1_mixture):
        n = 1_000_000
        x = asset1_mixture.sample(n, seed=12)
        sd = float(np.std(x))
        # binomial regime mixing dominates the sd sampling error
        se = sd / math.sqrt(2.0 * n) * 4.0
        assert abs(sd - 0.02142835) <= 3.0 * se + 3e-5


class TestMoments:
    def test_single_component_exact(self):
        m = GaussianMixture((Component(1.0, 0.31, 0.07),))
        mean, sd, skew, kurt = m.moments()
        assert (mean, sd) == (0.31, 0.07)
        assert skew == pytest.approx(0.0, abs=1e-9)
        assert kurt == pytest.approx(3.0, abs=1e-9)

    def test_mean_is_weighted_average(self, asset2_mixture):
        mean = asset2_mixture.moments()[0]
        direct = sum(c.p * c.mu for c in asset2_mixture.components)
        assert mean == pytest.approx(direct, abs=1e-14)

    def test_moments_match_quadrature(self, asset1_mixture):
        mean, sd, skew, kurt = asset1_mixture.moments()
        lo, hi = -1.0, 1.0
        mu1 = quad(lambda x: x * asset1_mixture.pdf(x), lo, hi, epsabs=1e-14, limit=300)[0]
        mu2 = quad(lambda x: (x - mu1) ** 2 * asset1_mixture.pdf(x), lo, hi, epsabs=1e-14, limit=300)[0]
        mu4 = quad(lambda x: (x - mu1) ** 4 * asset1_mixture.pdf(x), lo, hi, epsabs=1e-16, limit=300)[0]
        assert mean == pytest.approx(mu1, abs=1e-10)
        assert sd == pytest.approx(math.sqrt(mu2), abs=1e-10)
        assert kurt == pytest.approx(mu4 / mu2**2, rel=1e-6)


class TestMgf:
    def test_at_zero(self, asset1_mixture):
        assert asset1_mixture.mgf(0.0) == pytest.approx(1.0, abs=1e-15)

    def test_standard_normal(self):
        assert STANDARD.mgf(1.0) == pytest.approx(math.exp(0.5), rel=1e-12)

    def test_matches_quadrature(self, asset1_mixture):
        oracle = quad(
            lambda x: math.exp(x) * asset1_mixture.pdf(x), -1.5, 1.5, epsabs=1e-13, limit=300
        )[0]
        assert asset1_mixture.mgf(1.0) == pytest.approx(oracle, rel=1e-9)

    def test_overflow_signalled(self):
        with pytest.raises(OverflowError):
            STANDARD.mgf(60.0)

    def test_log_mgf_consistent(self, asset2_mixture):
        s = np.array([-3.0, 0.0, 2.0, 17.0])
        assert np.allclose(np.exp(asset2_mixture.log_mgf(s)), [asset2_mixture.mgf(v) for v in s], rtol=1e-12)


class TestFitEm:
    def test_refuses_tiny_samples(self):
        with pytest.raises(ValueError, match="at least 10"):
            fit_em(np.random.default_rng(0).normal(size=5))

    def test_single_normal_data(self):
        # single-regime truth leaves a flat ridge, so EM may stop on
        # max_iter; the fitted law still has to look like N(0,1)
        x = np.random.default_rng(21).normal(0.0, 1.0, 20_000)
        m, _ = fit_em(x, EmConfig(n_restarts=2, seed=21))
        assert m.moments()[1] == pytest.approx(1.0, rel=0.02)
        near_standard = all(abs(c.sigma - 1.0) < 0.1 for c in m.components)
        tiny_weight = min(c.p for c in m.components) < 0.05
        assert near_standard or tiny_weight

    def test_recovers_known_mixture(self):
        true = GaussianMixture((Component(0.8, 0.001, 0.01), Component(0.2, -0.001, 0.033)))
        x = true.sample(200_000, seed=33)
        m, diag = fit_em(x, EmConfig(n_restarts=1, seed=0))
        assert diag.converged
        # components come back sorted by sigma, matching the true order
        for est, ref in zip(m.components, true.components):
            assert est.p == pytest.approx(ref.p, abs=0.02)
            assert est.sigma == pytest.approx(ref.sigma, rel=0.05)
        assert m.components[0].mu == pytest.approx(0.001, abs=3e-4)

    def test_loglik_history_nondecreasing(self):
        x = np.random.default_rng(2).normal(0.0, 0.02, 5_000)
        _, diag = fit_em(x, EmConfig(n_restarts=1, seed=2))
        hist = np.asarray(diag.loglik_history)
        assert np.all(np.diff(hist) >= -1e-7)

    def test_deterministic(self):
        x = np.random.default_rng(8).standard_t(5, 4_000) * 0.01
        m1, _ = fit_em(x, EmConfig(seed=5))
        m2, _ = fit_em(x, EmConfig(seed=5))
        assert m1 == m2

    def test_sigmas_sorted(self):
        x = np.random.default_rng(17).normal(0.0, 0.015, 3_000)
        m, _ = fit_em(x)
        assert m.components[0].sigma <= m.components[1].sigma

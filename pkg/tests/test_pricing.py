import math

import numpy as np
import pytest
from scipy.integrate import dblquad

from rainbow_pricer import (
    AssetLeg,
    MarketModel,
    OptionSpec,
    calibrate_sdf,
    make_copula,
    price_digital_closed,
    price_mc,
    price_quadrature,
    risk_neutralize,
    univariate_call_price,
)

RATE = 0.025


@pytest.fixture(scope="module")
def leg1(asset1_mixture):
    sdf = calibrate_sdf(asset1_mixture, RATE)
    return AssetLeg(120.0, risk_neutralize(asset1_mixture, sdf.alpha, RATE))


@pytest.fixture(scope="module")
def leg2(asset2_mixture):
    sdf = calibrate_sdf(asset2_mixture, RATE)
    return AssetLeg(120.0, risk_neutralize(asset2_mixture, sdf.alpha, RATE))


@pytest.fixture(scope="module")
def market(leg1, leg2):
    return MarketModel((leg1, leg2), make_copula("gaussian", (0.2822,)), RATE)


class TestSpecs:
    def test_option_kind_validated(self):
        with pytest.raises(ValueError, match="unknown option kind"):
            OptionSpec("butterfly", strike=1.0)

    def test_digital_needs_strikes(self):
        with pytest.raises(ValueError, match="digital"):
            OptionSpec("digital")
        with pytest.raises(ValueError, match="digital"):
            OptionSpec("digital", strikes=(100.0, -1.0))

    @pytest.mark.parametrize("kind", ["spread", "call_max", "call_min"])
    def test_scalar_kinds_need_positive_strike(self, kind):
        with pytest.raises(ValueError, match="positive strike"):
            OptionSpec(kind)
        with pytest.raises(ValueError, match="positive strike"):
            OptionSpec(kind, strike=0.0)

    def test_digital_constructor(self):
        o = OptionSpec.digital([100, 110])
        assert o.kind == "digital"
        assert o.strikes == (100.0, 110.0)

    def test_market_model_validation(self, leg1, leg2):
        with pytest.raises(ValueError, match="1 or 2 assets"):
            MarketModel((leg1, leg1, leg2), make_copula("independence"), RATE)
        with pytest.raises(ValueError, match="need a copula"):
            MarketModel((leg1, leg2), None, RATE)
        m = MarketModel((leg1,), None, RATE)
        assert m.discount == pytest.approx(math.exp(-RATE), abs=1e-15)

    def test_spot_positive(self, leg1):
        with pytest.raises(ValueError, match="spot"):
            AssetLeg(-5.0, leg1.margin)


class TestMonteCarlo:
    def test_trivial_digital_pays_discount(self, market):
        res = price_mc(market, OptionSpec.digital([1e-4, 1e-4]), n=5000, seed=1)
        assert res.price == pytest.approx(math.exp(-RATE), abs=1e-12)
        assert res.std_error == 0.0

    def test_hopeless_digital_pays_nothing(self, market):
        res = price_mc(market, OptionSpec.digital([1e6, 1e6]), n=5000, seed=1)
        assert res.price == 0.0

    @pytest.mark.parametrize("strikes", [(110.0, 119.2), (120.0, 120.0), (130.0, 140.8)])
    def test_digital_within_discount_bounds(self, market, strikes):
        res = price_mc(market, OptionSpec.digital(strikes), n=20_000, seed=3)
        assert 0.0 <= res.price <= math.exp(-RATE)

    def test_single_asset_call_matches_univariate(self, leg1):
        m = MarketModel((leg1,), None, RATE)
        o = OptionSpec("call_max", strike=120.0)
        res = price_mc(m, o, n=200_000, seed=7)
        want = univariate_call_price(leg1, RATE, 120.0)
        assert abs(res.price - want) <= 3.0 * res.std_error

    def test_comonotone_collapses_max_and_min(self, leg1):
        m = MarketModel((leg1, leg1), make_copula("comonotone"), RATE)
        hi = price_mc(m, OptionSpec("call_max", strike=125.0), n=50_000, seed=11)
        lo = price_mc(m, OptionSpec("call_min", strike=125.0), n=50_000, seed=11)
        assert hi.price == lo.price
        want = univariate_call_price(leg1, RATE, 125.0)
        assert abs(lo.price - want) <= 3.0 * lo.std_error

    def test_deterministic_per_seed(self, market):
        o = OptionSpec("call_max", strike=120.0)
        a = price_mc(market, o, n=30_000, seed=5)
        b = price_mc(market, o, n=30_000, seed=5)
        assert a == b
        c = price_mc(market, o, n=30_000, seed=6)
        assert c.price != a.price

    def test_worker_count_does_not_change_the_price(self, market):
        o = OptionSpec("spread", strike=10.0)
        a = price_mc(market, o, n=60_000, seed=9, threads=1)
        b = price_mc(market, o, n=60_000, seed=9, threads=4)
        assert a.price == b.price
        assert a.std_error == b.std_error

    def test_shard_plan(self, market):
        o = OptionSpec("call_max", strike=120.0)
        assert price_mc(market, o, n=100, seed=1).shards == 1
        assert price_mc(market, o, n=60_000, seed=1).shards == 3

    def test_nonincreasing_in_strike(self, market):
        prices = [
            price_mc(market, OptionSpec("call_max", strike=k), n=20_000, seed=13).price
            for k in np.linspace(90.0, 180.0, 10)
        ]
        assert all(a >= b for a, b in zip(prices, prices[1:]))

    def test_errors(self, market, leg1):
        o = OptionSpec("call_max", strike=120.0)
        with pytest.raises(ValueError, match="n >= 100"):
            price_mc(market, o, n=50, seed=1)
        m1 = MarketModel((leg1,), None, RATE)
        with pytest.raises(ValueError, match="two assets"):
            price_mc(m1, OptionSpec("spread", strike=10.0), n=1000, seed=1)
        with pytest.raises(ValueError, match="one strike per asset"):
            price_mc(m1, OptionSpec.digital([100.0, 100.0]), n=1000, seed=1)

    def test_result_serialization(self, market):
        res = price_mc(market, OptionSpec("call_min", strike=120.0), n=1000, seed=2)
        d = res.to_dict()
        assert d["method"] == "mc"
        assert d["n"] == 1000
        assert d["seed"] == 2
        assert d["price"] == res.price


class TestQuadrature:
    @pytest.mark.parametrize(
        "kind,strike",
        [("call_max", 110.0), ("call_max", 130.0), ("call_min", 120.0)],
    )
    def test_agrees_with_monte_carlo(self, market, kind, strike):
        o = OptionSpec(kind, strike=strike)
        mc = price_mc(market, o, n=200_000, seed=17)
        qd = price_quadrature(market, o)
        assert qd.std_error == 0.0
        assert abs(mc.price - qd.price) <= 3.0 * mc.std_error

    @pytest.mark.parametrize("strike", [10.0, 30.0])
    def test_spread_agrees_with_monte_carlo(self, leg1, leg2, strike):
        # spread strikes this wide need the uneven-spot market to carry
        # payoff mass
        m = MarketModel(
            (AssetLeg(100.0, leg1.margin), AssetLeg(120.0, leg2.margin)),
            make_copula("gaussian", (0.2822,)),
            RATE,
        )
        o = OptionSpec("spread", strike=strike)
        mc = price_mc(m, o, n=200_000, seed=17)
        qd = price_quadrature(m, o)
        assert abs(mc.price - qd.price) <= 3.0 * mc.std_error

    def test_independence_call_max_against_tensor_quadrature(self, leg1, leg2):
        m = MarketModel((leg1, leg2), make_copula("independence"), RATE)
        k = 121.0
        got = price_quadrature(m, OptionSpec("call_max", strike=k)).price

        f1 = leg1.margin.as_mixture()
        f2 = leg2.margin.as_mixture()

        def payoff(x2, x1):
            s = max(leg1.spot * math.exp(x1), leg2.spot * math.exp(x2))
            return max(s - k, 0.0) * f1.pdf(x1) * f2.pdf(x2)

        lo1, hi1 = f1.quantile(1e-12), f1.quantile(1.0 - 1e-12)
        lo2, hi2 = f2.quantile(1e-12), f2.quantile(1.0 - 1e-12)
        want, err = dblquad(payoff, lo1, hi1, lo2, hi2, epsabs=1e-8)
        want *= math.exp(-RATE)
        assert err < 1e-6
        assert got == pytest.approx(want, abs=1e-4)

    def test_deep_otm_spread_vanishes(self, market):
        res = price_quadrature(market, OptionSpec("spread", strike=1200.0))
        assert 0.0 <= res.price < 1e-4

    def test_max_dominates_min(self, market):
        hi = price_quadrature(market, OptionSpec("call_max", strike=120.0)).price
        lo = price_quadrature(market, OptionSpec("call_min", strike=120.0)).price
        mid = univariate_call_price(market.assets[0], RATE, 120.0)
        assert hi >= mid >= lo

    def test_errors(self, market, leg1):
        with pytest.raises(ValueError, match="closed form"):
            price_quadrature(market, OptionSpec.digital([100.0, 100.0]))
        m1 = MarketModel((leg1,), None, RATE)
        with pytest.raises(ValueError, match="two assets"):
            price_quadrature(m1, OptionSpec("call_max", strike=120.0))


class TestDigitalClosedForm:
    def test_trivial_strike_is_pure_discount(self, market):
        res = price_digital_closed(market, OptionSpec.digital([1e-4, 1e-4]))
        assert res.price == pytest.approx(math.exp(-RATE), abs=1e-12)
        assert res.method == "closed_form"

    def test_agrees_with_monte_carlo(self, market):
        o = OptionSpec.digital([120.0, 120.0])
        mc = price_mc(market, o, n=200_000, seed=23)
        cf = price_digital_closed(market, o)
        assert abs(mc.price - cf.price) <= 3.0 * mc.std_error

    def test_single_asset(self, leg1):
        m = MarketModel((leg1,), None, RATE)
        got = price_digital_closed(m, OptionSpec.digital([120.0])).price
        want = math.exp(-RATE) * (1.0 - leg1.margin.cdf(math.log(120.0 / leg1.spot)))
        assert got == pytest.approx(want, abs=1e-14)

    def test_dependence_ordering(self, leg1, leg2):
        o = OptionSpec.digital([120.0, 120.0])
        prices = {}
        for fam in ("countermonotone", "independence", "comonotone"):
            m = MarketModel((leg1, leg2), make_copula(fam), RATE)
            prices[fam] = price_digital_closed(m, o).price
        assert prices["countermonotone"] <= prices["independence"] <= prices["comonotone"]

    def test_bounds(self, market):
        for ks in [(60.0, 60.0), (120.0, 120.0), (200.0, 200.0)]:
            p = price_digital_closed(market, OptionSpec.digital(ks)).price
            assert 0.0 <= p <= math.exp(-RATE)

    def test_errors(self, market):
        with pytest.raises(ValueError, match="digital only"):
            price_digital_closed(market, OptionSpec("call_max", strike=100.0))
        with pytest.raises(ValueError, match="one strike per asset"):
            price_digital_closed(market, OptionSpec.digital([100.0]))


class TestUnivariateCall:
    def test_positive_and_monotone(self, leg1):
        prices = [univariate_call_price(leg1, RATE, k) for k in (100.0, 120.0, 140.0)]
        assert all(p > 0.0 for p in prices)
        assert prices[0] > prices[1] > prices[2]

    def test_forward_parity_bound(self, leg1):
        # c >= S - K e^{-r} (european lower bound)
        k = 100.0
        c = univariate_call_price(leg1, RATE, k)
        assert c >= leg1.spot - k * math.exp(-RATE) - 1e-12

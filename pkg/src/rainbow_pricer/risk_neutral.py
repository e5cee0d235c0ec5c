"""Stochastic discount factor calibration and univariate option pricing.

The pricing kernel is exponential-affine, M = exp(alpha*X + beta). The
pair (alpha, beta) is pinned down by the bond and underlying identities
E[M] = e^{-r} and E[M e^X] = 1, which make the discounted underlying a
martingale. Under that kernel a physical Gaussian mixture maps to
another Gaussian mixture with tilted weights and shifted means, so
relative calls price as weight-averaged Black-Scholes terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp, ndtr

from rainbow_pricer.mixture import Component, GaussianMixture

__all__ = [
    "SdfParams",
    "RiskNeutralMixture",
    "BlackScholesQuote",
    "calibrate_sdf",
    "risk_neutralize",
    "bs_call_relative",
    "rn_call_relative",
    "mixture_call_relative",
    "put_from_parity",
]

_ALPHA_LIMIT = 1e4


@dataclass(frozen=True)
class SdfParams:
    alpha: float
    beta: float
    rate: float

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "rate": self.rate}

    @classmethod
    def from_dict(cls, d: dict) -> "SdfParams":
        return cls(d["alpha"], d["beta"], d["rate"])


@dataclass(frozen=True)
class RiskNeutralMixture:
    """Gaussian mixture under the risk-neutral measure, plus per-component
    forward factors gamma_i = E*_i[e^X] e^{-r} used by the mixture call."""

    weights: tuple[float, ...]
    means: tuple[float, ...]
    sigmas: tuple[float, ...]
    gammas: tuple[float, ...]

    def as_mixture(self) -> GaussianMixture:
        return GaussianMixture(
            tuple(Component(p, mu, s) for p, mu, s in zip(self.weights, self.means, self.sigmas))
        )

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        z = (x[..., None] - np.array(self.means)) / np.array(self.sigmas)
        out = ndtr(z) @ np.array(self.weights)
        return out if out.ndim else float(out)

    def quantile(self, p):
        return self.as_mixture().quantile(p)

    def sample(self, n: int, seed: int) -> np.ndarray:
        return self.as_mixture().sample(n, seed)

    def to_dict(self) -> dict:
        return {
            "weights": list(self.weights),
            "means": list(self.means),
            "sigmas": list(self.sigmas),
            "gammas": list(self.gammas),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RiskNeutralMixture":
        return cls(
            tuple(d["weights"]), tuple(d["means"]), tuple(d["sigmas"]), tuple(d["gammas"])
        )


@dataclass(frozen=True)
class BlackScholesQuote:
    """Inputs for the relative call c(sigma^2, kappa); strike is K/S."""

    sigma2: float
    kappa: float
    r: float
    tau: float
    d1: float
    d2: float

    @classmethod
    def make(cls, sigma2: float, kappa: float, r: float, tau: float = 1.0) -> "BlackScholesQuote":
        if not (sigma2 > 0.0):
            raise ValueError("sigma2 must be positive")
        if not (kappa > 0.0):
            raise ValueError("kappa must be positive")
        if not (tau > 0.0):
            raise ValueError("tau must be positive")
        st = math.sqrt(sigma2 * tau)
        d1 = ((r + 0.5 * sigma2) * tau - math.log(kappa)) / st
        return cls(sigma2, kappa, r, tau, d1, d1 - st)


def _dlog_mgf(m: GaussianMixture, s: float) -> float:
    # d/ds log E[e^{sX}] = sum_i w_i(s) (mu_i + s sigma_i^2), softmax weights
    mu, sig, p = m.means, m.sigmas, m.weights
    e = np.log(p) + mu * s + 0.5 * (s * sig) ** 2
    w = np.exp(e - logsumexp(e))
    return float(w @ (mu + s * sig**2))


def calibrate_sdf(m: GaussianMixture, r: float) -> SdfParams:
    """Solve for the kernel tilt alpha and level beta at rate r.

    The scalar equation g(alpha) = log mgf(alpha+1) - log mgf(alpha) - r
    is strictly increasing (covariance argument), so the root is unique.
    Newton iterates are kept inside a sign-changing bracket found by
    geometric expansion from 0; a bisection step replaces any Newton step
    that leaves the bracket.
    """

    def g(a: float) -> float:
        return float(m.log_mgf(a + 1.0) - m.log_mgf(a)) - r

    def dg(a: float) -> float:
        return _dlog_mgf(m, a + 1.0) - _dlog_mgf(m, a)

    g0 = g(0.0)
    if g0 == 0.0:
        beta = -r - float(m.log_mgf(0.0))
        return SdfParams(0.0, beta, r)
    # expand away from 0 in the direction that decreases |g|
    lo, hi = (None, 0.0) if g0 > 0.0 else (0.0, None)
    step = 1.0
    a = 0.0
    while lo is None or hi is None:
        a = a - step if g0 > 0.0 else a + step
        if abs(a) > _ALPHA_LIMIT:
            raise ValueError(f"no SDF root with |alpha| <= {_ALPHA_LIMIT:g} at r={r}")
        if (g(a) > 0.0) != (g0 > 0.0):
            if g0 > 0.0:
                lo = a
            else:
                hi = a
        else:
            if g0 > 0.0:
                hi = a
            else:
                lo = a
        step *= 2.0

    glo = g(lo)
    x = 0.5 * (lo + hi)
    for _ in range(100):
        gx = g(x)
        if gx == 0.0 or hi - lo < 1e-15 * max(1.0, abs(x)):
            break
        if (gx > 0.0) == (glo > 0.0):
            lo = x
        else:
            hi = x
        d = dg(x)
        x_new = x - gx / d if d > 0.0 else lo - 1.0
        if not (lo < x_new < hi):
            x_new = 0.5 * (lo + hi)
        if abs(gx) < 1e-15:
            x = x_new
            break
        x = x_new
    alpha = x
    beta = -r - float(m.log_mgf(alpha))
    resid_bond = abs(math.exp(float(m.log_mgf(alpha)) + beta) - math.exp(-r))
    resid_under = abs(math.exp(float(m.log_mgf(alpha + 1.0)) + beta) - 1.0)
    if max(resid_bond, resid_under) > 1e-12:
        raise ValueError(
            f"SDF calibration residuals too large: bond {resid_bond:.2e}, underlying {resid_under:.2e}"
        )
    return SdfParams(alpha, beta, r)


def risk_neutralize(m: GaussianMixture, alpha: float, r: float) -> RiskNeutralMixture:
    """Tilt a physical mixture by exp(alpha*x): weights become a softmax,
    means shift by alpha*sigma^2, sigmas are unchanged."""
    p, mu, sig = m.weights, m.means, m.sigmas
    e = np.log(p) + mu * alpha + 0.5 * (alpha * sig) ** 2
    v = np.exp(e - logsumexp(e))
    v = v / v.sum()
    rn_mu = mu + alpha * sig**2
    gam = np.exp(rn_mu - r + 0.5 * sig**2)
    return RiskNeutralMixture(
        weights=tuple(float(x) for x in v),
        means=tuple(float(x) for x in rn_mu),
        sigmas=tuple(float(x) for x in sig),
        gammas=tuple(float(x) for x in gam),
    )


def bs_call_relative(q: BlackScholesQuote) -> float:
    """c = N(d1) - kappa e^{-r tau} N(d2), the relative call of the
    lognormal model."""
    return float(ndtr(q.d1) - q.kappa * math.exp(-q.r * q.tau) * ndtr(q.d2))


def rn_call_relative(rn: RiskNeutralMixture, r: float, kappa: float, tau: float = 1.0) -> float:
    """Relative call priced directly off a risk-neutral mixture."""
    if not (kappa > 0.0):
        raise ValueError("kappa must be positive")
    total = 0.0
    for v, sig, gam in zip(rn.weights, rn.sigmas, rn.gammas):
        q = BlackScholesQuote.make(sig * sig, kappa / gam, r, tau)
        total += v * gam * bs_call_relative(q)
    return total


def mixture_call_relative(m: GaussianMixture, sdf: SdfParams, kappa: float) -> float:
    """One-period relative call under the risk-neutral mixture: a
    gamma-weighted average of Black-Scholes calls at strikes kappa/gamma_i."""
    rn = risk_neutralize(m, sdf.alpha, sdf.rate)
    return rn_call_relative(rn, sdf.rate, kappa, 1.0)


def put_from_parity(call: float, kappa: float, r: float, tau: float = 1.0) -> float:
    """p = c + kappa e^{-r tau} - 1; negative beyond 1e-12 signals
    inconsistent inputs."""
    p = call + kappa * math.exp(-r * tau) - 1.0
    if p < -1e-12:
        raise ValueError(f"parity violation: put would be {p:.3e}")
    return max(p, 0.0)

"""Finite Gaussian mixtures: evaluation, moments, simulation, EM fitting.

The two-component case models daily log-returns with a low-volatility
body regime and a high-volatility tail regime. Components are reported
sorted by ascending sigma so the regimes are identifiable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp, ndtr, ndtri

__all__ = [
    "Component",
    "GaussianMixture",
    "EmConfig",
    "FitDiagnostics",
    "fit_em",
]

_LOG_2PI = math.log(2.0 * math.pi)
_VAR_FLOOR = 1e-10
# exp() overflows just above this for float64
_EXP_MAX = 709.0


@dataclass(frozen=True)
class Component:
    p: float
    mu: float
    sigma: float


@dataclass(frozen=True)
class GaussianMixture:
    """Weighted sum of Gaussian densities, weights summing to 1."""

    components: tuple[Component, ...]

    def __post_init__(self) -> None:
        if not self.components:
            raise ValueError("mixture needs at least one component")
        total = 0.0
        for i, c in enumerate(self.components):
            if not (0.0 < c.p <= 1.0):
                raise ValueError(f"component {i}: weight {c.p} outside (0, 1]")
            if not (c.sigma > 0.0) or not math.isfinite(c.sigma):
                raise ValueError(f"component {i}: sigma {c.sigma} must be positive")
            if not math.isfinite(c.mu):
                raise ValueError(f"component {i}: mu {c.mu} not finite")
            total += c.p
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {total!r}, expected 1 within 1e-12")

    # --- parameter views -------------------------------------------------

    @property
    def weights(self) -> np.ndarray:
        return np.array([c.p for c in self.components])

    @property
    def means(self) -> np.ndarray:
        return np.array([c.mu for c in self.components])

    @property
    def sigmas(self) -> np.ndarray:
        return np.array([c.sigma for c in self.components])

    # --- distribution functions ------------------------------------------

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        z = (x[..., None] - self.means) / self.sigmas
        dens = np.exp(-0.5 * z * z) / (self.sigmas * math.sqrt(2.0 * math.pi))
        out = dens @ self.weights
        return out if out.ndim else float(out)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        z = (x[..., None] - self.means) / self.sigmas
        out = ndtr(z) @ self.weights
        return out if out.ndim else float(out)

    def quantile(self, p):
        """Inverse cdf by bracketed bisection plus a Newton polish.

        The root lies in [min_i, max_i] of the per-component quantiles
        mu_i + sigma_i * z_p, which gives a tight starting bracket.
        """
        p_arr = np.asarray(p, dtype=float)
        if np.any((p_arr <= 0.0) | (p_arr >= 1.0)):
            raise ValueError("quantile requires 0 < p < 1")
        z = ndtri(p_arr)
        cand = self.means + self.sigmas * z[..., None]
        lo = cand.min(axis=-1)
        hi = cand.max(axis=-1)
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            above = self.cdf(mid) >= p_arr
            hi = np.where(above, mid, hi)
            lo = np.where(above, lo, mid)
        x = 0.5 * (lo + hi)
        for _ in range(2):
            err = self.cdf(x) - p_arr
            slope = np.maximum(self.pdf(x), 1e-300)
            x = np.clip(x - err / slope, lo, hi)
        return x if x.ndim else float(x)

    def sample(self, n: int, seed: int) -> np.ndarray:
        if n < 1:
            raise ValueError("n must be at least 1")
        rng = np.random.default_rng(seed)
        idx = rng.choice(len(self.components), size=n, p=self.weights)
        return rng.normal(self.means[idx], self.sigmas[idx])

    # --- moments and transforms -------------------------------------------

    def moments(self) -> tuple[float, float, float, float]:
        """Closed-form (mean, sd, skewness, raw kurtosis)."""
        p, mu, sig = self.weights, self.means, self.sigmas
        v = sig**2
        r1 = float(p @ mu)
        r2 = float(p @ (mu**2 + v))
        r3 = float(p @ (mu**3 + 3.0 * mu * v))
        r4 = float(p @ (mu**4 + 6.0 * mu**2 * v + 3.0 * v**2))
        m2 = r2 - r1**2
        m3 = r3 - 3.0 * r1 * r2 + 2.0 * r1**3
        m4 = r4 - 4.0 * r1 * r3 + 6.0 * r1**2 * r2 - 3.0 * r1**4
        return r1, math.sqrt(m2), m3 / m2**1.5, m4 / m2**2

    def mgf(self, s: float) -> float:
        exponents = self.means * s + 0.5 * (s * self.sigmas) ** 2
        if np.max(exponents) > _EXP_MAX:
            raise OverflowError(f"mgf exponent {np.max(exponents):.1f} exceeds float range")
        return float(self.weights @ np.exp(exponents))

    def log_mgf(self, s):
        """log E[e^{sX}], overflow-safe, vectorized in s."""
        s = np.asarray(s, dtype=float)
        exponents = self.means * s[..., None] + 0.5 * (s[..., None] * self.sigmas) ** 2
        out = logsumexp(exponents, axis=-1, b=self.weights)
        return out if out.ndim else float(out)

    # --- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        return {"components": [{"p": c.p, "mu": c.mu, "sigma": c.sigma} for c in self.components]}

    @classmethod
    def from_dict(cls, d: dict) -> "GaussianMixture":
        return cls(tuple(Component(c["p"], c["mu"], c["sigma"]) for c in d["components"]))


@dataclass(frozen=True)
class EmConfig:
    max_iter: int = 500
    tol: float = 1e-10
    n_restarts: int = 5
    seed: int = 0
    init: str = "quantile-split"

    def __post_init__(self) -> None:
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if not (self.tol > 0.0):
            raise ValueError("tol must be positive")
        if self.n_restarts < 1:
            raise ValueError("n_restarts must be at least 1")
        if self.init not in ("quantile-split", "random-responsibility"):
            raise ValueError(f"unknown init {self.init!r}")


@dataclass(frozen=True)
class FitDiagnostics:
    loglik: float
    iterations: int
    converged: bool
    restarts_used: int
    loglik_history: tuple[float, ...] = field(default=())


class _RestartCollapse(Exception):
    """A restart hit the variance floor; its fit is discarded."""


def _m_step(x: np.ndarray, resp: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    nk = resp.sum(axis=0)
    if np.any(nk < 1e-12):
        raise _RestartCollapse
    w = nk / x.size
    mu = (resp * x[:, None]).sum(axis=0) / nk
    var = (resp * (x[:, None] - mu) ** 2).sum(axis=0) / nk
    if np.any(var < _VAR_FLOOR):
        raise _RestartCollapse
    return w, mu, np.sqrt(var)


def _log_components(x, w, mu, sig):
    return (
        np.log(w)
        - np.log(sig)
        - 0.5 * _LOG_2PI
        - 0.5 * ((x[:, None] - mu) / sig) ** 2
    )


def _em_once(x: np.ndarray, resp0: np.ndarray, cfg: EmConfig):
    w, mu, sig = _m_step(x, resp0)
    history: list[float] = []
    prev = -np.inf
    converged = False
    iterations = 0
    for iterations in range(1, cfg.max_iter + 1):
        logc = _log_components(x, w, mu, sig)
        row = logsumexp(logc, axis=1)
        ll = float(row.sum())
        history.append(ll)
        resp = np.exp(logc - row[:, None])
        w, mu, sig = _m_step(x, resp)
        if ll - prev < cfg.tol and iterations > 1:
            converged = True
            break
        prev = ll
    return w, mu, sig, history, converged, iterations


def _quantile_split_resp(x: np.ndarray) -> np.ndarray:
    # tail decile by distance from the median -> high-volatility component
    dev = np.abs(x - np.median(x))
    cut = np.quantile(dev, 0.9)
    tail = (dev >= cut).astype(float)
    return np.column_stack([1.0 - tail, tail])


def fit_em(data, cfg: EmConfig | None = None) -> tuple[GaussianMixture, FitDiagnostics]:
    """Fit a two-component mixture by EM with restarts.

    Restart 0 uses the configured initializer; later restarts draw random
    responsibilities from seed + restart index, so results are
    reproducible regardless of scheduling. Best restart wins by
    log-likelihood, ties by lowest index.
    """
    cfg = cfg or EmConfig()
    x = np.asarray(getattr(data, "values", data), dtype=float)
    if x.ndim != 1:
        x = x.ravel()
    if x.size < 10:
        raise ValueError(f"need at least 10 observations to fit, got {x.size}")

    best = None
    failures = 0
    for k in range(cfg.n_restarts):
        if k == 0 and cfg.init == "quantile-split":
            resp0 = _quantile_split_resp(x)
        else:
            rng = np.random.default_rng(cfg.seed + k)
            r = rng.uniform(0.05, 0.95, size=x.size)
            resp0 = np.column_stack([1.0 - r, r])
        try:
            w, mu, sig, history, converged, iters = _em_once(x, resp0, cfg)
        except _RestartCollapse:
            failures += 1
            continue
        if best is None or history[-1] > best[3][-1]:
            best = (w, mu, sig, history, converged, iters)
    if best is None:
        raise RuntimeError(f"all {cfg.n_restarts} EM restarts collapsed")

    w, mu, sig, history, converged, iters = best
    order = np.argsort(sig)
    comps = tuple(Component(float(w[i]), float(mu[i]), float(sig[i])) for i in order)
    mix = GaussianMixture(comps)
    diag = FitDiagnostics(
        loglik=history[-1],
        iterations=iters,
        converged=converged,
        restarts_used=cfg.n_restarts - failures,
        loglik_history=tuple(history),
    )
    return mix, diag

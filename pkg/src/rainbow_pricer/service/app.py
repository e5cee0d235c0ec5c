"""HTTP facade over the pricing library.

Every endpoint is a stateless wrapper around one core module. Domain
errors surface as a machine-readable record naming the module that
raised them: input validation problems map to 422, numerical failures
to 500.
"""

from __future__ import annotations

import math

import numpy as np
from fastapi import FastAPI
from fastapi.responses import JSONResponse

from rainbow_pricer import __version__
from rainbow_pricer.copula import canonical_family, make_copula
from rainbow_pricer.fitgof import (
    SelectConfig,
    bootstrap_pvalue,
    fit_copula,
    pseudo_observations,
    select_copula,
)
from rainbow_pricer.market_data import align, log_returns, parse_price_csv, summary_stats
from rainbow_pricer.mixture import EmConfig, GaussianMixture, fit_em
from rainbow_pricer.pricing import (
    AssetLeg,
    MarketModel,
    OptionSpec,
    price_digital_closed,
    price_mc,
    price_quadrature,
    univariate_call_price,
)
from rainbow_pricer.reports import bundled_params, reproduce_tables, reproduction_to_csv
from rainbow_pricer.risk_neutral import calibrate_sdf, risk_neutralize
from rainbow_pricer.service import schemas as sc

__all__ = ["create_app"]


def _blame(exc: BaseException) -> str:
    """Name the library module whose frame raised the exception."""
    module = "service"
    tb = exc.__traceback__
    while tb is not None:
        name = tb.tb_frame.f_globals.get("__name__", "")
        if name.startswith("rainbow_pricer."):
            module = name.removeprefix("rainbow_pricer.").split(".")[0]
        tb = tb.tb_next
    return module


def _error_response(exc: Exception, status: int) -> JSONResponse:
    record = sc.ErrorRecord(module=_blame(exc), message=str(exc))
    return JSONResponse(status_code=status, content={"error": record.model_dump()})


def _clean(x: float | None) -> float | None:
    if x is None or (isinstance(x, float) and not math.isfinite(x)):
        return None
    return float(x)


def create_app() -> FastAPI:
    app = FastAPI(title="rainbow-pricer", version=__version__)

    @app.exception_handler(ValueError)
    async def _value_error(request, exc: ValueError):
        return _error_response(exc, 422)

    @app.exception_handler(RuntimeError)
    async def _runtime_error(request, exc: RuntimeError):
        return _error_response(exc, 500)

    @app.exception_handler(OverflowError)
    async def _overflow_error(request, exc: OverflowError):
        return _error_response(exc, 500)

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/ingest", response_model=sc.IngestResponse)
    def ingest(req: sc.IngestRequest) -> sc.IngestResponse:
        series = [parse_price_csv(a.content, a.asset_id, source=a.asset_id) for a in req.assets]
        if len(series) == 2:
            series = list(align(series[0], series[1]))
        rets = [log_returns(p) for p in series]
        out = []
        for p, r in zip(series, rets):
            s = summary_stats(r)
            out.append(
                sc.IngestAssetOut(
                    asset_id=p.asset_id,
                    n_prices=len(p),
                    first_date=p.dates[0].isoformat(),
                    last_date=p.dates[-1].isoformat(),
                    summary=sc.SummaryOut(
                        n=s.n, mean=s.mean, sd=s.sd, skewness=s.skewness, kurtosis=s.kurtosis
                    ),
                )
            )
        return sc.IngestResponse(
            assets=out,
            aligned_n=len(rets[0]),
            returns=[list(r.values) for r in rets],
        )

    @app.post("/margins/fit", response_model=sc.FitMarginsResponse)
    def margins_fit(req: sc.FitMarginsRequest) -> sc.FitMarginsResponse:
        cfg = EmConfig(**req.config.model_dump())
        mixture, diag = fit_em(np.asarray(req.returns, dtype=float), cfg)
        mean, sd, skew, kurt = mixture.moments()
        return sc.FitMarginsResponse(
            mixture=mixture.to_dict(),
            diagnostics=sc.DiagnosticsOut(
                loglik=diag.loglik,
                iterations=diag.iterations,
                converged=diag.converged,
                restarts_used=diag.restarts_used,
            ),
            moments=sc.MomentsOut(mean=mean, variance=sd * sd, skewness=skew, kurtosis=kurt),
        )

    @app.post("/sdf/calibrate", response_model=sc.CalibrateResponse)
    def sdf_calibrate(req: sc.CalibrateRequest) -> sc.CalibrateResponse:
        m = GaussianMixture.from_dict(req.mixture.as_dict())
        sdf = calibrate_sdf(m, req.rate)
        rn = risk_neutralize(m, sdf.alpha, req.rate)
        return sc.CalibrateResponse(
            alpha=sdf.alpha, beta=sdf.beta, rate=req.rate, risk_neutral=rn.to_dict()
        )

    @app.post("/copula/fit", response_model=sc.FitCopulaResponse)
    def copula_fit(req: sc.FitCopulaRequest) -> sc.FitCopulaResponse:
        u = np.asarray(req.data, dtype=float)
        if req.pseudo:
            u = pseudo_observations(u)
        fit = fit_copula(u, req.family)
        return sc.FitCopulaResponse(
            family=fit.copula.family,
            params=list(fit.copula.params),
            loglik=fit.loglik,
            boundary=fit.boundary,
            n=u.shape[0],
        )

    @app.post("/gof", response_model=sc.GofResponse)
    def gof(req: sc.GofRequest) -> sc.GofResponse:
        u = np.asarray(req.data, dtype=float)
        if req.pseudo:
            u = pseudo_observations(u)
        fit = fit_copula(u, req.family)
        rep = bootstrap_pvalue(u, req.family, req.bootstrap, req.seed)
        return sc.GofResponse(
            family=fit.copula.family,
            params=list(fit.copula.params),
            statistic=rep.statistic,
            p_value=rep.p_value,
            bootstrap_reps=rep.bootstrap_reps,
            seed=rep.seed,
            failures=rep.failures,
        )

    @app.post("/copula/select", response_model=sc.SelectResponse)
    def copula_select(req: sc.SelectRequest) -> sc.SelectResponse:
        report = select_copula(
            np.asarray(req.data, dtype=float),
            req.families,
            SelectConfig(bootstrap=req.bootstrap, seed=req.seed),
        )
        entries = [
            sc.SelectEntryOut(
                family=e.family,
                params=list(e.params),
                loglik=_clean(e.loglik),
                aic=_clean(e.aic),
                bic=_clean(e.bic),
                cvm=_clean(e.cvm),
                p_value=_clean(e.p_value),
                boundary=e.boundary,
                error=e.error,
            )
            for e in report.entries
        ]
        return sc.SelectResponse(n=report.n, entries=entries, rankings=report.rankings)

    @app.post("/price", response_model=sc.PriceResponse)
    def price(req: sc.PriceRequest) -> sc.PriceResponse:
        if req.kind not in sc.KINDS:
            raise ValueError(f"unknown option kind {req.kind!r}")
        if req.kind == "spread" and len(req.assets) != 2:
            raise ValueError("spread option needs exactly 2 assets")
        legs, alphas = [], []
        for a in req.assets:
            m = GaussianMixture.from_dict(a.mixture.as_dict())
            alpha = a.alpha if a.alpha is not None else calibrate_sdf(m, req.rate).alpha
            legs.append(AssetLeg(a.spot, risk_neutralize(m, alpha, req.rate)))
            alphas.append(alpha)
        cop = None
        if len(legs) == 2:
            if req.copula is None:
                raise ValueError("two-asset pricing needs a copula")
            cop = make_copula(canonical_family(req.copula.family), tuple(req.copula.params))
        model = MarketModel(assets=tuple(legs), copula=cop, rate=req.rate, tau=req.tau)
        if req.kind == "digital":
            spec = OptionSpec(kind="digital", strikes=tuple(req.strikes or ()))
        else:
            if req.strike is None:
                raise ValueError(f"{req.kind} option needs --strike")
            spec = OptionSpec(kind=req.kind, strike=req.strike)
        mc = price_mc(model, spec, n=req.n, seed=req.seed)
        reference = None
        if req.kind == "digital":
            reference = price_digital_closed(model, spec).to_dict()
        elif len(legs) == 2:
            reference = price_quadrature(model, spec).to_dict()
        elif req.kind in ("call_max", "call_min"):
            # single asset: max/min reduce to a plain univariate call
            ref_price = univariate_call_price(legs[0], req.rate, spec.strike, req.tau)
            reference = {
                "price": ref_price,
                "std_error": 0.0,
                "n": 0,
                "seed": req.seed,
                "method": "closed_form",
                "shards": 1,
            }
        return sc.PriceResponse(kind=req.kind, alpha=alphas, mc=mc.to_dict(), reference=reference)

    @app.post("/tables/reproduce", response_model=sc.ReproduceResponse)
    def tables_reproduce(req: sc.ReproduceRequest) -> sc.ReproduceResponse:
        params = req.params if req.params is not None else bundled_params()
        result = reproduce_tables(params, n=req.n, seed=req.seed)
        return sc.ReproduceResponse(result=result, csv=reproduction_to_csv(result, params))

    return app

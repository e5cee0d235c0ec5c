"""Request and response models for the pricing service.

The service is stateless: every request carries its full inputs, and
model parameters travel in the same dict shapes the core library uses
(``GaussianMixture.to_dict`` / ``Copula.to_dict``).
"""

from __future__ import annotations

from pydantic import BaseModel, Field

KINDS = ("spread", "call_max", "call_min", "digital")


class ComponentIn(BaseModel):
    p: float
    mu: float
    sigma: float


class MixtureIn(BaseModel):
    components: list[ComponentIn] = Field(min_length=1)

    def as_dict(self) -> dict:
        return {"components": [c.model_dump() for c in self.components]}


class CopulaIn(BaseModel):
    family: str
    params: list[float] = []


class IngestAsset(BaseModel):
    asset_id: str
    content: str  # CSV text with header date,close


class IngestRequest(BaseModel):
    assets: list[IngestAsset] = Field(min_length=1, max_length=2)


class SummaryOut(BaseModel):
    n: int
    mean: float
    sd: float
    skewness: float
    kurtosis: float


class IngestAssetOut(BaseModel):
    asset_id: str
    n_prices: int
    first_date: str
    last_date: str
    summary: SummaryOut


class IngestResponse(BaseModel):
    assets: list[IngestAssetOut]
    aligned_n: int
    returns: list[list[float]]  # one row of log returns per asset, aligned


class EmConfigIn(BaseModel):
    max_iter: int = 500
    tol: float = 1e-10
    n_restarts: int = 5
    seed: int = 0


class FitMarginsRequest(BaseModel):
    returns: list[float] = Field(min_length=10)
    config: EmConfigIn = EmConfigIn()


class DiagnosticsOut(BaseModel):
    loglik: float
    iterations: int
    converged: bool
    restarts_used: int


class MomentsOut(BaseModel):
    mean: float
    variance: float
    skewness: float
    kurtosis: float


class FitMarginsResponse(BaseModel):
    mixture: dict
    diagnostics: DiagnosticsOut
    moments: MomentsOut


class CalibrateRequest(BaseModel):
    mixture: MixtureIn
    rate: float


class CalibrateResponse(BaseModel):
    alpha: float
    beta: float
    rate: float
    risk_neutral: dict


class FitCopulaRequest(BaseModel):
    data: list[list[float]] = Field(min_length=2)
    family: str
    pseudo: bool = True  # rank-transform the data before fitting


class FitCopulaResponse(BaseModel):
    family: str
    params: list[float]
    loglik: float
    boundary: bool
    n: int


class GofRequest(BaseModel):
    data: list[list[float]] = Field(min_length=2)
    family: str
    bootstrap: int = 200
    seed: int = 42
    pseudo: bool = True


class GofResponse(BaseModel):
    family: str
    params: list[float]
    statistic: float
    p_value: float
    bootstrap_reps: int
    seed: int
    failures: int


class SelectRequest(BaseModel):
    data: list[list[float]] = Field(min_length=2)
    families: list[str] = Field(min_length=2)
    bootstrap: int = 0
    seed: int = 42


class SelectEntryOut(BaseModel):
    family: str
    params: list[float]
    loglik: float | None = None
    aic: float | None = None
    bic: float | None = None
    cvm: float | None = None
    p_value: float | None = None
    boundary: bool = False
    error: str | None = None


class SelectResponse(BaseModel):
    n: int
    entries: list[SelectEntryOut]
    rankings: dict[str, list[str]]


class PriceAsset(BaseModel):
    spot: float
    mixture: MixtureIn
    alpha: float | None = None  # omitted: solved from the mixture at `rate`


class PriceRequest(BaseModel):
    assets: list[PriceAsset] = Field(min_length=1, max_length=2)
    rate: float
    copula: CopulaIn | None = None  # required when two assets are given
    kind: str
    strike: float | None = None
    strikes: list[float] | None = None
    n: int = 100_000
    seed: int = 42
    tau: float = 1.0


class PriceResponse(BaseModel):
    kind: str
    alpha: list[float]
    mc: dict
    reference: dict | None = None  # quadrature or closed form, two-asset only


class ReproduceRequest(BaseModel):
    params: dict | None = None  # omitted: the bundled parameter file
    n: int = 100_000
    seed: int = 42


class ReproduceResponse(BaseModel):
    result: dict
    csv: dict[str, str]


class ErrorRecord(BaseModel):
    module: str
    message: str

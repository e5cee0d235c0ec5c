"""Mixture margins, SDF risk neutralization, copulas, rainbow pricing."""

from rainbow_pricer.copula import (
    FAMILIES,
    Copula,
    canonical_family,
    make_copula,
    pickands,
)
from rainbow_pricer.fitgof import (
    CopulaFit,
    FamilySelection,
    GofReport,
    IfmResult,
    SelectConfig,
    SelectionReport,
    bootstrap_pvalue,
    cvm_statistic,
    empirical_copula,
    fit_copula,
    fit_ifm,
    information_criteria,
    pseudo_observations,
    select_copula,
)
from rainbow_pricer.market_data import (
    PriceSeries,
    ReturnSeries,
    SummaryStats,
    align,
    load_price_csv,
    log_returns,
    parse_price_csv,
    summary_stats,
)
from rainbow_pricer.mixture import Component, EmConfig, FitDiagnostics, GaussianMixture, fit_em
from rainbow_pricer.pricing import (
    AssetLeg,
    MarketModel,
    OptionSpec,
    PricingResult,
    price_digital_closed,
    price_mc,
    price_quadrature,
    univariate_call_price,
)
from rainbow_pricer.risk_neutral import (
    RiskNeutralMixture,
    SdfParams,
    calibrate_sdf,
    mixture_call_relative,
    put_from_parity,
    risk_neutralize,
)

__version__ = "0.1.0"

__all__ = [
    "PriceSeries",
    "ReturnSeries",
    "SummaryStats",
    "align",
    "load_price_csv",
    "parse_price_csv",
    "log_returns",
    "summary_stats",
    "Component",
    "EmConfig",
    "FitDiagnostics",
    "GaussianMixture",
    "fit_em",
    "SdfParams",
    "RiskNeutralMixture",
    "calibrate_sdf",
    "risk_neutralize",
    "mixture_call_relative",
    "put_from_parity",
    "Copula",
    "FAMILIES",
    "canonical_family",
    "make_copula",
    "pickands",
    "CopulaFit",
    "IfmResult",
    "GofReport",
    "FamilySelection",
    "SelectionReport",
    "SelectConfig",
    "pseudo_observations",
    "empirical_copula",
    "cvm_statistic",
    "fit_copula",
    "fit_ifm",
    "bootstrap_pvalue",
    "information_criteria",
    "select_copula",
    "AssetLeg",
    "MarketModel",
    "OptionSpec",
    "PricingResult",
    "price_mc",
    "price_quadrature",
    "price_digital_closed",
    "univariate_call_price",
    "__version__",
]

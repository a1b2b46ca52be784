"""Fitting the model to comment data."""

from .clsq import ClsqResult, fit_beta_constrained_lsq
from .diagnostics import (
    ResidualDiagnostics,
    jarque_bera,
    qq_points,
    residual_diagnostics,
    residual_histogram,
)
from .regression import (
    LinearFit,
    NullLinearFit,
    PowerLawFit,
    correlate_x_beta,
    fit_null_linear,
    fit_power_law,
    gaussian_aic,
    null_linear_ols,
    ols,
    power_law_ols,
)
from .strategies import (
    ArticleBeta,
    BetaEstimate,
    BetaEstimation,
    StrategyEstimate,
    beta_contribution,
    estimate_beta,
    estimate_betas,
    estimate_strategies,
)

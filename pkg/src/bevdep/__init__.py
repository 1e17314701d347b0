"""Bayesian nonparametric inference for bivariate extremal dependence.

The angular measure and Pickands dependence function are modelled as
Bernstein polynomials of random order, sampled by trans-dimensional MCMC.
"""

from .extremal import (AngularCoefficients, InvalidCoefficientsError, PickandsCoefficients,
                       angular_cdf, angular_density, beta_to_eta, chi, eta_to_beta,
                       exceedance_prob, pickands, pickands_d1, pickands_d2, stable_tail_L,
                       tail_dep_R, validate_angular, validate_pickands)
from .likelihood import FrechetSample, log_density, log_likelihood, max_stable_cdf
from .margins import GevParams, gev_cdf, gev_fit_mle, gev_quantile, to_unit_frechet
from .mcmc import ChainOutput, McmcConfig, run, run_chains
from .models import (AsymmetricLogistic, ExtremalT, HuslerReiss, SymmetricLogistic, parse_model,
                     sample_bivariate, true_point_masses)
from .prior import NegBinPrior, PoissonPrior, sample_eta
from .summary import (PosteriorSummary, conditional_exceedance, posterior_mean_ise,
                      predictive_exceedance, summarize)

__version__ = "0.1.0"

__all__ = [
    "AngularCoefficients",
    "InvalidCoefficientsError",
    "PickandsCoefficients",
    "angular_cdf",
    "angular_density",
    "beta_to_eta",
    "chi",
    "eta_to_beta",
    "exceedance_prob",
    "pickands",
    "pickands_d1",
    "pickands_d2",
    "stable_tail_L",
    "tail_dep_R",
    "validate_angular",
    "validate_pickands",
    "FrechetSample",
    "log_density",
    "log_likelihood",
    "max_stable_cdf",
    "GevParams",
    "gev_cdf",
    "gev_fit_mle",
    "gev_quantile",
    "to_unit_frechet",
    "ChainOutput",
    "McmcConfig",
    "run",
    "run_chains",
    "AsymmetricLogistic",
    "ExtremalT",
    "HuslerReiss",
    "SymmetricLogistic",
    "parse_model",
    "sample_bivariate",
    "true_point_masses",
    "NegBinPrior",
    "PoissonPrior",
    "sample_eta",
    "PosteriorSummary",
    "conditional_exceedance",
    "posterior_mean_ise",
    "predictive_exceedance",
    "summarize",
]

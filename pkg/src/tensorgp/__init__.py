"""Exact Gaussian process regression on factorial designs.

The covariance of a full grid factorises as a Kronecker product of small
per-factor matrices, so training and prediction work through per-factor
eigendecompositions and tensor contractions instead of an ``N x N`` solve.
"""

from .estimator import TensorGPRegressor
from .exceptions import InputError, NumericalError, OptimizerError, ParseError, TensorGPError
from .hyperopt import OptimizerConfig, PriorSpec, compute_bounds, log_prior, optimize
from .inference import (
    FittedModel,
    TrainingData,
    fit,
    log_marginal_likelihood,
    log_marginal_likelihood_grad,
    predict_mean,
    predict_variance,
)
from .kernels import Factor, FactorialDesign, HyperParams, materialize_design

__version__ = "0.1.0"

__all__ = [
    "Factor",
    "FactorialDesign",
    "FittedModel",
    "HyperParams",
    "InputError",
    "NumericalError",
    "OptimizerConfig",
    "OptimizerError",
    "ParseError",
    "PriorSpec",
    "TensorGPError",
    "TensorGPRegressor",
    "TrainingData",
    "compute_bounds",
    "fit",
    "log_marginal_likelihood",
    "log_marginal_likelihood_grad",
    "log_prior",
    "materialize_design",
    "optimize",
    "predict_mean",
    "predict_variance",
]

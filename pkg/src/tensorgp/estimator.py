"""scikit-learn compatible front end."""

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .hyperopt import OptimizerConfig, PriorSpec, optimize
from .inference import TrainingData, predict_mean, predict_variance
from .kernels import FactorialDesign


class TensorGPRegressor(RegressorMixin, BaseEstimator):
    """Exact Gaussian process regression on a complete factorial grid.

    ``fit`` accepts the grid as an ordinary ``(N, d)`` design matrix in any
    row order; the factorial structure is recovered from the distinct
    values of each column group. Training and prediction never build an
    ``N x N`` matrix.

    Parameters
    ----------
    factor_dims : sequence of int, optional
        How consecutive input columns group into factors. Default: every
        column is its own one-dimensional factor.
    prior : bool, default=True
        Use the Beta prior on inverse length-scales (``tensorGP-reg``).
        ``False`` maximises the plain marginal likelihood (``tensorGP``).
    alpha, beta : float, default=2.0
        Beta prior shape parameters.
    c, C : float, default=0.5, 100.0
        Bound multipliers: length-scales are confined to
        ``[c * min_gap, C * max_gap]`` per coordinate.
    restarts : int, default=3
    max_iters : int, default=200
    grad_tol : float, default=1e-5
    init : {"default", "adversarial"}, default="default"
    random_state : int, default=0

    Attributes
    ----------
    model_ : FittedModel
    design_ : FactorialDesign
    length_scales_ : list of ndarray
    log_marginal_likelihood_value_ : float
    """

    def __init__(self, factor_dims=None, prior=True, alpha=2.0, beta=2.0, c=0.5, C=100.0,
                 restarts=3, max_iters=200, grad_tol=1e-5, init="default", random_state=0):
        self.factor_dims = factor_dims
        self.prior = prior
        self.alpha = alpha
        self.beta = beta
        self.c = c
        self.C = C
        self.restarts = restarts
        self.max_iters = max_iters
        self.grad_tol = grad_tol
        self.init = init
        self.random_state = random_state

    def _spec(self):
        return PriorSpec(self.alpha, self.beta, self.c, self.C, enabled=bool(self.prior))

    def _config(self):
        return OptimizerConfig(max_iters=self.max_iters, grad_tol=self.grad_tol,
                               restarts=self.restarts, seed=self.random_state, init=self.init)

    def fit(self, X, y):
        X, y = check_X_y(X, y, y_numeric=True)
        design, order = FactorialDesign.from_points(X, self.factor_dims)
        return self._fit_data(TrainingData.from_values(design, y[order]))

    def fit_grid(self, factors, Y):
        """Fit from explicit factor levels and a response tensor of matching shape."""
        design = FactorialDesign(factors)
        return self._fit_data(TrainingData.from_values(design, np.asarray(Y, dtype=float)))

    def _fit_data(self, data):
        self.design_ = data.design
        self.n_features_in_ = data.design.dim
        self.model_ = optimize(data, self._spec(), self._config())
        self.length_scales_ = self.model_.params.length_scales
        self.log_marginal_likelihood_value_ = self.model_.loglik
        return self

    def predict(self, X, return_std=False):
        check_is_fitted(self, "model_")
        X = check_array(X)
        mean = predict_mean(self.model_, X)
        if return_std:
            return mean, np.sqrt(predict_variance(self.model_, X))
        return mean

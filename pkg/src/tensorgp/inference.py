"""Exact GP inference on a complete factorial grid.

Everything here works on the response tensor ``Y`` of shape
``(n_1, ..., n_K)`` and never forms an ``N x N`` matrix. With
``K_i = U_i diag(d_i) U_i^T`` the solve ``K_y^{-1} y`` becomes two sweeps
of mode products and an entrywise division by the eigenvalue tensor ``D``,
so one likelihood evaluation costs ``O(sum n_k^3 + N sum n_k)``.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .exceptions import InputError, NumericalError
from .kernels import (
    JITTER,
    FactorialDesign,
    HyperParams,
    cross_covariance,
    factor_covariance,
    factor_covariance_grad,
)
from .spectral import build_eigen_tensor, log_det_from_tensor, sym_eig
from .tensor import inner, multi_mode_product, unfold

PREDICT_CHUNK = 256
VARIANCE_CLAMP = 1e-10
LOG_2PI = math.log(2.0 * math.pi)


@dataclass
class TrainingData:
    """Centred responses on a factorial design.

    Parameters
    ----------
    design : FactorialDesign
    y : ndarray of shape ``design.shape``
        Responses with their sample mean removed.
    y_mean : float
        The removed offset, added back by the predictors.
    """

    design: FactorialDesign
    y: np.ndarray
    y_mean: float = 0.0

    def __post_init__(self):
        self.y = np.asarray(self.y, dtype=float)
        if self.y.shape != self.design.shape:
            if self.y.size != self.design.size:
                raise InputError(
                    f"{self.y.size} responses for a design with {self.design.size} points"
                )
            self.y = self.y.reshape(self.design.shape)
        if not np.all(np.isfinite(self.y)):
            raise InputError("responses must be finite")
        self.y_mean = float(self.y_mean)

    @classmethod
    def from_values(cls, design, values, center=True):
        """Build from raw responses in canonical order, removing their mean."""
        values = np.asarray(values, dtype=float)
        if values.size != design.size:
            raise InputError(f"{values.size} responses for a design with {design.size} points")
        offset = float(np.mean(values)) if center else 0.0
        return cls(design, (values - offset).reshape(design.shape), offset)

    @property
    def values(self):
        """Responses on the original scale."""
        return self.y + self.y_mean


@dataclass
class FittedModel:
    data: TrainingData
    params: HyperParams
    eig: list
    D: np.ndarray
    alpha: np.ndarray
    loglik: float
    diagnostics: dict = field(default_factory=dict)

    @property
    def design(self):
        return self.data.design

    @property
    def noise_var(self):
        return self.params.noise_variance()


def factor_matrices(design, params):
    params.check(design)
    return [
        factor_covariance(f, params.theta[k], params.factor_amplitude(k))
        for k, f in enumerate(design.factors)
    ]


def _spectral_solve(y, eig, D):
    rotated = multi_mode_product(y, [e.u for e in eig])
    return multi_mode_product(rotated / D, [e.u.T for e in eig])


def solve_ky(data, params, mats=None):
    """Return ``(alpha, eig, D)`` with ``vec(alpha) = K_y^{-1} vec(y)``."""
    if mats is None:
        mats = factor_matrices(data.design, params)
    eig = [sym_eig(k) for k in mats]
    D = build_eigen_tensor([e.d for e in eig], params.noise_variance())
    if np.min(D) <= 0:
        log_det_from_tensor(D)  # raises with the offending index
    return _spectral_solve(data.y, eig, D), eig, D


def _loglik(y, alpha, D):
    return -0.5 * inner(y, alpha) - 0.5 * log_det_from_tensor(D) - 0.5 * y.size * LOG_2PI


def log_marginal_likelihood(data, params):
    alpha, _, D = solve_ky(data, params)
    return _loglik(data.y, alpha, D)


def _partial_contraction(t, vecs, skip):
    """Contract every axis of ``t`` except ``skip`` with the given vectors."""
    mats = [None if k == skip else v[:, None] for k, v in enumerate(vecs)]
    return multi_mode_product(t, mats).ravel()


def loglik_and_grad(data, params):
    """Log marginal likelihood and its gradient.

    The gradient is ordered like :meth:`HyperParams.to_vector`: every
    ``theta`` component factor by factor, then ``sigma_f``, then
    ``sigma_noise``.
    """
    design = data.design
    mats = factor_matrices(design, params)
    alpha, eig, D = solve_ky(data, params, mats)
    value = _loglik(data.y, alpha, D)

    inv_d = 1.0 / D
    ds = [e.d for e in eig]
    grad = []
    for i, f in enumerate(design.factors):
        # quadratic term: <alpha, alpha x_k K_k (k != i) x_i dK_i>
        others = multi_mode_product(alpha, [None if k == i else m for k, m in enumerate(mats)])
        cross = unfold(others, i).T @ unfold(alpha, i)
        # trace term: <1/D, d_1 o ... o diag(U_i^T dK_i U_i) o ... o d_K>
        weights = _partial_contraction(inv_d, ds, i)
        u = eig[i].u
        for j in range(f.dim):
            dk = factor_covariance_grad(f, params.theta[i], params.factor_amplitude(i), j)
            quad = np.sum(cross * dk)
            trace = weights @ np.einsum("pa,pq,qa->a", u, dk, u)
            grad.append(0.5 * quad - 0.5 * trace)

    s2 = params.noise_variance()
    aa = inner(alpha, alpha)
    tr_inv = float(np.sum(inv_d))
    # dK_y/dsigma_f = (2 / sigma_f) K_f, plus the jitter term when the floor is active
    akfa = inner(alpha, data.y) - s2 * aa
    tr_kf = float(np.sum((D - s2) * inv_d))
    g_sf = (akfa - tr_kf) / params.sigma_f
    if params.sigma_noise**2 < JITTER * params.sigma_f**2:
        g_sf += JITTER * params.sigma_f * (aa - tr_inv)
    g_sn = params.sigma_noise * (aa - tr_inv)
    grad.extend([g_sf, g_sn])
    return value, np.array(grad)


def log_marginal_likelihood_grad(data, params):
    return loglik_and_grad(data, params)[1]


def fit(data, params, diagnostics=None):
    """Solve for ``alpha`` at fixed hyperparameters and bundle the result."""
    alpha, eig, D = solve_ky(data, params)
    return FittedModel(
        data=data,
        params=params,
        eig=eig,
        D=D,
        alpha=alpha,
        loglik=_loglik(data.y, alpha, D),
        diagnostics=dict(diagnostics or {}),
    )


def _chain_contract(t, mats):
    """``out[m] = sum_i t[i_1..i_K] prod_k mats[k][i_k, m]``."""
    r = np.tensordot(mats[0], t, axes=([0], [0]))  # (m, n_2, ..., n_K)
    for b in mats[1:]:
        r = np.einsum("mi...,im->m...", r, b)
    return r


def _prepare(model, x):
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    x = x.reshape(1, -1) if single else x
    if x.ndim != 2 or x.shape[1] != model.design.dim:
        raise InputError(
            f"query points must have {model.design.dim} columns, got shape {np.shape(x)}"
        )
    return x, single


def _cross(model, x):
    p = model.params
    return [
        cross_covariance(f, p.theta[k], p.factor_amplitude(k), part)
        for k, (f, part) in enumerate(zip(model.design.factors, model.design.split(x)))
    ]


def _mean_chunk(model, x):
    return _chain_contract(model.alpha, _cross(model, x)) + model.data.y_mean


def _var_chunk(model, x):
    ws = [(e.u.T @ k) ** 2 for e, k in zip(model.eig, _cross(model, x))]
    sf2 = model.params.sigma_f**2
    var = sf2 - _chain_contract(1.0 / model.D, ws)
    if np.min(var, initial=0.0) < -VARIANCE_CLAMP * sf2:
        raise NumericalError(
            f"posterior variance {np.min(var):.3e} is negative beyond round-off"
        )
    return np.maximum(var, 0.0)


def _chunked(fn, model, x):
    x, single = _prepare(model, x)
    out = np.concatenate(
        [fn(model, x[a:a + PREDICT_CHUNK]) for a in range(0, len(x), PREDICT_CHUNK)]
    ) if len(x) else np.empty(0)
    return float(out[0]) if single else out


def predict_mean(model, x):
    """Posterior mean at one point (length ``d``) or a batch ``(m, d)``."""
    return _chunked(_mean_chunk, model, x)


def predict_variance(model, x):
    """Posterior variance of the latent function (noise excluded)."""
    return _chunked(_var_chunk, model, x)

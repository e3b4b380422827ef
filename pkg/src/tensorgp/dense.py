"""Plain O(N^3) Gaussian process on materialised points.

Used as the exactness reference for the structured code and as the
``denseGP`` baseline in benchmarks. It shares nothing with the Kronecker
path except the design enumeration and the jitter policy.
"""

import math

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .exceptions import InputError, NumericalError
from .kernels import JITTER, materialize_design

DENSE_CAP = 4096


def _se(xa, xb, theta, sigma_f):
    diff2 = (xa[:, None, :] - xb[None, :, :]) ** 2
    return sigma_f**2 * np.exp(-(diff2 @ theta**2))


class DenseGP:
    """Dense GP with a global ARD squared exponential kernel.

    Parameters
    ----------
    x : ndarray (N, d)
    y : ndarray (N,)
        Centred responses.
    theta : ndarray (d,)
        Inverse length-scales for every input column.
    sigma_f, sigma_noise : float
    y_mean : float, optional
        Offset added back to predictions.
    """

    def __init__(self, x, y, theta, sigma_f, sigma_noise, y_mean=0.0, cap=DENSE_CAP):
        self.x = np.atleast_2d(np.asarray(x, dtype=float))
        self.y = np.asarray(y, dtype=float).ravel()
        if len(self.x) > cap:
            raise InputError(f"dense GP limited to {cap} points, got {len(self.x)}")
        self.theta = np.asarray(theta, dtype=float).ravel()
        self.sigma_f = float(sigma_f)
        self.sigma_noise = float(sigma_noise)
        self.y_mean = float(y_mean)
        s2 = self.sigma_noise**2
        self.jittered = s2 < JITTER * self.sigma_f**2
        self.noise_var = s2 + JITTER * self.sigma_f**2 if self.jittered else s2

        self.k_f = _se(self.x, self.x, self.theta, self.sigma_f)
        self.k_y = self.k_f + self.noise_var * np.eye(len(self.x))
        try:
            self._chol = cho_factor(self.k_y, lower=True)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"dense covariance not positive definite: {exc}") from exc
        self.alpha = self._refine(cho_solve(self._chol, self.y), self.y)

    def _refine(self, x, rhs, steps=2):
        # iterative refinement with residuals in extended precision; on an
        # ill-conditioned K_y it recovers digits a single Cholesky solve loses
        k = self.k_y.astype(np.longdouble)
        rhs_ext = np.asarray(rhs, dtype=np.longdouble)
        for _ in range(steps):
            r = (rhs_ext - k @ x.astype(np.longdouble)).astype(float)
            x = x + cho_solve(self._chol, r)
        return x

    @classmethod
    def from_data(cls, data, params, cap=DENSE_CAP):
        """Materialise a :class:`~tensorgp.inference.TrainingData` grid."""
        if data.design.size > cap:
            raise InputError(f"dense GP limited to {cap} points, got {data.design.size}")
        x = materialize_design(data.design)
        return cls(x, data.y.ravel(), params.to_vector()[:-2], params.sigma_f,
                   params.sigma_noise, data.y_mean, cap)

    def log_det(self):
        return 2.0 * float(np.sum(np.log(np.diag(self._chol[0]))))

    def loglik(self):
        n = len(self.y)
        return float(-0.5 * self.y @ self.alpha - 0.5 * self.log_det() - 0.5 * n * math.log(2 * math.pi))

    def _grad_term(self, dk, k_inv):
        return 0.5 * self.alpha @ dk @ self.alpha - 0.5 * np.sum(k_inv * dk)

    def grad(self):
        """Gradient over ``[theta..., sigma_f, sigma_noise]``."""
        n = len(self.y)
        k_inv = cho_solve(self._chol, np.eye(n))
        out = []
        for j, t in enumerate(self.theta):
            diff2 = (self.x[:, None, j] - self.x[None, :, j]) ** 2
            out.append(self._grad_term(self.k_f * (-2.0 * t * diff2), k_inv))
        d_sf = 2.0 / self.sigma_f * self.k_f
        if self.jittered:
            d_sf = d_sf + 2.0 * JITTER * self.sigma_f * np.eye(n)
        out.append(self._grad_term(d_sf, k_inv))
        out.append(self._grad_term(2.0 * self.sigma_noise * np.eye(n), k_inv))
        return np.array(out)

    def predict(self, xs):
        """Posterior mean and latent variance at ``xs`` of shape (m, d)."""
        xs = np.atleast_2d(np.asarray(xs, dtype=float))
        ks = _se(self.x, xs, self.theta, self.sigma_f)
        mean = ks.T @ self.alpha + self.y_mean
        v = cho_solve(self._chol, ks)
        var = self.sigma_f**2 - np.sum(ks * v, axis=0)
        return mean, var


def dense_gp_oracle(data, params, cap=DENSE_CAP):
    return DenseGP.from_data(data, params, cap)


def dense_loglik_and_grad(data, params):
    gp = DenseGP.from_data(data, params)
    return gp.loglik(), gp.grad()

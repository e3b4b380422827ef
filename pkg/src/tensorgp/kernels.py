"""Factorial designs and the per-factor squared exponential covariance.

A factorial design is the Cartesian product of K factors, factor ``k``
being ``n_k`` distinct points in ``R^{d_k}``. With a product kernel the
covariance matrix of the full grid is the Kronecker product of the small
per-factor matrices, which is what the rest of the package exploits.

Amplitude convention: only the product of per-factor amplitudes is
identifiable, so a single global ``sigma_f`` is carried by factor 0 and
every other factor has unit amplitude.
"""

from dataclasses import dataclass
import itertools

import numpy as np

from .exceptions import InputError

DEFAULT_MATERIALIZE_CAP = 10**6

# Relative jitter floor on the noise variance (times sigma_f**2).
JITTER = 1e-10


class Factor:
    """One factor of a factorial design.

    Parameters
    ----------
    points : array_like, shape (n_k,) or (n_k, d_k)
        Levels of the factor. One-dimensional input is treated as ``d_k = 1``.
    """

    def __init__(self, points):
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise InputError(f"factor points must be an (n, d) array, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise InputError("factor points must be finite")
        if len(np.unique(pts, axis=0)) != len(pts):
            raise InputError("duplicate level in factor")
        pts.setflags(write=False)
        self.points = pts

    @property
    def size(self):
        return self.points.shape[0]

    @property
    def dim(self):
        return self.points.shape[1]

    def __repr__(self):
        return f"Factor(n={self.size}, d={self.dim})"

    def __eq__(self, other):
        return isinstance(other, Factor) and np.array_equal(self.points, other.points)


class FactorialDesign:
    """Cartesian product of an ordered list of :class:`Factor` objects."""

    def __init__(self, factors):
        self.factors = tuple(f if isinstance(f, Factor) else Factor(f) for f in factors)
        if not self.factors:
            raise InputError("a design needs at least one factor")

    @property
    def shape(self):
        return tuple(f.size for f in self.factors)

    @property
    def dims(self):
        return tuple(f.dim for f in self.factors)

    @property
    def size(self):
        return int(np.prod(self.shape))

    @property
    def dim(self):
        return sum(self.dims)

    def __len__(self):
        return len(self.factors)

    def __repr__(self):
        return f"FactorialDesign(shape={self.shape}, dims={self.dims})"

    def split(self, x):
        """Split points of shape ``(m, d)`` into the per-factor blocks."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if x.shape[1] != self.dim:
            raise InputError(f"points have {x.shape[1]} columns, design has dimension {self.dim}")
        edges = np.cumsum((0,) + self.dims)
        return [x[:, a:b] for a, b in zip(edges[:-1], edges[1:])]

    @classmethod
    def from_points(cls, x, factor_dims=None):
        """Recover the factorial structure of a scattered point set.

        Returns ``(design, order)`` where ``order[i]`` is the row of ``x``
        placed at canonical position ``i``. Raises :class:`InputError`
        unless ``x`` is exactly a complete grid.
        """
        x = np.atleast_2d(np.asarray(x, dtype=float))
        n, d = x.shape
        if factor_dims is None:
            factor_dims = (1,) * d
        factor_dims = tuple(int(k) for k in factor_dims)
        if sum(factor_dims) != d or min(factor_dims) < 1:
            raise InputError(f"factor dimensions {factor_dims} do not partition {d} inputs")
        edges = np.cumsum((0,) + factor_dims)
        levels, codes = [], []
        for a, b in zip(edges[:-1], edges[1:]):
            lv, inv = np.unique(x[:, a:b], axis=0, return_inverse=True)
            levels.append(lv)
            codes.append(np.ravel(inv))
        shape = tuple(len(lv) for lv in levels)
        if int(np.prod(shape)) != n:
            raise InputError(
                f"{n} points do not form a complete grid over factor sizes {shape}"
            )
        flat = np.ravel_multi_index(codes, shape)
        if len(np.unique(flat)) != n:
            raise InputError("point set is not a complete factorial grid (repeated cells)")
        order = np.empty(n, dtype=int)
        order[flat] = np.arange(n)
        return cls([Factor(lv) for lv in levels]), order


def materialize_design(design, cap=DEFAULT_MATERIALIZE_CAP):
    """All ``N`` grid points as an ``(N, d)`` array, last factor varying fastest."""
    if design.size > cap:
        raise InputError(f"design has {design.size} points, above the materialisation cap {cap}")
    rows = [
        np.concatenate(parts)
        for parts in itertools.product(*(f.points for f in design.factors))
    ]
    return np.array(rows).reshape(design.size, design.dim)


@dataclass
class HyperParams:
    """Kernel hyperparameters.

    ``theta[k]`` holds the inverse length-scales of factor ``k``.
    """

    theta: list
    sigma_f: float = 1.0
    sigma_noise: float = 1e-2

    def __post_init__(self):
        self.theta = [np.atleast_1d(np.asarray(t, dtype=float)).copy() for t in self.theta]
        self.sigma_f = float(self.sigma_f)
        self.sigma_noise = float(self.sigma_noise)
        if any(np.any(t <= 0) or not np.all(np.isfinite(t)) for t in self.theta):
            raise InputError("all theta components must be positive and finite")
        if not self.sigma_f > 0:
            raise InputError("sigma_f must be positive")
        if not self.sigma_noise >= 0:
            raise InputError("sigma_noise must be non-negative")

    @property
    def length_scales(self):
        return [1.0 / t for t in self.theta]

    @property
    def n_params(self):
        return sum(t.size for t in self.theta) + 2

    def to_vector(self):
        """``[theta_0..., theta_K-1..., sigma_f, sigma_noise]``."""
        return np.concatenate(self.theta + [np.array([self.sigma_f, self.sigma_noise])])

    @classmethod
    def from_vector(cls, v, dims):
        v = np.asarray(v, dtype=float)
        edges = np.cumsum((0,) + tuple(dims))
        theta = [v[a:b] for a, b in zip(edges[:-1], edges[1:])]
        return cls(theta, v[edges[-1]], v[edges[-1] + 1])

    def check(self, design):
        if len(self.theta) != len(design):
            raise InputError(f"{len(self.theta)} theta blocks for a {len(design)}-factor design")
        for k, (t, f) in enumerate(zip(self.theta, design.factors)):
            if t.size != f.dim:
                raise InputError(f"factor {k} has dimension {f.dim} but {t.size} theta values")

    def noise_variance(self):
        """Noise variance used in inference, including the jitter floor."""
        s2 = self.sigma_noise**2
        floor = JITTER * self.sigma_f**2
        return s2 + floor if s2 < floor else s2

    def factor_amplitude(self, k):
        return self.sigma_f if k == 0 else 1.0


def _sq_dists(a, b):
    """Per-coordinate squared differences, shape ``(len(a), len(b), d)``."""
    return (a[:, None, :] - b[None, :, :]) ** 2


def _check_theta(factor, theta_k):
    theta_k = np.atleast_1d(np.asarray(theta_k, dtype=float))
    if theta_k.shape != (factor.dim,):
        raise InputError(f"theta has {theta_k.size} entries for a {factor.dim}-dimensional factor")
    if np.any(theta_k <= 0):
        raise InputError("theta must be positive")
    return theta_k


def factor_covariance(factor, theta_k, sigma_fk=1.0):
    """Squared exponential covariance matrix among the levels of one factor."""
    theta_k = _check_theta(factor, theta_k)
    r2 = _sq_dists(factor.points, factor.points) @ theta_k**2
    return sigma_fk**2 * np.exp(-r2)


def factor_covariance_grad(factor, theta_k, sigma_fk, j):
    """Derivative of :func:`factor_covariance` w.r.t. ``theta_k[j]``."""
    theta_k = _check_theta(factor, theta_k)
    if not 0 <= j < factor.dim:
        raise InputError(f"component {j} out of range for a {factor.dim}-dimensional factor")
    diff2 = (factor.points[:, None, j] - factor.points[None, :, j]) ** 2
    return factor_covariance(factor, theta_k, sigma_fk) * (-2.0 * theta_k[j] * diff2)


def cross_covariance(factor, theta_k, sigma_fk, x_star):
    """Covariances between query points and the levels of a factor.

    ``x_star`` is a single point of length ``d_k`` (returns shape ``(n_k,)``)
    or an ``(m, d_k)`` array (returns shape ``(n_k, m)``).
    """
    theta_k = _check_theta(factor, theta_k)
    xs = np.asarray(x_star, dtype=float)
    single = xs.ndim <= 1
    xs = xs.reshape(1, -1) if single else xs
    if xs.shape[1] != factor.dim:
        raise InputError(f"query has dimension {xs.shape[1]}, factor has {factor.dim}")
    k = sigma_fk**2 * np.exp(-(_sq_dists(factor.points, xs) @ theta_k**2))
    return k[:, 0] if single else k

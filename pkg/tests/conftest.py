import os

import numpy as np
import pytest

from tensorgp import FactorialDesign, HyperParams, TrainingData

DATA_DIR = os.path.join(os.path.dirname(__file__), os.pardir, "data")


def random_case(rng, max_factors=3, max_n=6, max_dim=2, noise=None, max_size=2048):
    """Random design, centred data and hyperparameters for oracle comparisons."""
    while True:
        k = int(rng.integers(1, max_factors + 1))
        sizes = rng.integers(1, max_n + 1, size=k)
        dims = rng.integers(1, max_dim + 1, size=k)
        if np.prod(sizes) <= max_size:
            break
    design = FactorialDesign([rng.uniform(0, 1, size=(n, d)) for n, d in zip(sizes, dims)])
    theta = [rng.uniform(0.5, 3.0, size=d) for d in dims]
    if noise is None:
        noise = float(rng.choice([1e-3, 0.1, 1.0]))
    params = HyperParams(theta, float(rng.uniform(0.5, 2.0)), noise)
    data = TrainingData.from_values(design, rng.standard_normal(design.size))
    return data, params


def rel_err(a, b):
    """Normwise relative error ``max|a - b| / max|b|`` (0 when both vanish)."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    scale = np.max(np.abs(b), initial=0.0)
    diff = np.max(np.abs(a - b), initial=0.0)
    return float(diff / scale) if scale > 0 else float(diff)


def fd_step(v, n_theta):
    """Central difference steps: ``1e-5 (1 + |theta|)`` for theta, ``1e-5 |sigma|`` for the amplitudes."""
    v = np.abs(np.asarray(v, dtype=float))
    h = 1e-5 * (1 + v)
    h[n_theta:] = 1e-5 * np.maximum(v[n_theta:], 1e-8)
    return h


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def example_path():
    return os.path.join(DATA_DIR, "example_4x3.json")


@pytest.fixture
def anisotropic_path():
    return os.path.join(DATA_DIR, "anisotropic_15x4.json")


def fd_gradient(objective, params, rel=1e-3):
    """Fourth-order central differences of ``objective(params) -> (value, grad)``.

    Steps are ``rel * (1 + |theta|)`` for theta and ``rel * |sigma|`` for the
    two amplitudes, which vary on the scale of their own magnitude.
    """
    from tensorgp import HyperParams

    v = params.to_vector()
    dims = [t.size for t in params.theta]
    steps = rel * (1 + np.abs(v))
    steps[-2:] = rel * np.maximum(np.abs(v[-2:]), 1e-12)

    def f(i, dx):
        w = v.copy()
        w[i] += dx
        return objective(HyperParams.from_vector(w, dims))[0]

    return np.array([
        (8 * (f(i, h) - f(i, -h)) - (f(i, 2 * h) - f(i, -2 * h))) / (12 * h)
        for i, h in enumerate(steps)
    ])

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from tensorgp import FactorialDesign, TensorGPRegressor, materialize_design


def _grid(rng, shape=(6, 5)):
    design = FactorialDesign([np.sort(rng.uniform(size=n)) for n in shape])
    x = materialize_design(design)
    return x, np.sin(3 * x[:, 0]) + np.cos(2 * x[:, 1])


def test_params_and_clone():
    est = TensorGPRegressor(alpha=3.0, restarts=2)
    params = est.get_params()
    assert params["alpha"] == 3.0 and params["restarts"] == 2
    other = clone(est)
    assert other.get_params() == params
    assert other is not est


def test_fit_predict_shuffled_rows(rng):
    x, y = _grid(rng)
    perm = rng.permutation(len(x))
    est = TensorGPRegressor(restarts=1).fit(x[perm], y[perm])
    np.testing.assert_allclose(est.predict(x), y, atol=1e-4)
    assert est.n_features_in_ == 2
    assert len(est.length_scales_) == 2
    assert est.score(x, y) > 0.999


def test_return_std(rng):
    x, y = _grid(rng)
    est = TensorGPRegressor(restarts=1).fit(x, y)
    mean, std = est.predict(x[:5] + 0.01, return_std=True)
    assert mean.shape == std.shape == (5,)
    assert np.all(std >= 0)


def test_fit_grid_matches_fit(rng):
    x, y = _grid(rng, (4, 3))
    design, _ = FactorialDesign.from_points(x)
    a = TensorGPRegressor(restarts=1).fit(x, y)
    b = TensorGPRegressor(restarts=1).fit_grid([f.points for f in design.factors],
                                              y.reshape(4, 3))
    np.testing.assert_array_equal(a.predict(x), b.predict(x))


def test_multidimensional_factors(rng):
    f1 = rng.uniform(size=(5, 2))
    design = FactorialDesign([f1, np.linspace(0, 1, 4)])
    x = materialize_design(design)
    y = x[:, 0] * x[:, 1] + np.sin(x[:, 2])
    est = TensorGPRegressor(factor_dims=(2, 1), restarts=1).fit(x, y)
    assert est.design_.dims == (2, 1)
    np.testing.assert_allclose(est.predict(x), y, atol=1e-4)


def test_not_fitted():
    with pytest.raises(NotFittedError):
        TensorGPRegressor().predict(np.zeros((1, 2)))


def test_incomplete_grid_rejected(rng):
    x, y = _grid(rng)
    with pytest.raises(ValueError, match="complete grid"):
        TensorGPRegressor().fit(x[:-1], y[:-1])

import math

import numpy as np
import pytest
from functools import reduce

from tensorgp import Factor, FactorialDesign, HyperParams, materialize_design
from tensorgp.dense import DenseGP
from tensorgp.exceptions import InputError
from tensorgp.kernels import (
    JITTER,
    cross_covariance,
    factor_covariance,
    factor_covariance_grad,
)


def test_single_point_factor():
    np.testing.assert_array_equal(factor_covariance(Factor([0.3]), [1.0]), [[1.0]])


def test_two_points_unit_theta():
    k = factor_covariance(Factor([0.0, 1.0]), [1.0])
    np.testing.assert_allclose(k, [[1, 0.3678794], [0.3678794, 1]], atol=5e-8)
    assert k[0, 1] == pytest.approx(math.exp(-1), rel=1e-15)


def test_two_dimensional_factor():
    k = factor_covariance(Factor([[0, 0], [1, 2]]), [1.0, 0.5])
    assert k[0, 1] == pytest.approx(0.1353353, abs=5e-8)
    assert k[0, 1] == pytest.approx(math.exp(-2), rel=1e-15)


def test_amplitude_scales_quadratically():
    f = Factor([0.0, 0.4, 1.0])
    np.testing.assert_allclose(factor_covariance(f, [2.0], 3.0), 9 * factor_covariance(f, [2.0]))


def test_grad_zero_when_component_constant():
    f = Factor([[0.0, 1.0], [0.0, 2.0], [0.0, 5.0]])
    assert not factor_covariance_grad(f, [1.0, 1.0], 1.0, 0).any()


def test_grad_two_points():
    g = factor_covariance_grad(Factor([0.0, 1.0]), [1.0], 1.0, 0)
    assert g[0, 1] == pytest.approx(-0.7357589, abs=5e-8)
    f = Factor([0.0, 1.0])
    h = 1e-6
    fd = (factor_covariance(f, [1 + h]) - factor_covariance(f, [1 - h])) / (2 * h)
    np.testing.assert_allclose(g, fd, atol=1e-9)


def test_grad_matches_finite_differences(rng):
    f = Factor(rng.uniform(size=(5, 3)))
    theta = rng.uniform(0.5, 2.0, 3)
    for j in range(3):
        h = 1e-6
        tp, tm = theta.copy(), theta.copy()
        tp[j] += h
        tm[j] -= h
        fd = (factor_covariance(f, tp, 1.3) - factor_covariance(f, tm, 1.3)) / (2 * h)
        g = factor_covariance_grad(f, theta, 1.3, j)
        mask = np.abs(fd) > 1e-8
        np.testing.assert_allclose(g[mask], fd[mask], rtol=1e-6)
        np.testing.assert_allclose(g[~mask], fd[~mask], atol=1e-9)


def test_cross_covariance_at_level():
    f = Factor([0.0, 0.25, 0.7])
    k = cross_covariance(f, [3.0], 1.7, [0.25])
    assert k[1] == 1.7**2


def test_cross_covariance_far_point_underflows():
    k = cross_covariance(Factor([0.0, 1.0]), [1.0], 1.0, [1e3])
    assert np.all(k < 1e-300)


def test_cross_covariance_midpoint():
    k = cross_covariance(Factor([0.0, 1.0]), [1.0], 1.0, [0.5])
    np.testing.assert_allclose(k, [0.7788008, 0.7788008], atol=5e-8)


def test_cross_covariance_batch_shape(rng):
    f = Factor(rng.uniform(size=(4, 2)))
    k = cross_covariance(f, [1.0, 2.0], 1.0, rng.uniform(size=(7, 2)))
    assert k.shape == (4, 7)


def test_materialize_single_factor():
    d = FactorialDesign([[0.3, 0.1, 0.9]])
    np.testing.assert_array_equal(materialize_design(d), [[0.3], [0.1], [0.9]])


def test_materialize_singleton_second_factor():
    d = FactorialDesign([[0.0, 1.0], [5.0]])
    np.testing.assert_array_equal(materialize_design(d), [[0, 5], [1, 5]])


def test_materialize_canonical_order():
    d = FactorialDesign([[0.0, 1.0], [2.0, 3.0]])
    np.testing.assert_array_equal(materialize_design(d), [[0, 2], [0, 3], [1, 2], [1, 3]])


def test_materialize_cap():
    with pytest.raises(InputError):
        materialize_design(FactorialDesign([np.arange(10.0)] * 3), cap=999)


def test_duplicate_level_rejected():
    with pytest.raises(InputError, match="duplicate"):
        Factor([0.0, 0.5, 0.5])


def test_non_finite_level_rejected():
    with pytest.raises(InputError):
        Factor([0.0, np.nan])


def test_factor_points_read_only():
    f = Factor([0.0, 1.0])
    with pytest.raises(ValueError):
        f.points[0, 0] = 3.0


def test_from_points_recovers_grid(rng):
    d = FactorialDesign([rng.uniform(size=(3, 2)), rng.uniform(size=4)])
    x = materialize_design(d)
    perm = rng.permutation(len(x))
    d2, order = FactorialDesign.from_points(x[perm], (2, 1))
    assert d2.shape == (3, 4)
    np.testing.assert_array_equal(materialize_design(d2), x[perm][order])


def test_from_points_rejects_incomplete_grid():
    x = materialize_design(FactorialDesign([[0.0, 1.0], [2.0, 3.0]]))[:3]
    with pytest.raises(InputError, match="complete grid"):
        FactorialDesign.from_points(x)


def test_hyperparams_vector_round_trip():
    p = HyperParams([[1.0, 2.0], [3.0]], 1.5, 0.1)
    q = HyperParams.from_vector(p.to_vector(), (2, 1))
    np.testing.assert_array_equal(q.to_vector(), p.to_vector())


def test_hyperparams_rejects_nonpositive_theta():
    with pytest.raises(InputError):
        HyperParams([[0.0]], 1.0, 0.1)


def test_jitter_floor():
    p = HyperParams([[1.0]], 2.0, 0.0)
    assert p.noise_variance() == JITTER * 4.0
    assert HyperParams([[1.0]], 2.0, 0.5).noise_variance() == 0.25


def _random_design(rng, max_size=1024):
    while True:
        sizes = rng.integers(1, 8, size=rng.integers(1, 4))
        if np.prod(sizes) <= max_size:
            break
    return FactorialDesign([rng.uniform(size=(n, rng.integers(1, 3))) for n in sizes])


def test_kronecker_equals_dense_covariance(rng):
    for _ in range(20):
        d = _random_design(rng)
        theta = [rng.uniform(0.3, 3.0, f.dim) for f in d.factors]
        sf = rng.uniform(0.5, 2.0)
        mats = [factor_covariance(f, t, sf if k == 0 else 1.0)
                for k, (f, t) in enumerate(zip(d.factors, theta))]
        dense = DenseGP(materialize_design(d), np.zeros(d.size), np.concatenate(theta), sf, 0.1)
        np.testing.assert_allclose(reduce(np.kron, mats), dense.k_f, rtol=0, atol=1e-12)


def test_factor_covariance_is_psd(rng):
    for _ in range(10):
        f = Factor(rng.uniform(size=(8, 2)))
        k = factor_covariance(f, rng.uniform(0.5, 4, 2), 1.0)
        np.testing.assert_array_equal(k, k.T)
        assert np.linalg.eigvalsh(k).min() > -1e-12

import json

import numpy as np
import pytest

from tensorgp import FactorialDesign, HyperParams, TrainingData, fit, materialize_design
from tensorgp.exceptions import InputError, ParseError
from tensorgp.inference import predict_mean, predict_variance
from tensorgp.io import (
    dataset_to_dict,
    load_dataset,
    load_model,
    model_to_dict,
    save_dataset,
    save_model,
)

from conftest import random_case


def test_example_dataset_loads(example_path):
    design, values = load_dataset(example_path)
    assert design.shape == (4, 3)
    assert values.shape == (12,)


def test_dataset_round_trip(tmp_path, rng):
    design = FactorialDesign([rng.uniform(size=(3, 2)), rng.uniform(size=4)])
    values = rng.standard_normal(12)
    path = tmp_path / "d.json"
    save_dataset(path, design, values, noise=0.1, metadata={"source": "test"})
    d2, v2 = load_dataset(path)
    np.testing.assert_array_equal(v2, values)
    for a, b in zip(design.factors, d2.factors):
        np.testing.assert_array_equal(a.points, b.points)


def test_values_length_mismatch(tmp_path):
    doc = dataset_to_dict(FactorialDesign([[0.0, 1.0], [0.0, 1.0]]), np.zeros(4))
    doc["values"] = doc["values"][:3]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    with pytest.raises(InputError, match="values has length 3, expected 4"):
        load_dataset(path)


def test_duplicate_level(tmp_path):
    doc = dataset_to_dict(FactorialDesign([[0.0, 1.0]]), np.zeros(2))
    doc["factors"][0]["points"] = [[0.5], [0.5]]
    path = tmp_path / "dup.json"
    path.write_text(json.dumps(doc))
    with pytest.raises(InputError, match="factor 0: duplicate level"):
        load_dataset(path)


def test_schema_violation(tmp_path):
    path = tmp_path / "s.json"
    path.write_text(json.dumps({"format": "tensorgp-dataset", "version": 1, "factors": []}))
    with pytest.raises(InputError, match="schema"):
        load_dataset(path)


def test_future_version(tmp_path):
    doc = dataset_to_dict(FactorialDesign([[0.0, 1.0]]), np.zeros(2))
    doc["version"] = 7
    path = tmp_path / "f.json"
    path.write_text(json.dumps(doc))
    with pytest.raises(InputError, match="version 7"):
        load_dataset(path)


def test_not_json(tmp_path):
    path = tmp_path / "x.json"
    path.write_text("{nope")
    with pytest.raises(ParseError):
        load_dataset(path)


def test_csv_import_recovers_grid(tmp_path, rng):
    design = FactorialDesign([rng.uniform(size=4), rng.uniform(size=3)])
    x = materialize_design(design)
    y = rng.standard_normal(12)
    perm = rng.permutation(12)
    path = tmp_path / "g.csv"
    np.savetxt(path, np.column_stack([x, y])[perm], delimiter=",", header="x_1,x_2,y",
               comments="")
    d2, v2 = load_dataset(path)
    assert d2.shape == (4, 3)
    # canonical order sorts levels; compare as point -> value maps
    got = {tuple(p): v for p, v in zip(materialize_design(d2), v2)}
    for p, v in zip(x, y):
        assert got[tuple(p)] == pytest.approx(v, rel=1e-15)


def test_csv_incomplete_grid(tmp_path):
    path = tmp_path / "h.csv"
    path.write_text("x_1,x_2,y\n0,0,1\n0,1,2\n1,0,3\n")
    with pytest.raises(InputError, match="complete grid"):
        load_dataset(path)


def test_model_round_trip(tmp_path, rng):
    for _ in range(5):
        data, params = random_case(rng)
        model = fit(data, params, {"note": "x"})
        path = tmp_path / "m.json"
        save_model(path, model)
        loaded = load_model(path)
        xs = rng.uniform(size=(50, data.design.dim))
        np.testing.assert_allclose(predict_mean(loaded, xs), predict_mean(model, xs),
                                   rtol=1e-12, atol=1e-12)
        np.testing.assert_allclose(predict_variance(loaded, xs), predict_variance(model, xs),
                                   rtol=1e-12, atol=1e-12)
        assert loaded.loglik == model.loglik


def test_model_serialization_is_exact(tmp_path, rng):
    data, params = random_case(rng)
    model = fit(data, params)
    path = tmp_path / "m.json"
    save_model(path, model)
    loaded = load_model(path)
    np.testing.assert_array_equal(loaded.alpha, model.alpha)
    np.testing.assert_array_equal(loaded.D, model.D)
    assert model_to_dict(loaded) == model_to_dict(model)


def test_model_future_version(tmp_path, rng):
    data, params = random_case(rng)
    doc = model_to_dict(fit(data, params))
    doc["version"] = 2
    path = tmp_path / "m.json"
    path.write_text(json.dumps(doc))
    with pytest.raises(InputError, match="reads up to version 1"):
        load_model(path)


def test_model_rejects_mismatched_eig(tmp_path):
    design = FactorialDesign([[0.0, 1.0], [0.0, 0.5, 1.0]])
    doc = model_to_dict(fit(TrainingData.from_values(design, np.arange(6.0)),
                            HyperParams([[1.0], [1.0]])))
    doc["eig"] = doc["eig"][:1]
    path = tmp_path / "m.json"
    path.write_text(json.dumps(doc))
    with pytest.raises(InputError, match="eigendecompositions"):
        load_model(path)

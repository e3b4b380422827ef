"""Dataset and model files.

Both are JSON documents tagged with ``format`` and ``version``. Floats are
written with Python's shortest round-trip repr, so loading a model gives
back bit-identical arrays. Flattened arrays use the canonical ordering in
which the last factor index varies fastest.
"""

import csv
import json

import jsonschema
import numpy as np

from .exceptions import InputError, ParseError
from .inference import FittedModel, TrainingData
from .kernels import Factor, FactorialDesign, HyperParams
from .spectral import EigenPair, build_eigen_tensor

DATASET_FORMAT = "tensorgp-dataset"
MODEL_FORMAT = "tensorgp-model"
DATASET_VERSION = 1
MODEL_VERSION = 1
ORDERING = "row-major over factors: the last factor index varies fastest"

_number = {"type": "number"}
_points = {"type": "array", "minItems": 1,
           "items": {"type": "array", "minItems": 1, "items": _number}}
_factor = {
    "type": "object",
    "required": ["dim", "points"],
    "properties": {"dim": {"type": "integer", "minimum": 1}, "points": _points},
}

DATASET_SCHEMA = {
    "type": "object",
    "required": ["format", "version", "factors", "values"],
    "properties": {
        "format": {"const": DATASET_FORMAT},
        "version": {"type": "integer"},
        "ordering": {"type": "string"},
        "factors": {"type": "array", "minItems": 1, "items": _factor},
        "values": {"type": "array", "minItems": 1, "items": _number},
        "noise": _number,
        "metadata": {"type": "object"},
    },
}

MODEL_SCHEMA = {
    "type": "object",
    "required": ["format", "version", "factors", "params", "y_mean", "y", "eig", "alpha",
                 "loglik"],
    "properties": {
        "format": {"const": MODEL_FORMAT},
        "version": {"type": "integer"},
        "factors": {"type": "array", "minItems": 1, "items": _factor},
        "params": {
            "type": "object",
            "required": ["theta", "sigma_f", "sigma_noise"],
            "properties": {
                "theta": {"type": "array", "items": {"type": "array", "items": _number}},
                "sigma_f": _number,
                "sigma_noise": _number,
            },
        },
        "y_mean": _number,
        "y": {"type": "array", "items": _number},
        "eig": {
            "type": "array",
            "items": {"type": "object", "required": ["u", "d"],
                      "properties": {"u": _points, "d": {"type": "array", "items": _number}}},
        },
        "alpha": {"type": "array", "items": _number},
        "loglik": _number,
        "diagnostics": {"type": "object"},
    },
}


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from exc


def _check_version(doc, fmt, supported, path):
    if not isinstance(doc, dict) or doc.get("format") != fmt:
        raise InputError(f"{path} is not a {fmt} file")
    version = doc.get("version")
    if isinstance(version, int) and version > supported:
        raise InputError(
            f"{path} has {fmt} version {version}; this build reads up to version {supported}"
        )


def _validate(doc, schema, path):
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise InputError(f"{path}: schema violation at {where}: {exc.message}") from exc


def _factors_from_doc(entries):
    factors = []
    for k, entry in enumerate(entries):
        pts = entry["points"]
        if any(len(p) != entry["dim"] for p in pts):
            raise InputError(f"factor {k}: every point must have {entry['dim']} coordinates")
        try:
            factors.append(Factor(pts))
        except InputError as exc:
            raise InputError(f"factor {k}: {exc}") from exc
    return FactorialDesign(factors)


def _factors_to_doc(design):
    return [{"dim": f.dim, "points": f.points.tolist()} for f in design.factors]


def dataset_from_dict(doc, path="<dataset>"):
    """Validate a parsed dataset document; return ``(design, values)``."""
    _check_version(doc, DATASET_FORMAT, DATASET_VERSION, path)
    _validate(doc, DATASET_SCHEMA, path)
    design = _factors_from_doc(doc["factors"])
    values = np.asarray(doc["values"], dtype=float)
    if values.size != design.size:
        raise InputError(
            f"{path}: values has length {values.size}, expected {design.size} "
            f"(product of factor sizes {design.shape})"
        )
    return design, values


def load_dataset(path, factor_dims=None):
    """Read a JSON dataset, or a CSV with columns ``x_1..x_d, y``.

    For CSV input the factorial structure is recovered from the points;
    ``factor_dims`` groups columns into multidimensional factors.
    """
    if str(path).lower().endswith(".csv"):
        return load_csv_dataset(path, factor_dims)
    return dataset_from_dict(_read_json(path), path)


def dataset_to_dict(design, values, noise=None, metadata=None):
    values = np.asarray(values, dtype=float).ravel()
    if values.size != design.size:
        raise InputError(f"{values.size} values for a design of {design.size} points")
    doc = {
        "format": DATASET_FORMAT,
        "version": DATASET_VERSION,
        "ordering": ORDERING,
        "factors": _factors_to_doc(design),
        "values": values.tolist(),
    }
    if noise is not None:
        doc["noise"] = float(noise)
    if metadata:
        doc["metadata"] = metadata
    return doc


def save_dataset(path, design, values, noise=None, metadata=None):
    with open(path, "w") as fh:
        json.dump(dataset_to_dict(design, values, noise, metadata), fh, indent=1,
                  allow_nan=False)
        fh.write("\n")


def _is_number(s):
    try:
        float(s)
    except ValueError:
        return False
    return True


def read_points_csv(path):
    """Yield rows of floats from a CSV, skipping a non-numeric header row."""
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    with fh:
        for i, row in enumerate(csv.reader(fh)):
            if not row or all(not c.strip() for c in row):
                continue
            if i == 0 and not all(_is_number(c) for c in row):
                continue
            try:
                yield [float(c) for c in row]
            except ValueError as exc:
                raise ParseError(f"{path}, line {i + 1}: {exc}") from exc


def load_csv_dataset(path, factor_dims=None):
    rows = list(read_points_csv(path))
    if not rows:
        raise ParseError(f"{path} has no data rows")
    if len({len(r) for r in rows}) != 1:
        raise ParseError(f"{path}: rows have differing numbers of columns")
    table = np.array(rows)
    if table.shape[1] < 2:
        raise ParseError(f"{path}: need at least one input column and one response column")
    design, order = FactorialDesign.from_points(table[:, :-1], factor_dims)
    return design, table[order, -1]


def model_to_dict(model):
    p = model.params
    return {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "ordering": ORDERING,
        "factors": _factors_to_doc(model.design),
        "params": {"theta": [t.tolist() for t in p.theta], "sigma_f": p.sigma_f,
                   "sigma_noise": p.sigma_noise},
        "y_mean": model.data.y_mean,
        "y": model.data.y.ravel().tolist(),
        "eig": [{"u": e.u.tolist(), "d": e.d.tolist()} for e in model.eig],
        "alpha": model.alpha.ravel().tolist(),
        "loglik": model.loglik,
        "diagnostics": model.diagnostics,
    }


def model_from_dict(doc, path="<model>"):
    _check_version(doc, MODEL_FORMAT, MODEL_VERSION, path)
    _validate(doc, MODEL_SCHEMA, path)
    design = _factors_from_doc(doc["factors"])
    p = doc["params"]
    params = HyperParams(p["theta"], p["sigma_f"], p["sigma_noise"])
    params.check(design)
    eig = [EigenPair(np.array(e["u"], dtype=float), np.array(e["d"], dtype=float))
           for e in doc["eig"]]
    if [e.d.size for e in eig] != list(design.shape):
        raise InputError(f"{path}: eigendecompositions do not match the factor sizes")
    data = TrainingData(design, np.array(doc["y"], dtype=float), doc["y_mean"])
    D = build_eigen_tensor([e.d for e in eig], params.noise_variance())
    alpha = np.array(doc["alpha"], dtype=float)
    if alpha.size != design.size:
        raise InputError(f"{path}: alpha has {alpha.size} entries, expected {design.size}")
    return FittedModel(data, params, eig, D, alpha.reshape(design.shape), float(doc["loglik"]),
                       doc.get("diagnostics", {}))


def save_model(path, model):
    with open(path, "w") as fh:
        json.dump(model_to_dict(model), fh, allow_nan=False)
        fh.write("\n")


def load_model(path):
    return model_from_dict(_read_json(path), path)

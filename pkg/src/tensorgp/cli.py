"""Command line interface: ``tensorgp {train,predict,benchmark,validate}``.

Every option may also come from a JSON ``--config`` file whose keys are
the option names with dashes replaced by underscores; command line flags
win over the file.

Exit codes: 0 success, 2 input error, 3 numerical error, 4 optimizer
failure.
"""

import argparse
import csv
import json
import logging
import os
import sys
import time

import numpy as np

from . import io
from .bench import ALGORITHMS, BenchConfig, TestProblem, builtin_suite, run_suite, smoke_suite
from .exceptions import InputError, ParseError, TensorGPError
from .hyperopt import OptimizerConfig, PriorSpec, compute_bounds, optimize
from .inference import PREDICT_CHUNK, TrainingData, predict_mean, predict_variance

logger = logging.getLogger("tensorgp")

DEFAULTS = {
    "train": {"prior": "on", "alpha": 2.0, "beta": 2.0, "ck": 0.5, "Ck": 100.0, "restarts": 3,
              "max_iters": 200, "grad_tol": 1e-5, "seed": 0, "init": "default",
              "factor_dims": None},
    "predict": {"variance": False},
    "benchmark": {"suite": "builtin", "algorithms": ",".join(ALGORITHMS), "seed": 0,
                  "repeats": 1, "ntest": 5000, "concurrency": 1, "restarts": 3,
                  "max_iters": 200},
    "validate": {"factor_dims": None},
}


def _dims(text):
    try:
        return tuple(int(t) for t in str(text).split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}") from exc


def build_parser():
    parser = argparse.ArgumentParser(
        prog="tensorgp",
        description="Exact Gaussian process regression on factorial designs.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    S = argparse.SUPPRESS

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text, argument_default=S)
        p.add_argument("--config", help="JSON file with option values")
        return p

    p = add("train", "fit hyperparameters and write a model file")
    p.add_argument("--data", required=True, help="dataset (.json, or .csv with columns x..., y)")
    p.add_argument("--out", required=True, help="model file to write")
    p.add_argument("--prior", choices=["on", "off"])
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--ck", type=float, help="lower length-scale bound multiplier")
    p.add_argument("--Ck", type=float, help="upper length-scale bound multiplier")
    p.add_argument("--restarts", type=int)
    p.add_argument("--max-iters", type=int)
    p.add_argument("--grad-tol", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--init", choices=["default", "adversarial"])
    p.add_argument("--factor-dims", type=_dims, help="column grouping for CSV input, e.g. 1,2")

    p = add("predict", "evaluate a model at query points")
    p.add_argument("--model", required=True)
    p.add_argument("--points", required=True, help="CSV with d columns")
    p.add_argument("--out", required=True, help="CSV to write")
    p.add_argument("--variance", action="store_true")

    p = add("benchmark", "run the benchmark suite and write CSV tables")
    p.add_argument("--suite", help="'builtin', 'smoke' or a JSON suite file")
    p.add_argument("--algorithms", help=f"comma separated subset of {','.join(ALGORITHMS)}")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int)
    p.add_argument("--repeats", type=int, help="number of consecutive seeds")
    p.add_argument("--ntest", type=int)
    p.add_argument("--concurrency", type=int)
    p.add_argument("--restarts", type=int)
    p.add_argument("--max-iters", type=int)

    p = add("validate", "check a dataset file")
    p.add_argument("--data", required=True)
    p.add_argument("--factor-dims", type=_dims)
    return parser


def _options(args):
    """Merge defaults, config file and command line (in increasing priority)."""
    opts = dict(DEFAULTS[args.command])
    given = vars(args)
    if given.get("config"):
        try:
            with open(given["config"]) as fh:
                conf = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(f"cannot read config {given['config']}: {exc}") from exc
        if not isinstance(conf, dict):
            raise ParseError("config file must hold a JSON object")
        conf = {k.replace("-", "_"): v for k, v in conf.items()}
        if "factor_dims" in conf and conf["factor_dims"] is not None:
            conf["factor_dims"] = _dims(",".join(map(str, conf["factor_dims"])))
        opts.update(conf)
    opts.update({k: v for k, v in given.items() if k not in ("command", "config", "verbose")})
    return argparse.Namespace(**opts)


def cmd_train(o):
    design, values = io.load_dataset(o.data, o.factor_dims)
    data = TrainingData.from_values(design, values)
    spec = PriorSpec(o.alpha, o.beta, o.ck, o.Ck, enabled=o.prior == "on")
    config = OptimizerConfig(max_iters=o.max_iters, grad_tol=o.grad_tol, restarts=o.restarts,
                             seed=o.seed, init=o.init)
    t0 = time.perf_counter()
    model = optimize(data, spec, config)
    elapsed = time.perf_counter() - t0
    io.save_model(o.out, model)

    print(f"loglik: {model.loglik:.10g}")
    print(f"objective: {model.diagnostics['objective']:.10g}")
    for k, ls in enumerate(model.params.length_scales):
        print(f"length_scales[{k}]: " + " ".join(f"{v:.6g}" for v in ls))
    print(f"sigma_f: {model.params.sigma_f:.6g}  sigma_noise: {model.params.sigma_noise:.6g}")
    print(f"iterations: {model.diagnostics['iterations']} ({model.diagnostics['termination']})")
    print(f"wall_time_s: {elapsed:.3f}")
    if not spec.enabled:
        bounds = compute_bounds(design, o.ck, o.Ck)
        for k, (t, hi) in enumerate(zip(model.params.theta, bounds.upper)):
            for i in np.flatnonzero(t > hi):
                print(f"warning: length-scale {1 / t[i]:.4g} of factor {k} coordinate {i} is "
                      f"below the lower bound {1 / hi[i]:.4g} (possible degeneracy)",
                      file=sys.stderr)
    return 0


def cmd_predict(o):
    model = io.load_model(o.model)
    d = model.design.dim
    header = [f"x_{i + 1}" for i in range(d)] + ["mean"] + (["variance"] if o.variance else [])
    batch_size = 4 * PREDICT_CHUNK

    def flush(writer, batch):
        x = np.array(batch)
        mean = predict_mean(model, x)
        cols = [x, mean[:, None]]
        if o.variance:
            cols.append(predict_variance(model, x)[:, None])
        for row in np.hstack(cols):
            writer.writerow([repr(float(v)) for v in row])

    with open(o.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        batch = []
        for row in io.read_points_csv(o.points):
            if len(row) != d:
                raise InputError(f"query point has {len(row)} coordinates, model expects {d}")
            batch.append(row)
            if len(batch) == batch_size:
                flush(writer, batch)
                batch = []
        if batch:
            flush(writer, batch)
    return 0


def _load_suite(name):
    if name == "builtin":
        return builtin_suite()
    if name == "smoke":
        return smoke_suite()
    try:
        with open(name) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read suite {name}: {exc}") from exc
    entries = doc.get("problems", doc) if isinstance(doc, dict) else doc
    try:
        return [TestProblem.from_dict(e) for e in entries]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed suite entry in {name}: {exc}") from exc


def write_suite(result, out_dir):
    os.makedirs(out_dir, exist_ok=True)

    def dump(name, header, rows):
        with open(os.path.join(out_dir, name), "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            w.writerows(rows)

    dump("records.csv", ["problem", "algorithm", "seed", "mse", "train_time_s", "status"],
         [(r.problem, r.algorithm, r.seed, repr(r.mse), repr(r.train_time), r.status)
          for r in result.records])
    for name, prof in (("profile_accuracy.csv", result.accuracy),
                       ("profile_time.csv", result.time)):
        dump(name, ["algorithm", "tau", "rho", "log2_tau"],
             [(a, repr(t), repr(r), repr(lt)) for a, t, r, lt in prof.rows()])
    dump("runtimes.csv", ["N", "seconds"], [(n, repr(s)) for n, s in result.runtimes])


def cmd_benchmark(o):
    algorithms = [a.strip() for a in o.algorithms.split(",") if a.strip()]
    unknown = [a for a in algorithms if a not in ALGORITHMS]
    if unknown:
        raise InputError(f"unknown algorithm(s) {unknown}; choose from {list(ALGORITHMS)}")
    problems = _load_suite(o.suite)
    config = BenchConfig(
        seeds=tuple(range(o.seed, o.seed + o.repeats)),
        n_test=o.ntest,
        concurrency=o.concurrency,
        optimizer=OptimizerConfig(restarts=o.restarts, max_iters=o.max_iters),
    )
    result = run_suite(problems, algorithms, config)
    write_suite(result, o.out)
    failed = sum(r.status != "ok" for r in result.records)
    print(f"{len(result.records)} runs ({failed} not ok) written to {o.out}")
    for a in algorithms:
        print(f"{a}: rho(1)={result.accuracy.rho(a, 1.0):.3f} rho(4)={result.accuracy.rho(a, 4.0):.3f}")
    return 0


def cmd_validate(o):
    design, values = io.load_dataset(o.data, o.factor_dims)
    shape = design.shape
    print(f"valid: {o.data}")
    print(f"factors: {len(shape)}  sizes: {list(shape)}  dims: {list(design.dims)}")
    print(f"N: {design.size}  d: {design.dim}")
    print(f"anisotropy (max n_k / min n_k): {max(shape) / min(shape):.4g}")
    if not np.all(np.isfinite(values)):
        raise InputError("values contain non-finite entries")
    return 0


COMMANDS = {"train": cmd_train, "predict": cmd_predict, "benchmark": cmd_benchmark,
            "validate": cmd_validate}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](_options(args))
    except TensorGPError as exc:
        print(f"error[{exc.category}]: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())

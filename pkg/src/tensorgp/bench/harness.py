"""Benchmark runs: design generation, training, MSE and timing."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
import logging
import time

import numpy as np

from ..dense import DENSE_CAP
from ..exceptions import InputError, TensorGPError
from ..hyperopt import (
    OptimizerConfig,
    PriorSpec,
    compute_bounds,
    init_params,
    optimize,
    penalized_objective,
)
from ..inference import TrainingData, predict_mean
from ..kernels import Factor, FactorialDesign, materialize_design
from .profiles import dolan_more

logger = logging.getLogger(__name__)

ALGORITHMS = ("tensorGP", "tensorGP-reg", "denseGP")


@dataclass
class BenchmarkRecord:
    problem: str
    algorithm: str
    seed: int
    mse: float
    train_time: float
    status: str = "ok"
    n: int = 0


@dataclass
class BenchConfig:
    seeds: tuple = (0,)
    n_test: int = 5000
    concurrency: int = 1
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    prior: PriorSpec = field(default_factory=PriorSpec)
    dense_cap: int = DENSE_CAP
    runtime_sizes: tuple = ((8, 8, 8), (16, 16, 16), (24, 24, 24), (32, 32, 32))
    runtime_iters: int = 10


@dataclass
class SuiteResult:
    records: list
    accuracy: object
    time: object
    runtimes: list  # [(N, seconds), ...]


def _draw_factor(rng, lo, hi, n):
    pts = rng.uniform(lo, hi, size=(n, len(lo)))
    return pts[np.lexsort(pts.T[::-1])]


def generate_design(problem, seed, n_test=5000):
    """Random factorial training set and uniform test set for ``problem``.

    Levels of every factor are drawn uniformly in the box and sorted; the
    responses get additive Gaussian noise of standard deviation
    ``problem.noise``.

    Returns
    -------
    data : TrainingData
    x_test, f_test : ndarray
        Test inputs ``(n_test, d)`` and noiseless function values.
    """
    rng = np.random.default_rng(seed)
    lo, hi = problem.lower, problem.upper
    edges = np.cumsum((0,) + problem.partition)
    factors = [
        Factor(_draw_factor(rng, lo[a:b], hi[a:b], n))
        for a, b, n in zip(edges[:-1], edges[1:], problem.sizes)
    ]
    design = FactorialDesign(factors)
    y = problem(materialize_design(design))
    if problem.noise > 0:
        y = y + problem.noise * rng.standard_normal(y.shape)
    x_test = rng.uniform(lo, hi, size=(n_test, problem.dim))
    return TrainingData.from_values(design, y), x_test, problem(x_test)


def mse(predictions, truths):
    predictions = np.asarray(predictions, dtype=float)
    truths = np.asarray(truths, dtype=float)
    if predictions.shape != truths.shape:
        raise InputError("predictions and truths differ in shape")
    return float(np.mean((predictions - truths) ** 2))


def train(algorithm, data, config, seed=0):
    """Fit one of :data:`ALGORITHMS` on ``data``."""
    opt = replace(config.optimizer, seed=seed)
    if algorithm == "tensorGP":
        return optimize(data, PriorSpec(enabled=False), opt)
    if algorithm == "tensorGP-reg":
        return optimize(data, config.prior, opt)
    if algorithm == "denseGP":
        if data.design.size > config.dense_cap:
            raise InputError(f"denseGP limited to N <= {config.dense_cap}")
        return optimize(data, config.prior, opt, backend="dense")
    raise InputError(f"unknown algorithm {algorithm!r}; choose from {ALGORITHMS}")


def run_one(problem, algorithm, seed, config):
    data, x_test, f_test = generate_design(problem, seed, config.n_test)

    def failed(status):
        return BenchmarkRecord(problem.name, algorithm, seed, float("inf"), float("inf"),
                               status, data.design.size)

    if algorithm == "denseGP" and data.design.size > config.dense_cap:
        return failed("skipped")
    t0 = time.perf_counter()
    try:
        model = train(algorithm, data, config, seed)
    except TensorGPError as exc:
        logger.info("%s / %s / seed %d: %s", problem.name, algorithm, seed, exc)
        return failed(f"failed: {exc.category}")
    elapsed = time.perf_counter() - t0
    err = mse(predict_mean(model, x_test), f_test)
    return BenchmarkRecord(problem.name, algorithm, seed, err, elapsed, "ok", data.design.size)


def _profile(records, key):
    table = {}
    for r in records:
        table.setdefault(f"{r.problem}#{r.seed}", {})[r.algorithm] = (
            getattr(r, key) if r.status == "ok" else float("inf")
        )
    return dolan_more(table)


def runtime_table(sizes, iters=10, prior=None, repeats=3):
    """Cost of structured training on full grids of the given sizes.

    Times ``iters`` evaluations of the penalised objective and its gradient
    at the initial hyperparameters, the unit of work of every optimiser
    step. A fixed evaluation count keeps sizes comparable, whereas full
    training runs differ in their data-dependent line-search work. The best
    of ``repeats`` runs is reported.
    """
    prior = prior or PriorSpec()
    rows = []
    for shape in sizes:
        factors = [np.linspace(0.0, 1.0, n) for n in shape]
        design = FactorialDesign(factors)
        grids = np.meshgrid(*factors, indexing="ij")
        y = sum(np.sin((k + 2) * g) for k, g in enumerate(grids)).ravel()
        data = TrainingData.from_values(design, y)
        bounds = compute_bounds(design, prior.c, prior.C)
        params = init_params(data, bounds)
        best = float("inf")
        for _ in range(repeats):
            t0 = time.perf_counter()
            for _ in range(iters):
                penalized_objective(data, params, prior, bounds)
            best = min(best, time.perf_counter() - t0)
        rows.append((design.size, best))
    return rows


def run_suite(problems, algorithms=ALGORITHMS, config=None):
    """Train every algorithm on every problem and seed.

    Failures are recorded in the status column and never abort the run.
    """
    config = config or BenchConfig()
    for a in algorithms:
        if a not in ALGORITHMS:
            raise InputError(f"unknown algorithm {a!r}; choose from {ALGORITHMS}")
    jobs = [(p, a, s) for p in problems for a in algorithms for s in config.seeds]
    if config.concurrency > 1:
        with ThreadPoolExecutor(config.concurrency) as pool:
            records = list(pool.map(lambda j: run_one(*j, config), jobs))
    else:
        records = [run_one(*j, config) for j in jobs]
    records.sort(key=lambda r: (r.problem, r.algorithm, r.seed))
    runtimes = runtime_table(config.runtime_sizes, config.runtime_iters, config.prior)
    return SuiteResult(records, _profile(records, "mse"), _profile(records, "train_time"),
                       runtimes)

"""Hyperparameter selection with a compact-support Beta prior.

Each inverse length-scale ``theta`` gets a Beta(alpha, beta) prior
rescaled onto an interval ``(a, b)`` derived from the level spacing of its
factor. The prior makes length-scales far below the grid spacing (the
degenerate "spiky" fits seen on anisotropic grids) impossible rather than
merely unlikely.

Optimisation runs projected gradient ascent with backtracking in
log-parameter space, from several starting points.
"""

from dataclasses import dataclass, field
import logging
import math
import warnings

import numpy as np
from scipy.special import betaln

from .dense import dense_loglik_and_grad
from .exceptions import InputError, NumericalError, OptimizerError
from .inference import fit, loglik_and_grad
from .kernels import HyperParams

logger = logging.getLogger(__name__)

ROUNDOFF_SLACK = 1e-12


@dataclass
class Bounds:
    """Per-factor theta intervals; ``frozen`` marks unidentifiable components."""

    lower: list
    upper: list
    frozen: list

    def flat(self):
        return (np.concatenate(self.lower), np.concatenate(self.upper),
                np.concatenate(self.frozen))


@dataclass
class PriorSpec:
    alpha: float = 2.0
    beta: float = 2.0
    c: float = 0.5
    C: float = 100.0
    enabled: bool = True

    def __post_init__(self):
        if self.enabled and not (self.alpha > 1 and self.beta > 1):
            raise InputError("Beta prior shape parameters must both exceed 1")
        if not 0 < self.c < self.C:
            raise InputError("bound multipliers must satisfy 0 < c < C")


@dataclass
class OptimizerConfig:
    max_iters: int = 200
    grad_tol: float = 1e-5
    restarts: int = 3
    seed: int = 0
    init_step: float = 0.1
    shrink: float = 0.5
    armijo: float = 1e-4
    max_backtracks: int = 40
    max_log_step: float = 3.0
    noise_floor: float = 1e-6  # lower bound on sigma_noise relative to std(y)
    init: str = "default"  # or "adversarial"
    initial_params: list = field(default_factory=list)


def compute_bounds(design, c=0.5, C=100.0):
    """Data-driven theta intervals ``(1 / (C * max_gap), 1 / (c * min_gap))``.

    A coordinate that is constant within its factor has no identifiable
    length-scale; it is flagged as frozen (with a warning) and given the
    placeholder interval ``(0.5, 2)``.
    """
    lower, upper, frozen = [], [], []
    for k, f in enumerate(design.factors):
        lo, hi, fr = np.empty(f.dim), np.empty(f.dim), np.zeros(f.dim, dtype=bool)
        for i in range(f.dim):
            gaps = np.abs(f.points[:, None, i] - f.points[None, :, i])
            positive = gaps[gaps > 0]
            if positive.size == 0:
                warnings.warn(
                    f"coordinate {i} of factor {k} is constant; its length-scale is frozen",
                    stacklevel=2,
                )
                lo[i], hi[i], fr[i] = 0.5, 2.0, True
                continue
            lo[i] = 1.0 / (C * positive.max())
            hi[i] = 1.0 / (c * positive.min())
        lower.append(lo)
        upper.append(hi)
        frozen.append(fr)
    return Bounds(lower, upper, frozen)


def init_theta(design, bounds=None):
    """Initial inverse length-scale ``n_k / range`` for each coordinate.

    Values outside ``bounds`` are pulled inside with a 1% margin. Frozen
    (constant) coordinates get 1.0.
    """
    theta = []
    for k, f in enumerate(design.factors):
        span = f.points.max(axis=0) - f.points.min(axis=0)
        t = np.ones(f.dim)
        live = span > 0
        t[live] = f.size / span[live]
        if bounds is not None:
            lo, hi, fr = bounds.lower[k], bounds.upper[k], bounds.frozen[k]
            margin = 0.01 * (hi - lo)
            t = np.where(fr, t, np.clip(t, lo + margin, hi - margin))
        theta.append(t)
    return theta


def adversarial_theta(design, bounds):
    """Start next to the degenerate configuration.

    Factors with the fewest levels get the shortest allowed length-scale
    (theta at its upper bound) and all others the longest, the opposite of
    what the level counts suggest.
    """
    n_min = min(design.shape)
    theta = []
    for k, f in enumerate(design.factors):
        lo, hi = bounds.lower[k], bounds.upper[k]
        margin = 0.01 * (hi - lo)
        t = hi - margin if f.size == n_min else lo + margin
        theta.append(np.where(bounds.frozen[k], 1.0, t))
    return theta


def init_params(data, bounds=None, theta=None):
    sd = float(np.std(data.y))
    sigma_f = sd if sd > 0 else 1.0
    if theta is None:
        theta = init_theta(data.design, bounds)
    return HyperParams(theta, sigma_f, 1e-2 * sigma_f)


def log_prior(params, spec, bounds):
    """Log density of the rescaled Beta prior over non-frozen theta.

    Returns ``-inf`` when any component sits on or outside its interval.
    """
    theta = params.to_vector()[:-2]
    lo, hi, fr = bounds.flat()
    live = ~fr
    t, a, b = theta[live], lo[live], hi[live]
    if np.any(t <= a) or np.any(t >= b):
        return -math.inf
    u = (t - a) / (b - a)
    return float(
        np.sum((spec.alpha - 1) * np.log(u) + (spec.beta - 1) * np.log1p(-u))
        - live.sum() * betaln(spec.alpha, spec.beta)
    )


def log_prior_grad(params, spec, bounds):
    """Gradient over the full parameter vector (zeros for sigma terms and frozen theta)."""
    theta = params.to_vector()[:-2]
    lo, hi, fr = bounds.flat()
    g = np.zeros(params.n_params)
    with np.errstate(divide="ignore"):
        gt = (spec.alpha - 1) / (theta - lo) - (spec.beta - 1) / (hi - theta)
    g[:-2] = np.where(fr, 0.0, gt)
    return g


def penalized_objective(data, params, spec=None, bounds=None, backend="tensor"):
    """Log likelihood plus the log prior, and its gradient.

    With ``spec`` disabled or ``None`` this is the plain log likelihood.
    """
    if spec is not None and spec.enabled:
        if bounds is None:
            bounds = compute_bounds(data.design, spec.c, spec.C)
        lp = log_prior(params, spec, bounds)
        if lp == -math.inf:
            return -math.inf, np.full(params.n_params, np.nan)
    evaluate = dense_loglik_and_grad if backend == "dense" else loglik_and_grad
    value, grad = evaluate(data, params)
    if spec is not None and spec.enabled:
        value += lp
        grad = grad + log_prior_grad(params, spec, bounds)
    return value, grad


@dataclass
class _Run:
    params: HyperParams
    value: float
    iterations: int
    termination: str
    history: list


class _Problem:
    """Map between HyperParams and the free log-space vector."""

    def __init__(self, data, spec, bounds, config, backend):
        self.data, self.spec, self.bounds = data, spec, bounds
        self.backend = backend
        self.dims = data.design.dims
        lo, hi, fr = bounds.flat()
        self.frozen = np.concatenate([fr, [False, False]])
        self.free = ~self.frozen
        self.low = np.full(len(self.frozen), -np.inf)
        self.high = np.full(len(self.frozen), np.inf)
        if spec is not None and spec.enabled:
            pad = 1e-6 * (hi - lo)
            self.low[:-2] = np.log(lo + pad)
            self.high[:-2] = np.log(hi - pad)
        sd = float(np.std(data.y))
        self.low[-1] = math.log(config.noise_floor * (sd if sd > 0 else 1.0))

    def project(self, z):
        return np.where(self.free, np.clip(z, self.low, self.high), z)

    def params(self, z):
        return HyperParams.from_vector(np.exp(z), self.dims)

    def evaluate(self, z):
        p = self.params(z)
        try:
            value, grad = penalized_objective(self.data, p, self.spec, self.bounds, self.backend)
        except (NumericalError, FloatingPointError, np.linalg.LinAlgError):
            return -math.inf, None
        if not np.isfinite(value) or not np.all(np.isfinite(grad)):
            return -math.inf, None
        # chain rule to log space; frozen coordinates do not move
        return value, np.where(self.free, grad * np.exp(z), 0.0)


def _ascend(prob, z, config):
    z = prob.project(z)
    value, grad = prob.evaluate(z)
    if not np.isfinite(value):
        return None
    history = [value]
    step = config.init_step
    prev = None
    termination = "max_iters"
    for _ in range(config.max_iters):
        # projected gradient: components pushing against an active bound do not count
        if np.max(np.abs(prob.project(z + grad) - z)) <= config.grad_tol:
            termination = "grad_tol"
            break
        if prev is not None:
            s, yv = z - prev[0], grad - prev[1]
            sy = float(s @ yv)
            if sy < 0:
                # Barzilai-Borwein step, valid where the objective is locally concave
                step = float(s @ s) / -sy
        step = min(step, config.max_log_step / max(np.max(np.abs(grad)), 1e-300))
        # near the optimum value differences drop below round-off; the slack keeps the
        # iteration going until the gradient test decides convergence
        slack = ROUNDOFF_SLACK * (1.0 + abs(value))
        for _ in range(config.max_backtracks):
            z_new = prob.project(z + step * grad)
            v_new, g_new = prob.evaluate(z_new)
            gain = config.armijo * float(grad @ (z_new - z))
            if np.isfinite(v_new) and v_new >= value + gain - slack:
                break
            step *= config.shrink
        else:
            termination = "line_search"
            break
        prev = (z, grad)
        z, value, grad = z_new, v_new, g_new
        history.append(value)
    return _Run(prob.params(z), value, len(history) - 1, termination, history)


def _starts(data, spec, bounds, config, rng):
    design = data.design
    theta0 = (adversarial_theta(design, bounds) if config.init == "adversarial"
              else init_theta(design, bounds if spec is not None and spec.enabled else None))
    base = init_params(data, theta=theta0)
    starts = [base]
    lo, hi, fr = bounds.flat()
    for _ in range(max(config.restarts - 1, 0)):
        t = np.exp(rng.uniform(np.log(lo), np.log(hi)))
        t = np.where(fr, 1.0, t)
        v = np.concatenate([t, [base.sigma_f, base.sigma_noise]])
        starts.append(HyperParams.from_vector(v, design.dims))
    starts.extend(config.initial_params)
    return starts


def optimize(data, spec=None, config=None, backend="tensor"):
    """Fit hyperparameters by multi-start gradient ascent and return a model.

    Parameters
    ----------
    data : TrainingData
    spec : PriorSpec or None
        ``None`` (or ``enabled=False``) maximises the plain likelihood.
    config : OptimizerConfig
    backend : {"tensor", "dense"}
        Likelihood implementation. ``"dense"`` is the O(N^3) reference.

    Returns
    -------
    FittedModel
        Its ``diagnostics`` record the objective, iteration count and
        termination reason of the winning restart.
    """
    config = config or OptimizerConfig()
    if spec is None:
        spec = PriorSpec(enabled=False)
    bounds = compute_bounds(data.design, spec.c, spec.C)
    prob = _Problem(data, spec, bounds, config, backend)
    rng = np.random.default_rng(config.seed)

    best, best_idx = None, -1
    starts = _starts(data, spec, bounds, config, rng)
    for idx, start in enumerate(starts):
        start.check(data.design)
        run = _ascend(prob, np.log(start.to_vector()), config)
        if run is None:
            logger.debug("restart %d produced a non-finite objective", idx)
            continue
        logger.debug("restart %d: objective %.6g after %d iterations (%s)",
                     idx, run.value, run.iterations, run.termination)
        if best is None or run.value > best.value:
            best, best_idx = run, idx
    if best is None:
        raise OptimizerError(
            f"no restart gave a finite objective; first start was {starts[0]}"
        )
    diagnostics = {
        "objective": best.value,
        "iterations": best.iterations,
        "termination": best.termination,
        "restart": best_idx,
        "prior": {"enabled": spec.enabled, "alpha": spec.alpha, "beta": spec.beta,
                  "c": spec.c, "C": spec.C},
        "bounds": {"lower": [b.tolist() for b in bounds.lower],
                   "upper": [b.tolist() for b in bounds.upper]},
        "history": best.history,
    }
    return fit(data, best.params, diagnostics)

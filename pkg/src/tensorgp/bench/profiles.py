"""Dolan-More performance profiles.

For problem ``p`` and algorithm ``a`` with metric ``t[p, a]`` (error or
time, smaller is better) the ratio is ``r = t[p, a] / min_s t[p, s]`` and
the profile ``rho_a(tau)`` is the fraction of problems with ``r <= tau``.
Failed runs carry ``t = inf`` and never count as solved.
"""

from dataclasses import dataclass
import math
import warnings

import numpy as np


@dataclass
class PerformanceProfile:
    algorithms: list
    problems: list
    ratios: np.ndarray  # (n_problems, n_algorithms)
    taus: np.ndarray  # breakpoints, ascending, starting at 1

    def rho(self, algorithm, tau):
        """Fraction of problems on which ``algorithm`` is within factor ``tau`` of the best."""
        col = self.ratios[:, self.algorithms.index(algorithm)]
        return float(np.mean(col <= tau)) if len(col) else 0.0

    def curve(self, algorithm):
        """Step-function breakpoints ``[(tau, rho), ...]``."""
        return [(float(t), self.rho(algorithm, t)) for t in self.taus]

    def rows(self):
        """``(algorithm, tau, rho, log2_tau)`` tuples for every breakpoint."""
        return [
            (a, t, r, math.log2(t))
            for a in self.algorithms
            for t, r in self.curve(a)
        ]


def _ratio(values):
    values = np.asarray(values, dtype=float)
    best = np.min(values)
    if best == 0:
        # exact zeros tie for best; anything positive is infinitely worse
        return np.where(values == 0, 1.0, np.inf)
    return values / best


def dolan_more(table, algorithms=None):
    """Build a profile from ``{problem: {algorithm: metric}}``.

    Missing entries, NaN and negative metrics are treated as failures
    (``inf``). Problems on which every algorithm failed are dropped with a
    warning.
    """
    if algorithms is None:
        algorithms = sorted({a for row in table.values() for a in row})
    algorithms = list(algorithms)
    problems, ratios = [], []
    for p in sorted(table):
        row = table[p]
        values = []
        for a in algorithms:
            v = row.get(a, math.inf)
            v = math.inf if v is None or not v >= 0 else float(v)
            values.append(v)
        if all(math.isinf(v) for v in values):
            warnings.warn(f"every algorithm failed on problem {p!r}; dropped from the profile",
                          stacklevel=2)
            continue
        problems.append(p)
        ratios.append(_ratio(values))
    ratios = np.array(ratios).reshape(len(problems), len(algorithms))
    finite = ratios[np.isfinite(ratios)]
    taus = np.unique(np.concatenate([[1.0], finite]))
    return PerformanceProfile(algorithms, problems, ratios, taus)

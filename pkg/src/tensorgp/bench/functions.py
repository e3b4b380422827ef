"""Analytic test functions and the builtin benchmark catalog.

Every evaluator takes an ``(m, d)`` array and returns ``(m,)`` values.
"""

from dataclasses import dataclass

import numpy as np

from ..exceptions import InputError


def branin(x):
    x1, x2 = x[:, 0], x[:, 1]
    b, c = 5.1 / (4 * np.pi**2), 5 / np.pi
    return (x2 - b * x1**2 + c * x1 - 6) ** 2 + 10 * (1 - 1 / (8 * np.pi)) * np.cos(x1) + 10


_H3_A = np.array([[3.0, 10, 30], [0.1, 10, 35], [3.0, 10, 30], [0.1, 10, 35]])
_H3_P = 1e-4 * np.array([[3689, 1170, 2673], [4699, 4387, 7470],
                         [1091, 8732, 5547], [381, 5743, 8828]])
_H6_A = np.array([[10, 3, 17, 3.5, 1.7, 8], [0.05, 10, 17, 0.1, 8, 14],
                  [3, 3.5, 1.7, 10, 17, 8], [17, 8, 0.05, 10, 0.1, 14]])
_H6_P = 1e-4 * np.array([[1312, 1696, 5569, 124, 8283, 5886],
                         [2329, 4135, 8307, 3736, 1004, 9991],
                         [2348, 1451, 3522, 2883, 3047, 6650],
                         [4047, 8828, 8732, 5743, 1091, 381]])
_H_ALPHA = np.array([1.0, 1.2, 3.0, 3.2])


def _hartmann(x, a, p):
    inner = np.sum(a[None] * (x[:, None, :] - p[None]) ** 2, axis=2)
    return -np.exp(-inner) @ _H_ALPHA


def hartmann3(x):
    return _hartmann(x, _H3_A, _H3_P)


def hartmann6(x):
    return _hartmann(x, _H6_A, _H6_P)


def rosenbrock(x):
    return np.sum(100 * (x[:, 1:] - x[:, :-1] ** 2) ** 2 + (1 - x[:, :-1]) ** 2, axis=1)


def rastrigin(x):
    return 10 * x.shape[1] + np.sum(x**2 - 10 * np.cos(2 * np.pi * x), axis=1)


def additive_sinusoid(x):
    return np.sin(3 * x[:, 0]) + np.cos(2 * x[:, 1])


def anisotropic(x):
    """Fast along the first input, smooth along the second."""
    return np.sin(2 * np.pi * x[:, 0]) * np.cos(np.pi * x[:, 1])


# name -> (evaluator, lower box, upper box)
FUNCTIONS = {
    "branin": (branin, [-5.0, 0.0], [10.0, 15.0]),
    "hartmann3": (hartmann3, [0.0] * 3, [1.0] * 3),
    "hartmann6": (hartmann6, [0.0] * 6, [1.0] * 6),
    "rosenbrock2": (rosenbrock, [-2.0] * 2, [2.0] * 2),
    "rosenbrock4": (rosenbrock, [-2.0] * 4, [2.0] * 4),
    "rastrigin2": (rastrigin, [-5.12] * 2, [5.12] * 2),
    "rastrigin3": (rastrigin, [-5.12] * 3, [5.12] * 3),
    "sinusoid2": (additive_sinusoid, [0.0] * 2, [2.0] * 2),
    "anisotropic2": (anisotropic, [0.0] * 2, [1.0] * 2),
}


@dataclass
class TestProblem:
    """A test function paired with a factorial design layout."""

    __test__ = False  # keep pytest from collecting this class

    name: str
    function: str
    partition: tuple
    sizes: tuple
    noise: float = 0.0

    def __post_init__(self):
        if self.function not in FUNCTIONS:
            raise InputError(f"unknown test function {self.function!r}")
        self.partition = tuple(int(p) for p in self.partition)
        self.sizes = tuple(int(s) for s in self.sizes)
        if len(self.partition) != len(self.sizes):
            raise InputError("partition and sizes must have one entry per factor")
        if sum(self.partition) != self.dim:
            raise InputError(
                f"partition {self.partition} does not cover the {self.dim} inputs of {self.function}"
            )
        if min(self.sizes) < 1:
            raise InputError("factor sizes must be positive")

    @property
    def evaluator(self):
        return FUNCTIONS[self.function][0]

    @property
    def lower(self):
        return np.array(FUNCTIONS[self.function][1])

    @property
    def upper(self):
        return np.array(FUNCTIONS[self.function][2])

    @property
    def dim(self):
        return len(FUNCTIONS[self.function][1])

    @property
    def size(self):
        return int(np.prod(self.sizes))

    def __call__(self, x):
        return self.evaluator(np.atleast_2d(np.asarray(x, dtype=float)))

    @classmethod
    def from_dict(cls, d):
        sizes = tuple(d["sizes"])
        partition = tuple(d.get("partition", (1,) * len(sizes)))
        name = d.get("name") or f"{d['function']}_" + "x".join(map(str, sizes))
        return cls(name, d["function"], partition, sizes, float(d.get("noise", 0.0)))

    def to_dict(self):
        return {"name": self.name, "function": self.function, "partition": list(self.partition),
                "sizes": list(self.sizes), "noise": self.noise}


_LAYOUTS = {
    "branin": [((1, 1), s) for s in [(15, 4), (4, 15), (20, 6), (10, 10), (30, 3)]],
    "hartmann3": [((1, 1, 1), (10, 5, 3)), ((1, 1, 1), (8, 8, 4)), ((1, 1, 1), (15, 3, 3)),
                  ((2, 1), (30, 5)), ((2, 1), (50, 4))],
    "hartmann6": [((2, 2, 2), (20, 10, 5)), ((2, 2, 2), (15, 15, 4)), ((3, 3), (40, 20)),
                  ((1,) * 6, (5, 4, 4, 3, 3, 3)), ((2, 2, 1, 1), (10, 10, 4, 3))],
    "rosenbrock2": [((1, 1), s) for s in [(15, 4), (25, 5), (10, 3), (40, 4), (8, 8)]],
    "rosenbrock4": [((1, 1, 1, 1), (8, 6, 4, 3)), ((1, 1, 1, 1), (10, 5, 5, 3)),
                    ((2, 2), (30, 10))],
    "rastrigin2": [((1, 1), s) for s in [(30, 6), (20, 10), (40, 5)]],
    "rastrigin3": [((1, 1, 1), (15, 10, 5)), ((1, 1, 1), (20, 8, 4))],
    "sinusoid2": [((1, 1), s) for s in [(15, 4), (20, 5), (10, 3), (30, 6)]],
    "anisotropic2": [((1, 1), s) for s in [(15, 4), (20, 4), (30, 5), (15, 3), (25, 3)]],
}


def builtin_suite():
    """The full catalog: every function with each of its design layouts."""
    return [
        TestProblem(f"{fn}_" + "x".join(map(str, sizes)), fn, part, sizes)
        for fn, layouts in _LAYOUTS.items()
        for part, sizes in layouts
    ]


def smoke_suite():
    """Three small problems for quick end-to-end runs."""
    return [
        TestProblem("anisotropic2_15x4", "anisotropic2", (1, 1), (15, 4)),
        TestProblem("branin_8x5", "branin", (1, 1), (8, 5)),
        TestProblem("hartmann3_6x4x3", "hartmann3", (1, 1, 1), (6, 4, 3)),
    ]


def anisotropic_problem(sizes=(15, 4), noise=0.0):
    """The two-factor anisotropic scenario (15 levels against 4 by default)."""
    return TestProblem("anisotropic2_" + "x".join(map(str, sizes)), "anisotropic2", (1, 1),
                       sizes, noise)

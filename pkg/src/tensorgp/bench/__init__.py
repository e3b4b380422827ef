"""Benchmark harness: test functions, MSE runs and Dolan-More profiles."""

from .functions import TestProblem, anisotropic_problem, builtin_suite, smoke_suite
from .harness import (
    ALGORITHMS,
    BenchConfig,
    BenchmarkRecord,
    SuiteResult,
    generate_design,
    mse,
    run_suite,
    runtime_table,
    train,
)
from .profiles import PerformanceProfile, dolan_more

__all__ = [
    "ALGORITHMS",
    "BenchConfig",
    "BenchmarkRecord",
    "PerformanceProfile",
    "SuiteResult",
    "TestProblem",
    "anisotropic_problem",
    "builtin_suite",
    "dolan_more",
    "generate_design",
    "mse",
    "run_suite",
    "runtime_table",
    "smoke_suite",
    "train",
]

"""Exception hierarchy.

Each class carries an ``exit_code`` so the command line layer can map
failures onto process exit statuses without inspecting messages.
"""


class TensorGPError(Exception):
    exit_code = 1
    category = "error"


class InputError(TensorGPError, ValueError):
    """Malformed or inconsistent input data."""

    exit_code = 2
    category = "validation"


class ParseError(InputError):
    category = "parse"


class NumericalError(TensorGPError, ArithmeticError):
    """Linear algebra broke down (non-positive spectrum, failed solver...)."""

    exit_code = 3
    category = "numeric"


class OptimizerError(TensorGPError, RuntimeError):
    exit_code = 4
    category = "optimizer"

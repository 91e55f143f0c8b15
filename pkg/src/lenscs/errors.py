"""Exception hierarchy shared by the library and the CLI.

Each class carries the process exit code the CLI reports for it.
"""


class LensCSError(Exception):
    exit_code = 3


class InvalidLensSpace(LensCSError, ValueError):
    exit_code = 2


class BudgetExceeded(LensCSError):
    """A computation would exceed its configured cost budget."""

    exit_code = 4


class ConvergenceError(LensCSError, ArithmeticError):
    """An iterative solver failed to reach its tolerance."""

    exit_code = 3


class DegenerateInput(LensCSError, ValueError):
    exit_code = 3

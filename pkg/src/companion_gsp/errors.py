"""Exception hierarchy. The CLI maps each class to an exit code."""


class GSPError(Exception):
    exit_code = 1


class InputError(GSPError, ValueError):
    """Malformed or inconsistent input (bad file, wrong shape, bad index)."""

    exit_code = 2


class AssumptionError(GSPError, ArithmeticError):
    """A numerical modelling assumption does not hold.

    Raised for repeated eigenvalues, singular sampling blocks, aliasing in a
    multiplex plan and similar conditions that are properties of the data,
    not bugs in the caller.
    """

    exit_code = 3


class InvariantError(GSPError, AssertionError):
    exit_code = 4

"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed or out-of-contract input (CLI exit code 2)."""


class ContradictionError(RuntimeError):
    """Independently computed routes of an equivalence disagree (CLI exit code 3).

    The underlying theorems make the routes provably equivalent, so a
    disagreement always signals an implementation bug, never bad input.
    """

"""Exception types shared across the package."""


class BudgetExceeded(RuntimeError):
    """An enumeration or eigensolve would exceed its configured budget."""


class InvariantViolation(AssertionError):
    """A mathematical invariant that must hold was found to fail.

    Raised instead of silently continuing, so callers (and the CLI exit code)
    can tell a genuine bug in the exact pipeline apart from a budget limit.
    """

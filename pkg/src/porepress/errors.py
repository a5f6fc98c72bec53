"""Exception types.

Argument errors are plain ``ValueError``; the classes below mark failures
that callers (and the CLI) treat differently.
"""


class GridMismatchError(ValueError):
    """Two grid objects that must coincide do not."""


class DomainError(ValueError):
    """A coefficient sample violates positivity."""


class SingularPreconditionerError(ArithmeticError):
    pass


class FactorizationError(ArithmeticError):
    """Zero pivot during an incomplete factorisation."""

    def __init__(self, row, block=None):
        self.row = row
        self.block = block
        where = f"row {row}" if block is None else f"block {block}, row {row}"
        super().__init__(f"zero pivot at {where}")


class NumericalFailureError(ArithmeticError):
    """NaN or Inf appeared in an iteration."""


class SingularMatrixError(ArithmeticError):
    pass

"""Exception types shared across the package."""


class InvalidInput(ValueError):
    """Bad shapes, non-finite entries, or parameters outside a method's domain."""


class NumericalBreakdown(ArithmeticError):
    """A barrier was violated or no admissible index exists at some step."""

    def __init__(self, message, step=None, diagnostics=None):
        if step is not None:
            message = f"{message} (step {step})"
        super().__init__(message)
        self.step = step
        self.diagnostics = diagnostics or {}


class EarlyExact(Exception):
    """Stage-one columns already reconstruct the matrix; nothing left to sample."""

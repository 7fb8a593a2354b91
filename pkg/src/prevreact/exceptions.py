class ValidationError(ValueError):
    """Raised when inputs fall outside the model's domain."""


class NoFiniteOptimumError(ArithmeticError):
    """Raised when every feasible preventive allocation has infinite cost."""

"""Exception types shared across the package."""


class DomainError(ValueError):
    """Parameter outside the region where a quantity is defined."""


class NonConvergent(ArithmeticError):
    """A series or iteration did not reach its tolerance within the term budget."""


class SingularArgument(ValueError):
    """Evaluation requested exactly at a pole or removable point we do not extend."""


class BuildError(RuntimeError):
    """Quadrature rule construction failed."""


class IntegrabilityError(ValueError):
    """Integrand is not absolutely integrable against the requested measure."""


class BudgetExhausted(RuntimeError):
    """Optimizer ran out of budget; ``result`` still holds a valid upper bound."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class QuadratureAccuracyWarning(UserWarning):
    """Evaluation point is close enough to the circle that the fixed rule degrades."""

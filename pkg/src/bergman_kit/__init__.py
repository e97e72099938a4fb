"""Numerics for the modified Bergman kernel, its Berezin transform and metric."""

from .kernel import Params, reduce
from .errors import (BudgetExhausted, BuildError, DomainError, IntegrabilityError,
                     NonConvergent, QuadratureAccuracyWarning, SingularArgument)

__version__ = "0.1.0"

__all__ = [
    "Params", "reduce", "BudgetExhausted", "BuildError", "DomainError",
    "IntegrabilityError", "NonConvergent", "QuadratureAccuracyWarning", "SingularArgument",
]

"""Exception hierarchy shared by all modules."""


class NpextError(Exception):
    """Base class for every error raised by the package."""


class DomainError(NpextError, ValueError):
    """A point or parameter lies outside the domain it was constructed for."""


class InvalidInputError(NpextError, ValueError):
    """Malformed or inconsistent user data (shapes, JSON, branch mismatch)."""


class NotSchurError(NpextError, ValueError):
    """The function is not contractive on the closed disc."""


class SingularEvaluationError(NpextError, ArithmeticError):
    """A rational formula was evaluated at (or numerically near) a pole."""


class IllConditionedFeedbackError(NpextError, ArithmeticError):
    """The feedback inverse ``(I - X)^{-1}`` is too badly conditioned to trust."""


class RealizationError(NpextError, ArithmeticError):
    """Construction of a unitary colligation failed."""


class NumericalFailureError(NpextError, ArithmeticError):
    """An iterative solver did not converge or a residual check failed."""


class InfeasibleConstraintsError(NpextError, ValueError):
    """Interpolation constraints admit no solution in the trial space."""


class RankDeficientError(NpextError, ValueError):
    """Sample points do not determine the restriction to the variety."""

    def __init__(self, message, offending=()):
        super().__init__(message)
        self.offending = list(offending)

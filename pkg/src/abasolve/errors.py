"""Exception types shared across the solver modules."""


class SolverError(Exception):
    """Base class for all abasolve errors."""


class ValidationError(SolverError):
    """An instance, scheme, or score definition violates its invariants."""


class NonFiniteScore(SolverError):
    """A score evaluated to -inf (or NaN) where a finite value is required."""


class ZeroProbabilitySignal(SolverError):
    """Conditioning on a signal that is sent with probability zero."""


class ZeroProbabilityPair(SolverError):
    """Conditioning on a (signal, bob-outcome) pair of probability zero."""


class BoundaryTangent(SolverError):
    """Tangent point on the simplex boundary where the gradient diverges."""


class SizeCapExceeded(SolverError):
    """A solver refused an instance that exceeds a configured size cap."""

    def __init__(self, message: str, required: int | None = None):
        super().__init__(message)
        self.required = required


class NumericalFailure(SolverError):
    """LP pivoting exceeded its iteration cap without converging."""


class BayesPlausibilityViolated(SolverError):
    """A posterior decomposition whose mean does not match the prior."""

    def __init__(self, message: str, residual=None):
        super().__init__(message)
        self.residual = residual


class PreconditionViolated(SolverError):
    """An operation was called outside its documented precondition."""


class ParseError(SolverError):
    """An instance, score, or scheme document is structurally malformed."""

"""Exception taxonomy shared by the proof pipeline and the CLI exit codes."""


class TricontractError(Exception):
    """Base class for all library errors."""


class DomainError(TricontractError, ArithmeticError):
    """An interval operation was applied outside its mathematical domain."""


class UnboundedError(DomainError):
    """An interval endpoint overflowed to infinity or became NaN."""


class UnsupportedRegime(TricontractError):
    """Parameters fall outside the regime covered by an estimate (e.g. s < 2)."""


class AssumptionError(TricontractError):
    """A growth or ratio assumption on the tridiagonal coefficients failed."""

    def __init__(self, message, k=None, inequality=None):
        super().__init__(message)
        self.k = k
        self.inequality = inequality


class ParameterError(TricontractError):
    """Computational parameters (m, M, L, s) violate a required condition."""


class DegenerateLU(TricontractError):
    """A pivot of the tail LU factorisation could not be bounded away from zero."""


class SingularError(TricontractError):
    """A matrix is singular to working precision."""


class ConvergenceError(TricontractError):
    """Newton's method did not reach the requested tolerance."""


class FoldError(TricontractError):
    """The extended Jacobian lost rank, so no unique tangent exists."""


class StallError(TricontractError):
    """Continuation step size fell below its minimum; carries the partial branch."""

    def __init__(self, message, points=None):
        super().__init__(message)
        self.points = points if points is not None else []


class EmptyFeasibleSet(TricontractError):
    """No radius makes every radii polynomial negative."""

    def __init__(self, message, worst_index=None, diagnostics=None):
        super().__init__(message)
        self.worst_index = worst_index
        self.diagnostics = diagnostics or {}

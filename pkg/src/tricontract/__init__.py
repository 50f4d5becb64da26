"""Computer-assisted existence proofs for zeros of tridiagonal-plus-quadratic
operators on weighted sequence spaces, via radii polynomials."""

from .errors import (
    AssumptionError,
    ConvergenceError,
    DegenerateLU,
    DomainError,
    EmptyFeasibleSet,
    FoldError,
    ParameterError,
    SingularError,
    StallError,
    TricontractError,
    UnboundedError,
    UnsupportedRegime,
)
from .interval import Interval

__version__ = "0.1.0"

__all__ = [
    "AssumptionError",
    "ConvergenceError",
    "DegenerateLU",
    "DomainError",
    "EmptyFeasibleSet",
    "FoldError",
    "Interval",
    "ParameterError",
    "SingularError",
    "StallError",
    "TricontractError",
    "UnboundedError",
    "UnsupportedRegime",
    "__version__",
]

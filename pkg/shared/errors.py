"""
Exception hierarchy for the ball-bearing library.

Every error raised on purpose derives from BearingError. The secondary base
(ValueError or ArithmeticError) tells callers whether the input was wrong or
the numerics broke down; the CLI maps the two families to exit codes 3 and 4
and unreadable scenario files (ScenarioError) to exit code 2.
"""
from typing import Any, Optional


class BearingError(Exception):
    """Base class for all library errors."""


class GeometryError(BearingError, ValueError):
    """Inadmissible geometry or infeasible initial ball placement."""


class StateError(BearingError, ValueError):
    """A state violates its invariants (unit vectors, constraints, phase space)."""


class UsageError(BearingError, ValueError):
    """An operation was called outside its domain (wrong case, bad step)."""


class DegeneracyError(BearingError, ArithmeticError):
    """A matrix or a density became singular."""


class StiffnessError(BearingError, ArithmeticError):
    """The adaptive step size fell below the minimum step."""

    def __init__(self, message: str, t: float, state: Any):
        super().__init__(message)
        self.t = t
        self.state = state


class InadmissibleAError(BearingError, ValueError):
    """The radial variable A lies outside the admissible range of the motion."""

    def __init__(self, message: str, A: float, argument: float):
        super().__init__(message)
        self.A = A
        self.argument = argument


class QuadratureRefinementError(BearingError, ArithmeticError):
    """Adaptive quadrature did not converge."""

    def __init__(self, message: str, diagnostics: Optional[dict] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class EvaluationError(BearingError, ArithmeticError):
    """A candidate integral produced a non-finite value."""

    def __init__(self, message: str, state: Any):
        super().__init__(message)
        self.state = state


class ScenarioError(BearingError):
    """A scenario file is missing or cannot be parsed."""

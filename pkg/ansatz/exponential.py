"""
Exponential first-integral ansatz F3 = (y1 F + y2 G + y3) exp(y4 Phi) for B = C.

Conservation reduces to

    (eps - 1)(A - C) y2 + y1 y4 = 0
    D (eps - 1) y1 + y2 y4 = 0
    -C d (eps - 1) y1 + y3 y4 = 0

solved with y2 = D by y1 = +/- sqrt(D(A - C)), y4 = +/- (1 - eps) sqrt(D(A - C)),
y3 = -d C. For A < C the square roots are imaginary.
"""
import cmath
import logging
from dataclasses import dataclass
from typing import Tuple, Union

from core.params import SphericalParams
from invariants.symmetric import symmetric_axis_quantities
from shared.errors import UsageError
from spherical.schemas import ReducedState

logger = logging.getLogger(__name__)

Number = Union[float, complex]


@dataclass(frozen=True)
class ExponentialAnsatz:
    y1: Number
    y2: Number
    y3: Number
    y4: Number
    branch: int
    degenerate: bool = False      # A = C: both branches collapse to y1 = y4 = 0

    def evaluate(self, params: SphericalParams, state: ReducedState) -> complex:
        """(y1 F + y2 G + y3) exp(y4 Phi) at a one-ball state."""
        q = symmetric_axis_quantities(params, state)
        return (self.y1 * q.F + self.y2 * q.G + self.y3) * cmath.exp(self.y4 * q.Phi)


def _real_if_possible(z: complex) -> Number:
    return z.real if z.imag == 0 else z


def solve_exponential(A: float, C: float, D: float, d: float, eps: float) -> Tuple[ExponentialAnsatz, ExponentialAnsatz]:
    """
    Both branches of the exponential ansatz.

    Args:
        A, C: Principal inertias (B = C)
        D: Ball weight delta^2 (I_1 + m_1 r^2), positive
        d: delta I_1 c_1
        eps: Epsilon

    Returns:
        (plus branch, minus branch)
    """
    if D <= 0:
        raise UsageError(f"D must be positive, got {D}")
    root = cmath.sqrt(D * (A - C))
    degenerate = A == C
    if degenerate:
        logger.warning("A = C: the exponential ansatz degenerates to y1 = y4 = 0")
    branches = []
    for sign in (1, -1):
        branches.append(ExponentialAnsatz(
            y1=_real_if_possible(sign * root),
            y2=D,
            y3=-d * C,
            y4=_real_if_possible(sign * (1 - eps) * root),
            branch=sign,
            degenerate=degenerate,
        ))
    return branches[0], branches[1]


def solve_for(params: SphericalParams, c: float) -> Tuple[ExponentialAnsatz, ExponentialAnsatz]:
    """solve_exponential with A, C, D, d and eps taken from one-ball parameters."""
    if params.n != 1:
        raise UsageError(f"the exponential ansatz is set up for one ball, got n={params.n}")
    D = float(params.ball_weights[0])
    d = params.delta * params.inertias[0] * c
    return solve_exponential(params.A, params.C, D, d, params.epsilon)


def residuals(ansatz: ExponentialAnsatz, A: float, C: float, D: float, d: float, eps: float) -> Tuple[float, float, float]:
    """Absolute residuals of the three conservation conditions."""
    y1, y2, y3, y4 = ansatz.y1, ansatz.y2, ansatz.y3, ansatz.y4
    return (
        abs((eps - 1) * (A - C) * y2 + y1 * y4),
        abs(D * (eps - 1) * y1 + y2 * y4),
        abs(-C * d * (eps - 1) * y1 + y3 * y4),
    )

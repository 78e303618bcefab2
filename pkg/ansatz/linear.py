"""
Linear first-integral ansatz F3 = x1 M_1 Gamma_1 + x2 M_2 Gamma_2 + x3 M_3 Gamma_3
for the one-ball system, M being the total momentum M + N.

Requiring dF3/dt = 0 along the flow splits into nine monomial groups; each
gives one linear equation in x. The integrals of this form are the
nullspace of the resulting 9x3 matrix.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
import scipy.linalg

from core.params import SphericalParams
from shared.config import settings
from shared.errors import UsageError
from spherical.dynamics import derived_quantities, momentum_rate, reduced_field
from spherical.schemas import ReducedState

logger = logging.getLogger(__name__)

ROW_LABELS: Tuple[str, ...] = (
    "G1 W2 W3",
    "W1 G2 W3",
    "W1 W2 G3",
    "G1 G2 W3",
    "G1 W2 G3",
    "W1 G2 G3",
    "L G1 G2 W3",
    "L G1 W2 G3",
    "L W1 G2 G3",
)
TOL_RANGE = (1e-14, 1e-6)


@dataclass(frozen=True)
class LinearAnsatzSystem:
    matrix: np.ndarray           # (9, 3)
    A: float
    B: float
    C: float
    D: float
    d: float
    eps: float

    @property
    def row_labels(self) -> Tuple[str, ...]:
        return ROW_LABELS


def build_linear_system(A: float, B: float, C: float, D: float, d: float, eps: float) -> LinearAnsatzSystem:
    """
    Coefficient matrix of the nine monomial conditions on (x1, x2, x3).

    Rows follow ROW_LABELS (G = Gamma, W = Omega, L = <Omega, Gamma>).
    """
    p = 1.0 + eps
    matrix = np.array([
        [B - C, -eps * (B + D), eps * (C + D)],
        [eps * (A + D), C - A, -eps * (C + D)],
        [-eps * (A + D), eps * (B + D), A - B],
        [p * d, -p * d, 0.0],
        [-p * d, 0.0, p * d],
        [0.0, p * d, -p * d],
        [-p * D, p * D, 0.0],
        [p * D, 0.0, -p * D],
        [0.0, -p * D, p * D],
    ])
    return LinearAnsatzSystem(matrix=matrix, A=A, B=B, C=C, D=D, d=d, eps=eps)


def system_for(params: SphericalParams, c: float) -> LinearAnsatzSystem:
    """Build the system for a one-ball parameter set on the level <Omega_1, Gamma_1> = c."""
    if params.n != 1:
        raise UsageError(f"the linear ansatz is set up for one ball, got n={params.n}")
    D = float(params.ball_weights[0])
    d = params.delta * params.inertias[0] * c
    return build_linear_system(params.A, params.B, params.C, D, d, params.epsilon)


def nullspace(system: LinearAnsatzSystem, tol: Optional[float] = None) -> List[np.ndarray]:
    """
    Orthonormal nullspace basis by singular-value thresholding.

    Args:
        system: Linear ansatz system
        tol: Relative threshold in [1e-14, 1e-6] (defaults to settings.nullspace_tolerance)

    Returns:
        List of unit vectors, each with its first nonzero component positive;
        empty when only x = 0 solves the system
    """
    tol = settings.nullspace_tolerance if tol is None else tol
    if not (TOL_RANGE[0] <= tol <= TOL_RANGE[1]):
        raise UsageError(f"nullspace tolerance {tol} outside [{TOL_RANGE[0]}, {TOL_RANGE[1]}]")

    K = system.matrix
    scale = float(np.max(np.abs(K)))
    if scale == 0.0:
        return [row for row in np.eye(3)]

    _, s, Vt = scipy.linalg.svd(K / scale)
    rank = int(np.sum(s > tol * s[0]))
    basis = []
    for x in Vt[rank:]:
        lead = x[np.flatnonzero(np.abs(x) > tol)[0]]
        basis.append(x if lead > 0 else -x)
    logger.debug(f"nullspace dimension {len(basis)} at eps={system.eps}")
    return basis


def linear_integral(params: SphericalParams, state: ReducedState, x: np.ndarray) -> float:
    """Value of sum x_k (M + N)_k Gamma_k."""
    q = derived_quantities(params, state)
    return float(np.sum(np.asarray(x) * q.total_momentum * state.gammas[0]))


def linear_integral_rate(params: SphericalParams, state: ReducedState, x: np.ndarray) -> float:
    """Time derivative of linear_integral along the reduced field."""
    rates = reduced_field(params, state)
    total = derived_quantities(params, state).total_momentum
    total_dot = momentum_rate(params, state, rates)
    gamma, gamma_dot = state.gammas[0], rates.gammas_dot[0]
    return float(np.sum(np.asarray(x) * (total_dot * gamma + total * gamma_dot)))

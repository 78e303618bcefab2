"""
Lagrange-multiplier oracle for the spherical ball bearing.

Works in the unreduced velocities (Omega, Omega_i, V_{O_i}) and treats the
contact reactions F_{A_i}, F_{B_i} as unknowns. The momentum balances of the
balls and the sphere, together with the time derivatives of the rolling
constraints

    V_{O_i} = sigma r Omega_i x Gamma_i,     Omega_i x Gamma_i = delta Omega x Gamma_i,

form one linear system in the accelerations and the reactions. Only the
accelerations are unique: the radial parts of F_{A_i} and F_{B_i} enter
through their sum, so the system is solved in the least-squares sense and
its rank is checked.

This module exists to cross-check reduced_field and is not used for
integration.
"""
import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from core.geometry import hat
from core.params import SphericalParams
from shared.config import settings
from shared.errors import DegeneracyError, StateError

from .dynamics import ball_angular_velocities
from .schemas import ConstrainedState, ReducedState

logger = logging.getLogger(__name__)

Array = np.ndarray


@dataclass(frozen=True)
class OracleRates:
    """Accelerations, kinematic rates and contact reactions from the oracle."""
    omega_dot: Array             # (3,)
    omega_balls_dot: Array       # (n, 3)
    velocities_dot: Array        # (n, 3)
    gammas_dot: Array            # (n, 3)
    forces_A: Array              # (n, 3) reaction at the fixed-sphere contact
    forces_B: Array              # (n, 3) reaction at the moving-sphere contact


def constrained_state(params: SphericalParams, state: ReducedState) -> ConstrainedState:
    """Lift a reduced state to the constraint manifold."""
    balls = ball_angular_velocities(params, state)
    velocities = params.sigma * params.r * np.cross(balls, state.gammas)
    return ConstrainedState(omega=state.omega, omega_balls=balls, velocities=velocities, gammas=state.gammas)


def constraint_residual(params: SphericalParams, state: ConstrainedState) -> float:
    """Largest violation of the two rolling constraints over all balls."""
    worst = 0.0
    for w_i, v_i, gamma in zip(state.omega_balls, state.velocities, state.gammas):
        slip = v_i - params.sigma * params.r * np.cross(w_i, gamma)
        roll = np.cross(w_i, gamma) - params.delta * np.cross(state.omega, gamma)
        worst = max(worst, float(np.max(np.abs(slip))), float(np.max(np.abs(roll))))
    return worst


def oracle_field(params: SphericalParams, state: ConstrainedState) -> OracleRates:
    """
    Solve the momentum balances with reactions eliminated through the constraints.

    Args:
        params: System parameters
        state: Velocities satisfying the rolling constraints

    Returns:
        OracleRates

    Raises:
        StateError: if the constraints are violated beyond constraint_tolerance
        DegeneracyError: if the force-determination system loses rank
    """
    n = state.n
    sigma, r, delta = params.sigma, params.r, params.delta
    scale = 1.0 + float(np.max(np.abs(np.concatenate([state.omega, state.omega_balls.ravel()]))))
    residual = constraint_residual(params, state)
    if residual > settings.constraint_tolerance * scale:
        raise StateError(f"state violates the rolling constraints (residual {residual:.3e})")

    omega = state.omega
    inertia = params.inertia
    # dGamma/dt from the ball-centre velocity V = l (dGamma/dt + Omega x Gamma)
    gammas_dot = state.velocities / params.center_distance - np.cross(omega, state.gammas)

    size = 3 + 12 * n
    K = np.zeros((size, size))
    b = np.zeros(size)

    K[0:3, 0:3] = inertia
    b[0:3] = np.cross(inertia @ omega, omega)

    for i in range(n):
        gamma = state.gammas[i]
        G = hat(gamma)
        w_i, v_i, gd = state.omega_balls[i], state.velocities[i], gammas_dot[i]
        I_i, m_i = params.inertias[i], params.masses[i]
        col = 3 + 12 * i
        wd, vd, fa, fb = (slice(col + 3 * k, col + 3 * k + 3) for k in range(4))
        row = 3 + 12 * i

        # sphere: I dOmega/dt = I Omega x Omega - sigma 2 r delta sum Gamma_i x F_{B_i}
        K[0:3, fb] = sigma * 2 * r * delta * G

        # ball angular momentum
        rows = slice(row, row + 3)
        K[rows, wd] = I_i * np.eye(3)
        K[rows, fb] = -sigma * r * G
        K[rows, fa] = sigma * r * G
        b[rows] = I_i * np.cross(w_i, omega)

        # ball linear momentum
        rows = slice(row + 3, row + 6)
        K[rows, vd] = m_i * np.eye(3)
        K[rows, fa] = -np.eye(3)
        K[rows, fb] = -np.eye(3)
        b[rows] = m_i * np.cross(v_i, omega)

        # d/dt of V = sigma r Omega_i x Gamma
        rows = slice(row + 6, row + 9)
        K[rows, vd] = np.eye(3)
        K[rows, wd] = sigma * r * G
        b[rows] = sigma * r * np.cross(w_i, gd)

        # d/dt of Omega_i x Gamma = delta Omega x Gamma
        rows = slice(row + 9, row + 12)
        K[rows, wd] = -G
        K[rows, 0:3] = delta * G
        b[rows] = np.cross(delta * omega - w_i, gd)

    x, _, rank, _ = scipy.linalg.lstsq(K, b)
    expected = 3 + 11 * n
    if rank < expected:
        raise DegeneracyError(f"force-determination system has rank {rank}, expected {expected}")

    blocks = x[3:].reshape(n, 4, 3)
    return OracleRates(
        omega_dot=x[0:3],
        omega_balls_dot=blocks[:, 0, :],
        velocities_dot=blocks[:, 1, :],
        gammas_dot=gammas_dot,
        forces_A=blocks[:, 2, :],
        forces_B=blocks[:, 3, :],
    )

"""
Reduced and full equations of motion of the spherical ball bearing.

The reduced system on R^3 x (S^2)^n is

    d/dt (M + N) = (M + N) x Omega,      dGamma_i/dt = eps Gamma_i x Omega,

with M = bold_I Omega and N = delta sum I_i c_i Gamma_i. For general n the
angular acceleration is obtained by moving every dGamma/dt-induced term of
d(M + N)/dt to the right-hand side and solving one symmetric 3x3 system.
"""
import logging
from typing import Sequence

import numpy as np
import scipy.linalg

from core.geometry import hat
from core.params import SphericalParams
from shared.config import settings
from shared.errors import DegeneracyError, UsageError

from .schemas import DerivedQuantities, FullRates, FullState, ReducedRates, ReducedState

logger = logging.getLogger(__name__)

Array = np.ndarray


def modified_inertia(params: SphericalParams, gammas: Sequence[Array]) -> Array:
    """
    Modified inertia operator bold_I = diag(A, B, C) + sum D_i (1 - Gamma_i Gamma_i^T).

    Args:
        params: System parameters
        gammas: Unit vectors Gamma_i, shape (n, 3)

    Returns:
        Symmetric 3x3 matrix
    """
    gammas = np.atleast_2d(np.asarray(gammas, dtype=np.float64))
    I_mod = params.inertia.copy()
    for D_i, gamma in zip(params.ball_weights, gammas):
        I_mod += D_i * (np.eye(3) - np.outer(gamma, gamma))
    return I_mod


def degeneracy_scale(params: SphericalParams) -> float:
    """(A + D)(B + D)(C + D) with D = sum D_i; the scale of det bold_I."""
    D = float(np.sum(params.ball_weights))
    return (params.A + D) * (params.B + D) * (params.C + D)


def check_inertia(params: SphericalParams, I_mod: Array) -> float:
    """Return det bold_I or raise DegeneracyError below the relative threshold."""
    det = float(np.linalg.det(I_mod))
    threshold = settings.degeneracy_ratio * degeneracy_scale(params)
    if det <= threshold:
        raise DegeneracyError(f"modified inertia is singular (det = {det:.3e}, threshold {threshold:.3e})")
    return det


def omega_ball(params: SphericalParams, omega: Array, gamma: Array, c: float) -> Array:
    """
    Angular velocity of a ball in the sphere frame on the level <Omega_i, Gamma_i> = c.

    Omega_i = c Gamma_i + delta Omega - delta <Gamma_i, Omega> Gamma_i
    """
    omega = np.asarray(omega, dtype=np.float64)
    gamma = np.asarray(gamma, dtype=np.float64)
    delta = params.delta
    return c * gamma + delta * omega - delta * np.dot(gamma, omega) * gamma


def ball_angular_velocities(params: SphericalParams, state: ReducedState) -> Array:
    return np.array([omega_ball(params, state.omega, g, c) for g, c in zip(state.gammas, state.c)])


def derived_quantities(params: SphericalParams, state: ReducedState) -> DerivedQuantities:
    """Evaluate bold_I, M, N and M + N; D, d and L are filled in for one ball."""
    I_mod = modified_inertia(params, state.gammas)
    M = I_mod @ state.omega
    N = params.delta * np.sum(np.asarray(params.inertias)[:, None] * state.c[:, None] * state.gammas, axis=0)
    extra = {}
    if params.n == 1:
        extra = dict(
            D=float(params.ball_weights[0]),
            d=float(params.delta * params.inertias[0] * state.c[0]),
            L=float(np.dot(state.omega, state.gammas[0])),
        )
    return DerivedQuantities(modified_inertia=I_mod, M=M, N=N, total_momentum=M + N, **extra)


def reduced_field(params: SphericalParams, state: ReducedState) -> ReducedRates:
    """
    Vector field of the reduced system.

    Args:
        params: System parameters
        state: Reduced state (unit Gamma_i)

    Returns:
        ReducedRates with dOmega/dt and dGamma_i/dt

    Raises:
        DegeneracyError: if bold_I is numerically singular
    """
    eps = params.epsilon
    omega = state.omega
    q = derived_quantities(params, state)
    check_inertia(params, q.modified_inertia)

    gammas_dot = eps * np.cross(state.gammas, omega)

    # bold_I dOmega/dt = (M + N) x Omega - dN/dt - (d bold_I/dt) Omega
    rhs = np.cross(q.total_momentum, omega) - eps * np.cross(q.N, omega)
    for D_i, gamma in zip(params.ball_weights, state.gammas):
        L_i = np.dot(gamma, omega)
        rhs += eps * D_i * L_i * np.cross(gamma, omega)

    omega_dot = scipy.linalg.solve(q.modified_inertia, rhs, assume_a="sym")
    return ReducedRates(omega_dot=omega_dot, gammas_dot=gammas_dot)


def explicit_field_single(params: SphericalParams, state: ReducedState) -> ReducedRates:
    """
    Closed form of the one-ball field:
    bold_I dOmega/dt = I Omega x Omega + (eps - 1)(D L - d) Gamma x Omega.
    """
    if params.n != 1:
        raise UsageError("explicit form exists for one ball only")
    eps = params.epsilon
    q = derived_quantities(params, state)
    check_inertia(params, q.modified_inertia)
    omega, gamma = state.omega, state.gammas[0]
    rhs = np.cross(params.inertia @ omega, omega) + (eps - 1.0) * (q.D * q.L - q.d) * np.cross(gamma, omega)
    omega_dot = np.linalg.solve(q.modified_inertia, rhs)
    return ReducedRates(omega_dot=omega_dot, gammas_dot=eps * np.cross(state.gammas, omega))


def momentum_rate(params: SphericalParams, state: ReducedState, rates: ReducedRates = None) -> Array:
    """
    d(M + N)/dt by the chain rule from the field values.

    Args:
        params: System parameters
        state: Reduced state
        rates: Precomputed field at the state (evaluated when omitted)

    Returns:
        Vector of shape (3,)
    """
    rates = reduced_field(params, state) if rates is None else rates
    omega = state.omega
    I_mod = modified_inertia(params, state.gammas)
    result = I_mod @ rates.omega_dot
    for D_i, I_i, c_i, gamma, gamma_dot in zip(
        params.ball_weights, params.inertias, state.c, state.gammas, rates.gammas_dot
    ):
        result -= D_i * (gamma_dot * np.dot(gamma, omega) + gamma * np.dot(gamma_dot, omega))
        result += params.delta * I_i * c_i * gamma_dot
    return result


def full_field(params: SphericalParams, state: FullState) -> FullRates:
    """
    Complete equations of motion including the attitudes.

    dg/dt = g hat(Omega), dg_i/dt = hat(omega_i) g_i with omega_i = g Omega_i the
    ball's spatial angular velocity, i.e. dg_i/dt = g hat(Omega_i) g^T g_i.
    """
    reduced = state.reduced
    rates = reduced_field(params, reduced)
    g = state.g
    g_dot = g @ hat(reduced.omega)
    balls = ball_angular_velocities(params, reduced)
    g_balls_dot = np.array([g @ hat(w) @ g.T @ gi for w, gi in zip(balls, state.g_balls)])
    return FullRates(reduced=rates, g_dot=g_dot, g_balls_dot=g_balls_dot)

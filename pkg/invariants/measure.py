"""
Invariant measure of the reduced spherical system and its numerical verification.

The flow preserves mu * dOmega * dS^2 ... dS^2 with mu = sqrt(det bold_I),
where bold_I = diag(A, B, C) - Pi and
Pi = delta^2 sum (I_i + m_i r^2)(Gamma_i Gamma_i^T - 1) evolves as
dPi/dt = eps [Pi, hat(Omega)].
"""
import logging
from typing import Callable, List, Tuple

import numpy as np

from core.geometry import hat
from core.params import SphericalParams
from shared.errors import UsageError
from spherical.dynamics import check_inertia, modified_inertia, reduced_field
from spherical.schemas import ReducedState

logger = logging.getLogger(__name__)

Array = np.ndarray

STEP_RANGE = (1e-7, 1e-2)


def measure_density(params: SphericalParams, gammas: Array) -> float:
    """
    Density mu = sqrt(det bold_I).

    Raises:
        DegeneracyError: if det bold_I is not safely positive
    """
    return float(np.sqrt(check_inertia(params, modified_inertia(params, gammas))))


def pi_operator(params: SphericalParams, gammas: Array) -> Array:
    gammas = np.atleast_2d(np.asarray(gammas, dtype=np.float64))
    Pi = np.zeros((3, 3))
    for D_i, gamma in zip(params.ball_weights, gammas):
        Pi += D_i * (np.outer(gamma, gamma) - np.eye(3))
    return Pi


def pi_rate(params: SphericalParams, state: ReducedState) -> Array:
    """eps [Pi, hat(Omega)]."""
    Pi = pi_operator(params, state.gammas)
    W = hat(state.omega)
    return params.epsilon * (Pi @ W - W @ Pi)


def check_step(h: float) -> None:
    if not (STEP_RANGE[0] <= h <= STEP_RANGE[1]):
        raise UsageError(f"finite-difference step h={h} outside [{STEP_RANGE[0]}, {STEP_RANGE[1]}]")


def finite_difference_divergence(weighted_field: Callable[[Array], Array], x0: Array, h: float) -> float:
    """
    Central-difference divergence sum_a d(F_a)/dx_a at x0.

    Args:
        weighted_field: Map R^k -> R^k, typically density times vector field in chart coordinates
        x0: Evaluation point
        h: Step

    Returns:
        Divergence estimate, accurate to O(h^2)
    """
    check_step(h)
    x0 = np.asarray(x0, dtype=np.float64)
    total = 0.0
    for a in range(x0.size):
        e = np.zeros_like(x0)
        e[a] = h
        total += (weighted_field(x0 + e)[a] - weighted_field(x0 - e)[a]) / (2 * h)
    return float(total)


def tangent_frame(gamma: Array) -> Tuple[Array, Array]:
    """Orthonormal e1, e2 spanning the tangent plane of S^2 at gamma."""
    gamma = np.asarray(gamma, dtype=np.float64)
    axis = np.zeros(3)
    axis[int(np.argmin(np.abs(gamma)))] = 1.0
    e1 = np.cross(gamma, axis)
    e1 /= np.linalg.norm(e1)
    return e1, np.cross(gamma, e1)


class _SphereCharts:
    """Gnomonic charts (u, v) = (<G, e1>, <G, e2>) / <G, G0> centred at each Gamma_i."""

    def __init__(self, state: ReducedState):
        self.omega0 = state.omega
        self.gamma0 = state.gammas
        self.frames: List[Tuple[Array, Array]] = [tangent_frame(g) for g in state.gammas]
        self.c = state.c

    def to_state(self, z: Array) -> ReducedState:
        gammas = []
        for i, (g0, (e1, e2)) in enumerate(zip(self.gamma0, self.frames)):
            u, v = z[3 + 2 * i:5 + 2 * i]
            p = g0 + u * e1 + v * e2
            gammas.append(p / np.linalg.norm(p))
        return ReducedState(omega=self.omega0 + z[:3], gammas=np.array(gammas), c=self.c)

    def chart_field(self, state: ReducedState, gammas_dot: Array) -> Tuple[Array, float]:
        """Chart components of the Gamma rates and the product of area factors (1 + u^2 + v^2)^(-3/2)."""
        comps = []
        area = 1.0
        for g, gd, g0, (e1, e2) in zip(state.gammas, gammas_dot, self.gamma0, self.frames):
            s, sd = np.dot(g, g0), np.dot(gd, g0)
            u, v = np.dot(g, e1) / s, np.dot(g, e2) / s
            comps.append((np.dot(gd, e1) * s - np.dot(g, e1) * sd) / s ** 2)
            comps.append((np.dot(gd, e2) * s - np.dot(g, e2) * sd) / s ** 2)
            area *= (1.0 + u * u + v * v) ** -1.5
        return np.array(comps), area


def verify_measure(params: SphericalParams, state: ReducedState, h: float = 1e-4, weighted: bool = True) -> float:
    """
    Finite-difference divergence of mu X at a state, divided by mu.

    Args:
        params: System parameters
        state: Interior admissible state
        h: Central-difference step in [1e-7, 1e-2]
        weighted: Use mu = sqrt(det bold_I); False drops mu and keeps only the sphere area factors

    Returns:
        Residual, O(h^2) about zero when weighted
    """
    check_step(h)
    charts = _SphereCharts(state)

    def weighted_field(z: Array) -> Array:
        s = charts.to_state(z)
        rates = reduced_field(params, s)
        comps, area = charts.chart_field(s, rates.gammas_dot)
        density = area * (measure_density(params, s.gammas) if weighted else 1.0)
        return density * np.concatenate([rates.omega_dot, comps])

    z0 = np.zeros(3 + 2 * state.n)
    scale = measure_density(params, state.gammas) if weighted else 1.0
    return finite_difference_divergence(weighted_field, z0, h) / scale

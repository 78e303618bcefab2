"""
Reduced equations of the planar ball bearing and their level-set reduction.

On the region delta M > N1^2 + N2^2 the system reads

    bold_I dv/dt = m(v, n),     dn/dt = J(n) v

and has the integrals f1, f2 (momenta), f3 = delta M - |N|^2 and the energy f4.
Fixing f1, f2, f3 closes the motion in (v_phi, N1, N2).
"""
import logging
import math
from typing import Sequence, Tuple

import numpy as np
import scipy.linalg

from invariants.measure import finite_difference_divergence
from shared.errors import StateError

from .schemas import LevelSetData, PlanarParams, PlanarState

logger = logging.getLogger(__name__)

Array = np.ndarray


def inertia_matrix(params: PlanarParams, state: PlanarState) -> Array:
    a = params.m + params.delta
    return np.array([
        [a, 0.0, -state.N2],
        [0.0, a, state.N1],
        [-state.N2, state.N1, params.I + state.M],
    ])


def coupling_matrix(params: PlanarParams, state: PlanarState) -> Array:
    delta = params.delta
    return -0.5 * np.array([
        [delta, 0.0, state.N2],
        [0.0, delta, -state.N1],
        [2 * state.N1, 2 * state.N2, 0.0],
    ])


def gyroscopic_vector(params: PlanarParams, state: PlanarState) -> Array:
    delta, vphi = params.delta, state.vphi
    return 0.5 * np.array([
        state.N1 * vphi ** 2 - delta * vphi * state.vy,
        state.N2 * vphi ** 2 + delta * vphi * state.vx,
        vphi * (state.N1 * state.vx + state.N2 * state.vy),
    ])


def planar_det(params: PlanarParams, state: PlanarState) -> float:
    """det bold_I = (m + delta)((m + delta) I + m M + f3)."""
    a = params.m + params.delta
    return a * (a * params.I + params.m * state.M + state.f3(params))


def planar_field(params: PlanarParams, state: PlanarState) -> Array:
    """
    Right-hand side (dv/dt, dn/dt) as a vector of length 6.

    Raises:
        StateError: if the state is off the admissible region
    """
    state.validate(params)
    v = np.array([state.vx, state.vy, state.vphi])
    v_dot = scipy.linalg.solve(inertia_matrix(params, state), gyroscopic_vector(params, state), assume_a="sym")
    n_dot = coupling_matrix(params, state) @ v
    return np.concatenate([v_dot, n_dot])


def planar_integrals(params: PlanarParams, state: PlanarState) -> Tuple[float, float, float, float]:
    a = params.m + params.delta
    f1 = a * state.vx - state.vphi * state.N2
    f2 = a * state.vy + state.vphi * state.N1
    f3 = state.f3(params)
    f4 = (
        0.5 * (params.I + state.M) * state.vphi ** 2
        + 0.5 * a * (state.vx ** 2 + state.vy ** 2)
        + state.vphi * (state.N1 * state.vy - state.N2 * state.vx)
    )
    return f1, f2, f3, f4


def planar_state_from_contacts(params: PlanarParams, v: Sequence[float], contact_points: Sequence[Sequence[float]]) -> PlanarState:
    """
    Build a state from velocities and the contact points B_i of the balls with the plane.

    N = sum delta_i OB_i and M = sum delta_i |OB_i|^2, in the plane frame.
    """
    points = np.asarray(contact_points, dtype=np.float64).reshape(-1, 2)
    if points.shape[0] != params.n:
        raise StateError(f"{points.shape[0]} contact points for {params.n} balls")
    weights = params.ball_deltas
    N = weights @ points
    M = float(weights @ np.sum(points ** 2, axis=1))
    vx, vy, vphi = (float(x) for x in v)
    return PlanarState(vx=vx, vy=vy, vphi=vphi, N1=float(N[0]), N2=float(N[1]), M=M)


def reduce_to_level_set(params: PlanarParams, state: PlanarState) -> Tuple[LevelSetData, Array]:
    """
    Level-set constants and the reduced coordinates (v_phi, N1, N2).

    Returns:
        (LevelSetData, array [v_phi, N1, N2])
    """
    state.validate(params)
    m, delta, a = params.m, params.delta, params.m + params.delta
    d1, d2, d3, _ = planar_integrals(params, state)
    d5 = a ** 2 * (params.I * delta + d3) / delta
    c = m * a / delta
    A0 = state.A
    d6 = state.vphi * math.sqrt(d5 + c * A0 ** 2)
    alpha = math.atan2(d2, d1)
    k = delta * math.hypot(d1, d2) / (2 * a)
    s = (m + 2 * delta) * delta * d6 / (2 * m * a ** 2)
    d7 = k * A0 * math.sin(state.theta - alpha) + s * math.sqrt(d5 + c * A0 ** 2)
    level = LevelSetData(m=m, delta=delta, d1=d1, d2=d2, d3=d3, d5=d5, d6=d6, d7=d7, alpha=alpha, k=k)
    return level, np.array([state.vphi, state.N1, state.N2])


def level_set_field(level: LevelSetData, y: Array) -> Array:
    """Right-hand side of the closed (v_phi, N1, N2) system."""
    vphi, N1, N2 = y
    m, delta = level.m, level.delta
    a = m + delta
    det = level.d5 + level.c * (N1 ** 2 + N2 ** 2)
    return np.array([
        m * vphi * (N1 * level.d1 + N2 * level.d2) / (2 * det),
        -level.kappa * N2 * vphi - delta * level.d1 / (2 * a),
        level.kappa * N1 * vphi - delta * level.d2 / (2 * a),
    ])


def lift_from_level_set(level: LevelSetData, y: Array) -> PlanarState:
    """Recover v_x, v_y from f1, f2 and M from f3."""
    vphi, N1, N2 = (float(v) for v in y)
    a = level.m + level.delta
    return PlanarState(
        vx=(level.d1 + vphi * N2) / a,
        vy=(level.d2 - vphi * N1) / a,
        vphi=vphi,
        N1=N1,
        N2=N2,
        M=(level.d3 + N1 ** 2 + N2 ** 2) / level.delta,
    )


def remark_integral(level: LevelSetData, vphi: float, A: float) -> float:
    """c v_phi^2 A^2 + d5 v_phi^2, constant and equal to d6^2."""
    return level.c * vphi ** 2 * A ** 2 + level.d5 * vphi ** 2


def verify_planar_measure(params: PlanarParams, state: PlanarState, h: float = 1e-4, weighted: bool = True) -> float:
    """Finite-difference divergence of sqrt(det bold_I) X over (v, n), divided by the density."""

    def weighted_field(y: Array) -> Array:
        s = PlanarState.from_vector(y)
        density = math.sqrt(planar_det(params, s)) if weighted else 1.0
        return density * planar_field(params, s)

    scale = math.sqrt(planar_det(params, state)) if weighted else 1.0
    return finite_difference_divergence(weighted_field, state.to_vector(), h) / scale

"""
Seeded random states for tests, certification and sweeps.
"""
import logging
from typing import Optional

import numpy as np

from core.params import SphericalParams
from shared.errors import GeometryError

from .schemas import FullState, ReducedState

logger = logging.getLogger(__name__)

MAX_ATTEMPTS = 10_000


def random_unit(rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def random_reduced_state(
    params: SphericalParams,
    rng: np.random.Generator,
    omega_scale: float = 1.0,
    c_scale: float = 1.0,
) -> ReducedState:
    """
    Draw Omega ~ N(0, omega_scale^2), Gamma_i uniform on S^2 and c_i ~ N(0, c_scale^2).

    For cases I and II with n >= 2 the ball directions are rejection-sampled
    until every pair respects the separation bound.

    Args:
        params: System parameters
        rng: numpy Generator
        omega_scale: Standard deviation of the Omega components
        c_scale: Standard deviation of the c_i

    Returns:
        ReducedState

    Raises:
        GeometryError: if no admissible ball arrangement is found
    """
    bound: Optional[float] = params.min_separation if params.n >= 2 else None
    for attempt in range(MAX_ATTEMPTS):
        gammas = np.array([random_unit(rng) for _ in range(params.n)])
        if bound is None or _separated(gammas, bound):
            break
    else:
        raise GeometryError(f"no admissible arrangement of {params.n} balls after {MAX_ATTEMPTS} draws")
    if attempt:
        logger.debug(f"ball arrangement accepted after {attempt + 1} draws")

    return ReducedState(
        omega=omega_scale * rng.normal(size=3),
        gammas=gammas,
        c=c_scale * rng.normal(size=params.n),
    )


def random_full_state(params: SphericalParams, rng: np.random.Generator, **kwargs) -> FullState:
    """Random reduced state with identity attitudes."""
    return FullState.at_identity(random_reduced_state(params, rng, **kwargs))


def _separated(gammas: np.ndarray, bound: float) -> bool:
    diffs = gammas[:, None, :] - gammas[None, :, :]
    dist = np.linalg.norm(diffs, axis=-1)
    iu = np.triu_indices(len(gammas), k=1)
    return bool(np.all(dist[iu] >= bound))

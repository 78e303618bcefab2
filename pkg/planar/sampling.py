"""
Seeded random planar states.
"""
import logging

import numpy as np

from shared.errors import DegeneracyError, StateError

from .dynamics import reduce_to_level_set
from .quadrature import admissible_interval
from .schemas import PlanarParams, PlanarState

logger = logging.getLogger(__name__)

MAX_ATTEMPTS = 10_000


def random_planar_state(params: PlanarParams, rng: np.random.Generator, f3_range=(0.1, 1.0)) -> PlanarState:
    """
    Velocities and N from N(0, 1); M chosen so that delta M - |N|^2 lies in f3_range.
    """
    vx, vy, vphi, N1, N2 = rng.normal(size=5)
    f3 = rng.uniform(*f3_range)
    M = (f3 + N1 ** 2 + N2 ** 2) / params.delta
    return PlanarState(vx=vx, vy=vy, vphi=vphi, N1=N1, N2=N2, M=M)


def random_bounded_state(params: PlanarParams, rng: np.random.Generator) -> PlanarState:
    """
    Rejection-sample a state whose radial variable A oscillates between two turning points.

    Raises:
        StateError: if no such state is found
    """
    for attempt in range(MAX_ATTEMPTS):
        state = random_planar_state(params, rng)
        level, _ = reduce_to_level_set(params, state)
        if level.k == 0:
            continue
        try:
            if admissible_interval(level, state.A).bounded:
                logger.debug(f"bounded planar state accepted after {attempt + 1} draws")
                return state
        except DegeneracyError:
            continue
    raise StateError(f"no bounded planar state after {MAX_ATTEMPTS} draws")

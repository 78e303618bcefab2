"""
Numerical certification of candidate first integrals.

A candidate is any callable ReducedState -> number. Pointwise certification
differentiates it along the reduced field at one state; trajectory
certification integrates random initial conditions and measures the worst
relative drift.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Optional, Union

import numpy as np
from pydantic import BaseModel, Field

from core.params import SphericalParams
from shared.config import settings
from shared.errors import EvaluationError
from spherical.dynamics import reduced_field
from spherical.integrator import integrate
from spherical.sampling import random_reduced_state
from spherical.schemas import ReducedState

logger = logging.getLogger(__name__)

Candidate = Callable[[ReducedState], Union[float, complex]]


class CertificationResult(BaseModel):
    max_relative_drift: float = Field(..., ge=0)
    certified: bool
    threshold: float
    n_states: int
    t_span: float
    seed: int


def _evaluate(candidate: Candidate, state: ReducedState) -> complex:
    value = complex(candidate(state))
    if not (np.isfinite(value.real) and np.isfinite(value.imag)):
        raise EvaluationError(f"candidate returned {value}", state=state)
    return value


def pointwise_derivative(candidate: Candidate, params: SphericalParams, state: ReducedState, h: float = 1e-5) -> float:
    """
    Central difference of the candidate along the reduced field, |F(y + hX) - F(y - hX)| / 2h.

    The shifted points leave the unit spheres at O(h^2), which the O(h^2)
    error of the difference already absorbs.
    """
    rates = reduced_field(params, state)
    y, x = state.to_vector(), rates.to_vector()
    forward = _evaluate(candidate, ReducedState.from_vector(y + h * x, state.c))
    backward = _evaluate(candidate, ReducedState.from_vector(y - h * x, state.c))
    return abs(forward - backward) / (2 * h)


def certify(
    candidate: Candidate,
    params: SphericalParams,
    n_states: int = 5,
    t_span: float = 20.0,
    seed: Optional[int] = None,
    tol: Optional[float] = None,
    threshold: Optional[float] = None,
    workers: Optional[int] = None,
) -> CertificationResult:
    """
    Integrate random initial conditions and report the worst relative drift.

    Args:
        candidate: Function of the reduced state
        params: System parameters
        n_states: Number of random initial conditions
        t_span: Integration time per run
        seed: Seed of the initial-condition generator (defaults to settings.seed)
        tol: Integrator tolerance (defaults to settings.tol)
        threshold: Certification threshold (defaults to settings.certify_threshold)
        workers: Thread count (defaults to settings.workers)

    Returns:
        CertificationResult

    Raises:
        EvaluationError: if the candidate is non-finite at a visited state
    """
    seed = settings.seed if seed is None else seed
    threshold = settings.certify_threshold if threshold is None else threshold
    workers = settings.workers if workers is None else workers

    rng = np.random.default_rng(seed)
    initial = [random_reduced_state(params, rng) for _ in range(n_states)]

    def drift(state: ReducedState) -> float:
        trajectory = integrate(params, state, t_span, tol=tol, samples=51)
        values = np.array([_evaluate(candidate, s) for s in trajectory.states])
        return float(np.max(np.abs(values - values[0])) / max(abs(values[0]), 1e-300))

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        drifts = list(pool.map(drift, initial))

    worst = max(drifts, default=0.0)
    result = CertificationResult(
        max_relative_drift=worst,
        certified=worst < threshold,
        threshold=threshold,
        n_states=n_states,
        t_span=t_span,
        seed=seed,
    )
    logger.info(f"Certification: worst drift {worst:.3e} over {n_states} states -> certified={result.certified}")
    return result

"""
Adaptive Dormand-Prince 5(4) integration of the spherical bearing.

The stepper keeps the classical tableau and error estimate, adds the
standard fourth-order continuous extension for sampling at requested times,
and projects every Gamma_i back to the unit sphere after each accepted step.
The projection is the reason this is not a thin wrapper around solve_ivp.
"""
import logging
from typing import Callable, Optional, Tuple

import numpy as np

from core.params import SphericalParams
from shared.config import settings
from shared.errors import StiffnessError, UsageError

from .dynamics import full_field, reduced_field
from .schemas import FullState, ReducedState, Trajectory

logger = logging.getLogger(__name__)

Array = np.ndarray

C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
E = B5 - B4

# Continuous extension: y(t + x h) = y + h K^T P [x, x^2, x^3, x^4]
P = np.array([
    [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 5.0
TOL_RANGE = (1e-13, 1e-3)


def _rms(x: Array) -> float:
    return float(np.sqrt(np.mean(x * x)))


def _initial_step(fun: Callable[[Array], Array], y0: Array, f0: Array, tol: float, span: float) -> float:
    """Hairer-Wanner starting step for a fifth-order method."""
    scale = tol + tol * np.abs(y0)
    d0, d1 = _rms(y0 / scale), _rms(f0 / scale)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, span)
    f1 = fun(y0 + h0 * f0)
    d2 = _rms((f1 - f0) / scale) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / 5)
    return min(100 * h0, h1, span)


def _project_gammas(y: Array, n: int) -> Tuple[Array, float]:
    """Normalise the Gamma block y[3:3+3n]; return the projected vector and the defect before projection."""
    y = y.copy()
    if n == 0:
        return y, 0.0
    gammas = y[3:3 + 3 * n].reshape(n, 3)
    norms = np.linalg.norm(gammas, axis=1)
    defect = float(np.max(np.abs(norms - 1.0)))
    y[3:3 + 3 * n] = (gammas / norms[:, None]).ravel()
    return y, defect


def dopri5(
    fun: Callable[[Array], Array],
    y0: Array,
    sample_times: Array,
    tol: float,
    n_balls: int,
    max_steps: Optional[int] = None,
) -> Tuple[Array, list, int, int]:
    """
    Integrate an autonomous system y' = fun(y) from t = 0 through every sample time.

    Args:
        fun: Right-hand side
        y0: Initial vector (Gamma block already unit)
        sample_times: Increasing, non-negative output times
        tol: Relative and absolute tolerance
        n_balls: Size of the Gamma block to renormalise
        max_steps: Step budget (defaults to settings.max_steps)

    Returns:
        Tuple (samples of shape (len(sample_times), dim), per-step defects, accepted, rejected)

    Raises:
        StiffnessError: on step-size underflow or an exhausted step budget
    """
    max_steps = settings.max_steps if max_steps is None else max_steps
    t_final = float(sample_times[-1])
    samples = np.empty((len(sample_times), y0.size))
    defects = []
    accepted = rejected = 0

    t, y = 0.0, y0.astype(np.float64)
    next_sample = 0
    while next_sample < len(sample_times) and sample_times[next_sample] <= 0.0:
        samples[next_sample] = y
        next_sample += 1
    if next_sample == len(sample_times):
        return samples, defects, accepted, rejected

    f = fun(y)
    h = _initial_step(fun, y, f, tol, t_final)
    K = np.empty((7, y.size))

    while t < t_final:
        if accepted + rejected >= max_steps:
            raise StiffnessError(f"step budget of {max_steps} exhausted at t={t:.6g}", t=t, state=y)
        if h < settings.min_step * max(1.0, abs(t)):
            raise StiffnessError(f"step size underflow (h={h:.3e}) at t={t:.6g}", t=t, state=y)
        last = h >= t_final - t
        if last:
            h = t_final - t

        K[0] = f
        for s in range(1, 7):
            K[s] = fun(y + h * (np.asarray(A[s]) @ K[:s]))
        y_new = y + h * (B5 @ K)
        # K[6] is f at y_new since the last stage row equals B5
        scale = tol + tol * np.maximum(np.abs(y), np.abs(y_new))
        err = _rms(h * (E @ K) / scale)

        if err <= 1.0:
            Q = K.T @ P
            t_new = t_final if last else t + h
            while next_sample < len(sample_times) and sample_times[next_sample] <= t_new:
                x = (sample_times[next_sample] - t) / h
                dense = y + h * (Q @ np.array([x, x * x, x ** 3, x ** 4]))
                samples[next_sample] = _project_gammas(dense, n_balls)[0]
                next_sample += 1

            y, defect = _project_gammas(y_new, n_balls)
            defects.append(defect)
            if defect > settings.unit_tolerance:
                logger.warning(f"Gamma renormalisation defect {defect:.3e} at t={t_new:.6g}")
            t = t_new
            f = fun(y)
            accepted += 1
            factor = MAX_FACTOR if err == 0 else min(MAX_FACTOR, SAFETY * err ** -0.2)
        else:
            rejected += 1
            factor = max(MIN_FACTOR, SAFETY * err ** -0.2)
        h *= factor

    return samples, defects, accepted, rejected


def _sample_times(t_final: float, samples: Optional[int], sample_times: Optional[Array]) -> Array:
    if sample_times is not None:
        times = np.asarray(sample_times, dtype=np.float64)
        if times.ndim != 1 or times.size == 0 or np.any(np.diff(times) < 0) or times[0] < 0 or times[-1] > t_final:
            raise UsageError("sample_times must be non-decreasing and lie in [0, t_final]")
        return times
    if t_final == 0.0:
        return np.array([0.0])
    samples = settings.samples if samples is None else samples
    if samples < 2:
        raise UsageError(f"need at least 2 samples, got {samples}")
    return np.linspace(0.0, t_final, samples)


def _check_inputs(t_final: float, tol: float) -> None:
    if t_final < 0:
        raise UsageError(f"t_final must be non-negative, got {t_final}")
    if not (TOL_RANGE[0] <= tol <= TOL_RANGE[1]):
        raise UsageError(f"tol={tol} outside [{TOL_RANGE[0]}, {TOL_RANGE[1]}]")


def integrate(
    params: SphericalParams,
    state: ReducedState,
    t_final: float,
    tol: Optional[float] = None,
    samples: Optional[int] = None,
    sample_times: Optional[Array] = None,
) -> Trajectory:
    """
    Integrate the reduced system.

    Args:
        params: System parameters
        state: Initial reduced state
        t_final: End time (>= 0)
        tol: Tolerance in [1e-13, 1e-3] (defaults to settings.tol)
        samples: Number of equally spaced output times including 0 and t_final
        sample_times: Explicit output times, overriding samples

    Returns:
        Trajectory with the sampled reduced states
    """
    tol = settings.tol if tol is None else tol
    _check_inputs(t_final, tol)
    state.validate(params)
    times = _sample_times(t_final, samples, sample_times)
    c = state.c

    def rhs(y: Array) -> Array:
        return reduced_field(params, ReducedState.from_vector(y, c)).to_vector()

    logger.info(f"Integrating case {params.configuration.value}, n={params.n} to t={t_final} (tol={tol:g})")
    values, defects, accepted, rejected = dopri5(rhs, state.to_vector(), times, tol, params.n)
    logger.info(f"Integration finished: {accepted} accepted, {rejected} rejected steps")

    return Trajectory(
        times=times,
        states=[ReducedState.from_vector(y, c) for y in values],
        unit_defects=defects,
        accepted_steps=accepted,
        rejected_steps=rejected,
    )


def integrate_full(
    params: SphericalParams,
    state: FullState,
    t_final: float,
    tol: Optional[float] = None,
    samples: Optional[int] = None,
    sample_times: Optional[Array] = None,
) -> Trajectory:
    """Integrate the reduced system together with the attitudes g and g_i."""
    tol = settings.tol if tol is None else tol
    _check_inputs(t_final, tol)
    state.reduced.validate(params)
    times = _sample_times(t_final, samples, sample_times)
    c = state.reduced.c

    def rhs(y: Array) -> Array:
        return full_field(params, FullState.from_vector(y, c)).to_vector()

    logger.info(f"Integrating full system, case {params.configuration.value}, n={params.n} to t={t_final}")
    values, defects, accepted, rejected = dopri5(rhs, state.to_vector(), times, tol, params.n)
    full_states = [FullState.from_vector(y, c) for y in values]

    return Trajectory(
        times=times,
        states=[s.reduced for s in full_states],
        full_states=full_states,
        unit_defects=defects,
        accepted_steps=accepted,
        rejected_steps=rejected,
    )

"""
Quadrature solution of the planar system on a level set.

In polar coordinates N1 = A cos(theta), N2 = A sin(theta) the level-set motion is

    dA/dt = -k cos(theta - alpha)
    A dtheta/dt = k sin(theta - alpha) + kappa A v_phi(A)

with v_phi(A) = d6 / sqrt(d5 + c A^2). The one-form of this system is exact
with potential k A sin(theta - alpha) + s sqrt(d5 + c A^2) = d7, so
sin(theta - alpha) = g(A) is known along the motion and time follows from one
more integration of dt = dA / (-k cos(theta - alpha)).

Bounded motions are parametrised by A = A_mid - A_half cos(u), which turns the
integrand into a smooth function of u across both turning points. Unbounded
motions use A = A_lo + w^2 with signed w.
"""
import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Tuple

import numpy as np
import scipy.integrate
import scipy.optimize

from invariants.measure import finite_difference_divergence
from shared.errors import DegeneracyError, InadmissibleAError, QuadratureRefinementError, StiffnessError, UsageError

from .dynamics import level_set_field, planar_field
from .schemas import LevelSetData, PlanarParams, PlanarState, PlanarTrajectory

logger = logging.getLogger(__name__)

Array = np.ndarray

ROOT_XTOL = 1e-14
QUAD_EPSABS = 1e-13
QUAD_EPSREL = 1e-12
TIME_NODES = 64
ODE_RTOL = 1e-12
ODE_ATOL = 1e-12


def v_phi_of_A(level: LevelSetData, A: float) -> float:
    return level.d6 / math.sqrt(level.d5 + level.c * A * A)


def polar_field(level: LevelSetData, A: float, theta: float) -> Tuple[float, float]:
    """
    (dA/dt, dtheta/dt) of the polar level-set system; its invariant density is A.
    """
    phase = theta - level.alpha
    A_dot = -level.k * math.cos(phase)
    theta_dot = (level.k * math.sin(phase) + level.kappa * A * v_phi_of_A(level, A)) / A
    return A_dot, theta_dot


def polar_divergence(level: LevelSetData, A: float, theta: float, h: float = 1e-4) -> float:
    """Finite-difference divergence of A (dA/dt, dtheta/dt) at (A, theta)."""

    def weighted_field(x: Array) -> Array:
        return x[0] * np.array(polar_field(level, x[0], x[1]))

    return finite_difference_divergence(weighted_field, np.array([A, theta]), h)


def potential(level: LevelSetData, A: float, theta: float) -> float:
    """k A sin(theta - alpha) + s sqrt(d5 + c A^2); equals d7 along the motion."""
    return level.k * A * math.sin(theta - level.alpha) + level.s * math.sqrt(level.d5 + level.c * A * A)


def theta_argument(level: LevelSetData, A: float) -> float:
    """g(A) = (d7 - s sqrt(d5 + c A^2)) / (k A) = sin(theta - alpha)."""
    if level.k == 0:
        raise UsageError("theta(A) is undefined for k = 0")
    return (level.d7 - level.s * math.sqrt(level.d5 + level.c * A * A)) / (level.k * A)


def theta_of_A(level: LevelSetData, A: float, branch: int = 1) -> float:
    """
    Angle theta at radius A on one branch.

    Args:
        level: Level-set constants
        A: Radius
        branch: Sign of cos(theta - alpha); +1 while A decreases, -1 while A increases

    Returns:
        theta in (-pi, pi]

    Raises:
        InadmissibleAError: if |g(A)| > 1
    """
    g = theta_argument(level, A)
    if abs(g) > 1.0 + 1e-12:
        raise InadmissibleAError(f"A={A} is outside the motion (sin(theta - alpha) = {g:.6f})", A=A, argument=g)
    g = min(1.0, max(-1.0, g))
    theta = level.alpha + math.atan2(g, branch * math.sqrt(1.0 - g * g))
    return math.atan2(math.sin(theta), math.cos(theta))


@dataclass(frozen=True)
class AdmissibleInterval:
    A_lo: float
    A_hi: float          # inf for unbounded motion

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.A_hi)


def _gap(level: LevelSetData) -> Callable[[float], float]:
    """q(A) = (d7 - S(A))^2 - (k A)^2, non-positive exactly on the admissible set."""

    def q(A: float) -> float:
        return (level.d7 - level.s * math.sqrt(level.d5 + level.c * A * A)) ** 2 - (level.k * A) ** 2

    return q


def gap_quotient(level: LevelSetData, A: float, A_end: float) -> float:
    """
    -q(A) / (A - A_end) for a root A_end of q, evaluated without cancellation.

    At A = A_end it equals -q'(A_end), which is finite and nonzero at a simple turning point.
    """
    r = math.sqrt(level.d5 + level.c * A * A)
    r_end = math.sqrt(level.d5 + level.c * A_end * A_end)
    return (A + A_end) * (level.k ** 2 + level.s * level.c * (2 * level.d7 - level.s * (r + r_end)) / (r + r_end))


def admissible_interval(level: LevelSetData, A0: float) -> AdmissibleInterval:
    """
    Connected range of A containing A0 on which |g(A)| <= 1.

    Args:
        level: Level-set constants with k != 0
        A0: Initial radius

    Returns:
        AdmissibleInterval; A_hi is inf when A escapes to infinity

    Raises:
        DegeneracyError: if the range collapses or reaches A = 0
    """
    if level.k == 0:
        raise UsageError("admissible interval needs k != 0")
    if A0 <= 0:
        raise DegeneracyError(f"motion through N = 0 (A0={A0}) has no polar description")
    q = _gap(level)
    eta = 1e-7
    scale = (level.k * A0) ** 2

    lower_in, upper_in = A0, A0
    A_lo = A_hi = None
    if q(A0) >= -1e-12 * scale:
        # start on a turning point: the interior lies on the side where q < 0
        if q(A0 * (1 + eta)) < 0:
            A_lo, upper_in = A0, A0 * (1 + eta)
        elif q(A0 * (1 - eta)) < 0:
            A_hi, lower_in = A0, A0 * (1 - eta)
        else:
            raise DegeneracyError(f"A0={A0} is a degenerate turning point")

    if A_lo is None:
        outside = lower_in
        for _ in range(1100):
            outside *= 0.5
            if q(outside) > 0:
                break
        else:
            raise DegeneracyError("admissible interval extends to A = 0")
        A_lo = scipy.optimize.brentq(q, outside, lower_in, xtol=ROOT_XTOL)

    if A_hi is None:
        outside = upper_in
        cap = 1e12 * max(A0, 1.0)
        while outside < cap:
            outside *= 2.0
            if q(outside) > 0:
                A_hi = scipy.optimize.brentq(q, upper_in, outside, xtol=ROOT_XTOL)
                break
        else:
            A_hi = math.inf

    if math.isfinite(A_hi) and A_hi - A_lo <= 1e-10 * A_hi:
        raise DegeneracyError(f"admissible interval [{A_lo}, {A_hi}] has collapsed (circular motion)")
    return AdmissibleInterval(A_lo=A_lo, A_hi=A_hi)


def _quad(fun: Callable[[float], float], a: float, b: float) -> float:
    result = scipy.integrate.quad(fun, a, b, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=200, full_output=1)
    if len(result) > 3:
        value, error, info, message = result
        raise QuadratureRefinementError(
            f"quadrature on [{a}, {b}] did not converge: {message}",
            diagnostics={"a": a, "b": b, "value": value, "error": error, "evaluations": info.get("neval")},
        )
    return result[0]


class _BoundedClock:
    """Time as a function of the angle u for A = A_mid - A_half cos(u)."""

    def __init__(self, level: LevelSetData, interval: AdmissibleInterval, A0: float, theta0: float):
        self.level = level
        self.A_lo, self.A_hi = interval.A_lo, interval.A_hi
        self.mid = 0.5 * (interval.A_lo + interval.A_hi)
        self.half = 0.5 * (interval.A_hi - interval.A_lo)
        u0 = math.acos(min(1.0, max(-1.0, (self.mid - A0) / self.half)))
        if math.cos(theta0 - level.alpha) > 0:
            u0 = 2 * math.pi - u0
        self.nodes = np.linspace(0.0, 2 * math.pi, TIME_NODES + 1)
        pieces = [_quad(self.rate, a, b) for a, b in zip(self.nodes[:-1], self.nodes[1:])]
        self.table = np.concatenate([[0.0], np.cumsum(pieces)])
        self.period = float(self.table[-1])
        self.tau0 = self._tau(u0)
        logger.debug(f"bounded motion: A in [{interval.A_lo:.6g}, {interval.A_hi:.6g}], period {self.period:.6g}")

    def radius(self, u: float) -> float:
        return self.mid - self.half * math.cos(u)

    def rate(self, u: float) -> float:
        """
        dt/du = A_half |sin u| / (k sqrt(1 - g^2)) = A A_half |sin u| / sqrt(-q(A)).

        With A - A_lo = 2 A_half sin^2(u/2) and A_hi - A = 2 A_half cos^2(u/2) the
        vanishing factor of -q cancels against |sin u| near the nearer turning point.
        """
        A = self.radius(u)
        if math.cos(u) >= 0:
            quotient = gap_quotient(self.level, A, self.A_lo)
            return A * abs(math.cos(0.5 * u)) * math.sqrt(2 * self.half / quotient)
        quotient = -gap_quotient(self.level, A, self.A_hi)
        return A * abs(math.sin(0.5 * u)) * math.sqrt(2 * self.half / quotient)

    def _tau(self, u: float) -> float:
        j = min(int(np.searchsorted(self.nodes, u, side="right")) - 1, TIME_NODES - 1)
        return float(self.table[j]) + _quad(self.rate, self.nodes[j], u)

    def angle_at(self, t: float) -> float:
        target = self.tau0 + t
        target -= math.floor(target / self.period) * self.period
        j = min(max(int(np.searchsorted(self.table, target, side="right")) - 1, 0), TIME_NODES - 1)
        a, b = self.nodes[j], self.nodes[j + 1]

        def residual(u: float) -> float:
            return float(self.table[j]) + _quad(self.rate, a, u) - target

        if residual(b) <= 0:
            return b
        if residual(a) >= 0:
            return a
        return scipy.optimize.brentq(residual, a, b, xtol=ROOT_XTOL)

    def sample(self, t: float) -> Tuple[float, float]:
        u = self.angle_at(t)
        A = self.radius(u)
        branch = -1 if math.sin(u) > 0 else 1
        return A, theta_of_A(self.level, A, branch)


class _UnboundedClock:
    """Time as a function of w for A = A_lo + w^2; w < 0 before and w > 0 after the turning point."""

    def __init__(self, level: LevelSetData, interval: AdmissibleInterval, A0: float, theta0: float):
        self.level = level
        self.A_lo = interval.A_lo
        w0 = math.sqrt(max(A0 - self.A_lo, 0.0))
        self.w0 = -w0 if math.cos(theta0 - level.alpha) > 0 else w0

    def rate(self, w: float) -> float:
        """dt/dw = 2 |w| / (k sqrt(1 - g^2)) = 2 A / sqrt(-q(A) / w^2)."""
        A = self.A_lo + w * w
        return 2 * A / math.sqrt(gap_quotient(self.level, A, self.A_lo))

    def coordinate_at(self, t: float) -> float:
        if t == 0:
            return self.w0

        def residual(w: float) -> float:
            return _quad(self.rate, self.w0, w) - t

        step = max(1.0, abs(self.w0))
        direction = 1.0 if t > 0 else -1.0
        inner, outer = self.w0, self.w0 + direction * step
        while direction * residual(outer) < 0:
            inner, outer = outer, outer + direction * step
            step *= 2.0
        lo, hi = sorted((inner, outer))
        return scipy.optimize.brentq(residual, lo, hi, xtol=ROOT_XTOL)

    def sample(self, t: float) -> Tuple[float, float]:
        w = self.coordinate_at(t)
        A = self.A_lo + w * w
        branch = -1 if w > 0 else 1
        return A, theta_of_A(self.level, A, branch)


def _polar_trajectory(level: LevelSetData, times: Array, A: Array, theta: Array, method: str) -> PlanarTrajectory:
    v_phi = np.array([v_phi_of_A(level, a) for a in A])
    return PlanarTrajectory(times=times, A=A, theta=theta, v_phi=v_phi, method=method)


def quadrature_solution(level: LevelSetData, initial: Array, t_grid: Array) -> PlanarTrajectory:
    """
    A(t), theta(t) and v_phi(t) from the quadrature.

    Args:
        level: Level-set constants
        initial: Reduced initial state (v_phi, N1, N2)
        t_grid: Output times (any sign, any order)

    Returns:
        PlanarTrajectory; method is "ode" when the quadrature does not apply

    Raises:
        QuadratureRefinementError: if an adaptive quadrature fails to converge
    """
    times = np.asarray(t_grid, dtype=np.float64)
    _, N1, N2 = (float(v) for v in initial)
    A0, theta0 = math.hypot(N1, N2), math.atan2(N2, N1)

    if level.k == 0:
        logger.warning("k = 0: A is constant and the quadrature does not apply, integrating the ODE instead")
        return ode_solution(level, initial, times)
    try:
        interval = admissible_interval(level, A0)
    except DegeneracyError as e:
        logger.warning(f"quadrature not applicable ({e}), integrating the ODE instead")
        return ode_solution(level, initial, times)

    clock_type = _BoundedClock if interval.bounded else _UnboundedClock
    clock = clock_type(level, interval, A0, theta0)
    samples = [clock.sample(float(t)) for t in times]
    A = np.array([a for a, _ in samples])
    theta = np.array([th for _, th in samples])
    return _polar_trajectory(level, times, A, theta, method="quadrature")


def oscillation_period(level: LevelSetData, initial: Array) -> float:
    """Period of A for bounded motion."""
    _, N1, N2 = (float(v) for v in initial)
    A0 = math.hypot(N1, N2)
    interval = admissible_interval(level, A0)
    if not interval.bounded:
        raise UsageError("unbounded motion has no period")
    return _BoundedClock(level, interval, A0, math.atan2(N2, N1)).period


def ode_solution(level: LevelSetData, initial: Array, t_grid: Array) -> PlanarTrajectory:
    """
    Direct integration of the (v_phi, N1, N2) system with DOP853.

    Negative and positive output times are integrated separately from t = 0.
    """
    times = np.asarray(t_grid, dtype=np.float64)
    y0 = np.asarray(initial, dtype=np.float64)
    values = np.empty((times.size, 3))

    def rhs(t: float, y: Array) -> Array:
        return level_set_field(level, y)

    for side in (times >= 0, times < 0):
        idx = np.flatnonzero(side)
        if idx.size == 0:
            continue
        order = idx[np.argsort(np.abs(times[idx]))]
        t_eval = times[order]
        t_end = float(t_eval[-1])
        if t_end == 0.0:
            values[order] = y0
            continue
        sol = scipy.integrate.solve_ivp(
            rhs, (0.0, t_end), y0, method="DOP853", t_eval=t_eval, rtol=ODE_RTOL, atol=ODE_ATOL
        )
        if not sol.success:
            raise StiffnessError(f"ODE integration failed: {sol.message}", t=float(sol.t[-1]) if sol.t.size else 0.0, state=y0)
        values[order] = sol.y.T

    A = np.hypot(values[:, 1], values[:, 2])
    theta = np.arctan2(values[:, 2], values[:, 1])
    return PlanarTrajectory(times=times, A=A, theta=theta, v_phi=values[:, 0], method="ode")


def integrate_planar(params: PlanarParams, state: PlanarState, t_grid: Array, tol: float = 1e-10) -> List[PlanarState]:
    """
    Integrate the full six-dimensional planar system with DOP853.

    Args:
        params: Planar parameters
        state: Initial state on the admissible region
        t_grid: Non-decreasing, non-negative output times starting at 0
        tol: Relative and absolute tolerance

    Returns:
        States at the output times
    """
    times = np.asarray(t_grid, dtype=np.float64)
    if times.size == 0 or times[0] != 0.0 or np.any(np.diff(times) < 0):
        raise UsageError("t_grid must start at 0 and be non-decreasing")
    state.validate(params)
    if times[-1] == 0.0:
        return [state for _ in times]

    def rhs(t: float, y: Array) -> Array:
        return planar_field(params, PlanarState.from_vector(y))

    sol = scipy.integrate.solve_ivp(
        rhs, (0.0, float(times[-1])), state.to_vector(), method="DOP853", t_eval=times, rtol=tol, atol=tol
    )
    if not sol.success:
        raise StiffnessError(f"planar integration failed: {sol.message}", t=float(sol.t[-1]), state=state)
    return [PlanarState.from_vector(y) for y in sol.y.T]

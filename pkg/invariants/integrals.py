"""
First integrals of the reduced spherical system.
"""
import cmath
import logging
from typing import Dict, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field

from core.params import SphericalParams
from shared.errors import UsageError
from spherical.dynamics import ball_angular_velocities, derived_quantities
from spherical.schemas import ReducedState

from .measure import measure_density
from .symmetric import integral_case_BC

logger = logging.getLogger(__name__)


class IntegralReport(BaseModel):
    """Values of the first integrals and the measure density at one state."""
    F1: float = Field(..., description="1/2 <M, Omega>")
    F2: float = Field(..., ge=0, description="|M + N|^2")
    F_ij: List[List[float]] = Field(..., description="Pairwise products <Gamma_i, Gamma_j>")
    c: List[float] = Field(..., description="<Omega_i, Gamma_i> recomputed from the ball velocities")
    T: float = Field(..., description="Kinetic energy 1/2 <M, Omega> + 1/2 sum I_i c_i^2")
    mu: float = Field(..., gt=0, description="Measure density sqrt(det bold_I)")
    F3: Optional[float] = Field(None, description="Third integral for eps = -1")
    F3plus: Optional[float] = Field(None, description="F3(+) for B = C (modulus when A < C)")
    F3minus: Optional[float] = Field(None, description="F3(-) for B = C (modulus when A < C)")
    F3_phase: Optional[float] = Field(None, description="Phase of F3(+) when A < C")


def kinetic_energy(params: SphericalParams, state: ReducedState) -> float:
    q = derived_quantities(params, state)
    return 0.5 * float(np.dot(q.M, state.omega)) + 0.5 * float(np.sum(np.asarray(params.inertias) * state.c ** 2))


def integral_case_eps_minus_one(params: SphericalParams, state: ReducedState) -> float:
    """
    Third integral of the one-ball system at eps = -1.

    F3 = (B + C - A + D) M_1 Gamma_1 + (A + C - B + D) M_2 Gamma_2 + (A + B - C + D) M_3 Gamma_3
    with M the total momentum M + N.

    Raises:
        UsageError: if n != 1 or epsilon differs from -1
    """
    if params.n != 1:
        raise UsageError(f"the eps = -1 integral is defined for one ball, got n={params.n}")
    if not params.is_epsilon_minus_one:
        raise UsageError(f"the eps = -1 integral needs eps = -1, got {params.epsilon}")
    q = derived_quantities(params, state)
    A, B, C, D = params.A, params.B, params.C, q.D
    weights = np.array([B + C - A + D, A + C - B + D, A + B - C + D])
    return float(np.sum(weights * q.total_momentum * state.gammas[0]))


def integrals(params: SphericalParams, state: ReducedState) -> IntegralReport:
    """
    Evaluate every first integral available for the parameters.

    Args:
        params: System parameters
        state: Reduced state

    Returns:
        IntegralReport; F3 is set for eps = -1 and F3plus/F3minus for B = C (one ball)
    """
    q = derived_quantities(params, state)
    balls = ball_angular_velocities(params, state)
    report = dict(
        F1=0.5 * float(np.dot(q.M, state.omega)),
        F2=float(np.dot(q.total_momentum, q.total_momentum)),
        F_ij=(state.gammas @ state.gammas.T).tolist(),
        c=np.einsum("ij,ij->i", balls, state.gammas).tolist(),
        T=kinetic_energy(params, state),
        mu=measure_density(params, state.gammas),
    )
    if params.n == 1 and params.is_epsilon_minus_one:
        report["F3"] = integral_case_eps_minus_one(params, state)
    if params.n == 1 and params.is_axisymmetric:
        plus = integral_case_BC(params, state, branch=1)
        minus = integral_case_BC(params, state, branch=-1)
        if params.A >= params.C:
            report["F3plus"], report["F3minus"] = plus.real, minus.real
        else:
            report["F3plus"], report["F3minus"] = abs(plus), abs(minus)
            report["F3_phase"] = cmath.phase(plus)
    return IntegralReport(**report)


def _flatten(report: IntegralReport) -> Dict[str, float]:
    values = {"F1": report.F1, "F2": report.F2, "T": report.T}
    n = len(report.c)
    for i in range(n):
        values[f"c_{i + 1}"] = report.c[i]
        for j in range(i + 1, n):
            values[f"F_{i + 1}{j + 1}"] = report.F_ij[i][j]
    for name in ("F3", "F3plus", "F3minus", "F3_phase"):
        value = getattr(report, name)
        if value is not None:
            values[name] = value
    return values


def relative_drift(values: Sequence[float], floor: float = 1e-300, periodic: bool = False) -> float:
    """
    max |f(t) - f(0)| / max(|f(0)|, floor).

    Phases (periodic=True) are compared modulo 2 pi and divided by the floor alone.
    """
    values = np.asarray(values, dtype=np.float64)
    diffs = values - values[0]
    if periodic:
        diffs = np.angle(np.exp(1j * diffs))
        return float(np.max(np.abs(diffs)) / floor)
    return float(np.max(np.abs(diffs)) / max(abs(values[0]), floor))


def integral_drift(params: SphericalParams, states: Sequence[ReducedState]) -> Dict[str, float]:
    """
    Relative drift of every first integral along a sampled trajectory.

    Pairwise products and the c_i are O(1) by construction and are measured
    against max(|f(0)|, 1); the phase of F3 is compared in absolute terms.
    """
    series: Dict[str, List[float]] = {}
    for state in states:
        for name, value in _flatten(integrals(params, state)).items():
            series.setdefault(name, []).append(value)

    drifts = {}
    for name, values in series.items():
        floor = 1.0 if name.startswith(("F_", "c_")) or name == "F3_phase" else 1e-300
        drifts[name] = relative_drift(values, floor=floor, periodic=name == "F3_phase")
    return drifts


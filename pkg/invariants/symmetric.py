"""
Quantities of the axisymmetric (B = C) one-ball system and its
nonalgebraic first integral.

With a = C(A + D) and b = D(A - C) the measure density factors as
sqrt(C + D) * rho(Gamma_1), rho = sqrt(a + b Gamma_1^2), and the integral is

    F3(+/-) = (+/- sqrt(b) F + D G - d C) * exp(+/- (1 - eps) sqrt(b) Phi)

with F = rho Omega_1, G = <M, Gamma> and Phi a primitive of 1/(eps rho). For
A < C the square roots are imaginary; the value is then complex and its
modulus and phase are both conserved.
"""
import cmath
import logging
import math
from dataclasses import dataclass

import numpy as np

from core.params import SphericalParams
from shared.errors import DegeneracyError, UsageError
from spherical.dynamics import derived_quantities
from spherical.schemas import ReducedState

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SymmetricAxisQuantities:
    rho: float       # rho(Gamma_1)
    F: float         # rho(Gamma_1) Omega_1
    G: float         # (A - C) Omega_1 Gamma_1 + C L
    Phi: float       # primitive of 1/(eps rho), Phi(base) = 0


def _require_axisymmetric_single(params: SphericalParams) -> None:
    if params.n != 1:
        raise UsageError(f"the B = C integral is defined for one ball, got n={params.n}")
    if not params.is_axisymmetric:
        raise UsageError(f"the B = C integral needs B = C (B={params.B}, C={params.C})")


def _coefficients(params: SphericalParams):
    D = float(params.ball_weights[0])
    a = params.C * (params.A + D)
    b = D * (params.A - params.C)
    return a, b, D


def rho_of_gamma(params: SphericalParams, gamma1: float) -> float:
    a, b, _ = _coefficients(params)
    rho2 = a + b * gamma1 ** 2
    if rho2 <= 0:
        raise DegeneracyError(f"rho^2 = {rho2:.3e} is not positive at Gamma_1 = {gamma1}")
    return math.sqrt(rho2)


def _phi_from_zero(a: float, b: float, eps: float, gamma1: float) -> float:
    if b > 0:
        return math.asinh(math.sqrt(b / a) * gamma1) / (eps * math.sqrt(b))
    if b < 0:
        return math.asin(math.sqrt(-b / a) * gamma1) / (eps * math.sqrt(-b))
    return gamma1 / (eps * math.sqrt(a))


def phi_primitive(params: SphericalParams, gamma1: float, base: float = 0.0) -> float:
    """
    Closed-form primitive of 1/(eps rho(Gamma_1)).

    Args:
        params: One-ball parameters (B = C is not required here)
        gamma1: First component of Gamma
        base: Point where the primitive vanishes

    Returns:
        Phi(gamma1) - Phi(base)

    Raises:
        DegeneracyError: if rho^2 <= 0 at gamma1 or base
        UsageError: if epsilon is zero
    """
    eps = params.epsilon
    if eps == 0:
        raise UsageError("Phi is undefined for epsilon = 0")
    a, b, _ = _coefficients(params)
    rho_of_gamma(params, gamma1)
    rho_of_gamma(params, base)
    return _phi_from_zero(a, b, eps, gamma1) - _phi_from_zero(a, b, eps, base)


def symmetric_axis_quantities(params: SphericalParams, state: ReducedState, base: float = 0.0) -> SymmetricAxisQuantities:
    """Evaluate rho, F, G and Phi at a one-ball state."""
    if params.n != 1:
        raise UsageError(f"axisymmetric quantities are defined for one ball, got n={params.n}")
    gamma, omega = state.gammas[0], state.omega
    rho = rho_of_gamma(params, gamma[0])
    L = float(np.dot(omega, gamma))
    return SymmetricAxisQuantities(
        rho=rho,
        F=rho * omega[0],
        G=(params.A - params.C) * omega[0] * gamma[0] + params.C * L,
        Phi=phi_primitive(params, gamma[0], base=base),
    )


def integral_case_BC(params: SphericalParams, state: ReducedState, branch: int = 1, base: float = 0.0) -> complex:
    """
    Nonalgebraic first integral F3(+) or F3(-) of the B = C system.

    Args:
        params: One-ball parameters with B = C
        state: Reduced state
        branch: +1 or -1
        base: Base point of Phi; moving it rescales both branches by positive constants

    Returns:
        Complex value; the imaginary part is zero when A >= C

    Raises:
        UsageError: if n != 1, B != C or branch is not +/-1
    """
    _require_axisymmetric_single(params)
    if branch not in (1, -1):
        raise UsageError(f"branch must be +1 or -1, got {branch}")
    if params.A < params.C:
        logger.debug("A < C: evaluating the complex continuation of F3")

    q = symmetric_axis_quantities(params, state, base=base)
    d = derived_quantities(params, state).d
    _, b, D = _coefficients(params)
    root = cmath.sqrt(b)
    eps = params.epsilon
    prefactor = branch * root * q.F + D * q.G - d * params.C
    return complex(prefactor * cmath.exp(branch * (1 - eps) * root * q.Phi))


def product_identity(params: SphericalParams, state: ReducedState) -> float:
    """
    Right side of F3(+) F3(-) = C D (C + D) <M, Omega> - C D |M + N|^2 + C (C + D) d^2.
    """
    _require_axisymmetric_single(params)
    q = derived_quantities(params, state)
    C = params.C
    D = q.D
    total = q.total_momentum
    return (
        C * D * (C + D) * float(np.dot(q.M, state.omega))
        - C * D * float(np.dot(total, total))
        + C * (C + D) * q.d ** 2
    )

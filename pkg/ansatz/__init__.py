"""
Ansatz Module

Searches for first integrals of the one-ball system within two finite
families and certifies candidates numerically.

Components:
- linear.py - 9x3 system for integrals linear in M_k Gamma_k and its nullspace
- exponential.py - Exponential family for B = C
- certify.py - Pointwise and trajectory drift certification
"""
from .certify import CertificationResult, certify, pointwise_derivative
from .exponential import ExponentialAnsatz, residuals, solve_exponential, solve_for
from .linear import LinearAnsatzSystem, build_linear_system, linear_integral, linear_integral_rate, nullspace, system_for

__all__ = [
    "CertificationResult",
    "certify",
    "pointwise_derivative",
    "ExponentialAnsatz",
    "residuals",
    "solve_exponential",
    "solve_for",
    "LinearAnsatzSystem",
    "build_linear_system",
    "linear_integral",
    "linear_integral_rate",
    "nullspace",
    "system_for",
]

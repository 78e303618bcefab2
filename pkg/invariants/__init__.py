"""
Invariants Module

First integrals, invariant measure and the integrable one-ball cases.

Components:
- integrals.py - F1, F2, pairwise products, kinetic energy, the eps = -1 integral and drift tables
- measure.py - Measure density, Pi operator and finite-difference divergence checks
- symmetric.py - B = C quantities rho, F, G, Phi and the nonalgebraic integral F3(+/-)
"""
from .integrals import IntegralReport, integral_case_eps_minus_one, integral_drift, integrals, kinetic_energy
from .measure import measure_density, pi_operator, pi_rate, verify_measure
from .symmetric import SymmetricAxisQuantities, integral_case_BC, phi_primitive, product_identity

__all__ = [
    "IntegralReport",
    "integral_case_eps_minus_one",
    "integral_drift",
    "integrals",
    "kinetic_energy",
    "measure_density",
    "pi_operator",
    "pi_rate",
    "verify_measure",
    "SymmetricAxisQuantities",
    "integral_case_BC",
    "phi_primitive",
    "product_identity",
]

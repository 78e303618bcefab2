"""
Planar Module

A plane rolling on n balls over a fixed plane: reduced equations, integrals,
level-set reduction and the quadrature solution of the radial motion.

Components:
- schemas.py - PlanarParams, PlanarState, LevelSetData and PlanarTrajectory
- dynamics.py - Vector field, integrals f1-f4, level-set reduction and measure check
- quadrature.py - v_phi(A), theta(A), turning points, quadrature and ODE solutions, full-system integration
- sampling.py - Seeded random states, optionally restricted to bounded motion
"""
from .dynamics import (
    level_set_field,
    lift_from_level_set,
    planar_det,
    planar_field,
    planar_integrals,
    planar_state_from_contacts,
    reduce_to_level_set,
    remark_integral,
    verify_planar_measure,
)
from .quadrature import (
    AdmissibleInterval,
    admissible_interval,
    ode_solution,
    integrate_planar,
    oscillation_period,
    polar_divergence,
    polar_field,
    potential,
    quadrature_solution,
    theta_of_A,
    v_phi_of_A,
)
from .sampling import random_bounded_state, random_planar_state
from .schemas import LevelSetData, PlanarParams, PlanarState, PlanarTrajectory

__all__ = [
    "level_set_field",
    "lift_from_level_set",
    "planar_det",
    "planar_field",
    "planar_integrals",
    "planar_state_from_contacts",
    "reduce_to_level_set",
    "remark_integral",
    "verify_planar_measure",
    "AdmissibleInterval",
    "admissible_interval",
    "ode_solution",
    "integrate_planar",
    "oscillation_period",
    "polar_divergence",
    "polar_field",
    "potential",
    "quadrature_solution",
    "theta_of_A",
    "v_phi_of_A",
    "random_bounded_state",
    "random_planar_state",
    "LevelSetData",
    "PlanarParams",
    "PlanarState",
    "PlanarTrajectory",
]

"""
Spherical Module

Reduced and complete equations of motion of the spherical ball bearing in
configurations I-IV, their integration and an independent force-balance check.

Components:
- schemas.py - Reduced/full states, derived quantities and trajectories
- dynamics.py - Modified inertia, ball velocities, reduced and full vector fields
- oracle.py - Lagrange-multiplier formulation used to cross-check the reduced field
- integrator.py - Dormand-Prince 5(4) with dense output and Gamma renormalisation
- sampling.py - Seeded random states
"""
from .dynamics import (
    ball_angular_velocities,
    derived_quantities,
    explicit_field_single,
    full_field,
    modified_inertia,
    momentum_rate,
    omega_ball,
    reduced_field,
)
from .integrator import integrate, integrate_full
from .oracle import constrained_state, oracle_field
from .sampling import random_full_state, random_reduced_state
from .schemas import ConstrainedState, DerivedQuantities, FullState, ReducedState, Trajectory

__all__ = [
    "ball_angular_velocities",
    "derived_quantities",
    "explicit_field_single",
    "full_field",
    "modified_inertia",
    "momentum_rate",
    "omega_ball",
    "reduced_field",
    "integrate",
    "integrate_full",
    "constrained_state",
    "oracle_field",
    "random_full_state",
    "random_reduced_state",
    "ConstrainedState",
    "DerivedQuantities",
    "FullState",
    "ReducedState",
    "Trajectory",
]

"""
Core Module

Geometric primitives and parameter derivation shared by the spherical and
planar systems.

Components:
- geometry.py - hat/vee isomorphism between R^3 and so(3), SO(3) helpers
- params.py - Configuration tags I-IV and SphericalParams with derived epsilon, delta, rho
"""
from .geometry import hat, vee, is_skew, orthonormality_defect, project_to_so3, unit
from .params import Configuration, SphericalParams, derive_params

__all__ = [
    "hat",
    "vee",
    "is_skew",
    "orthonormality_defect",
    "project_to_so3",
    "unit",
    "Configuration",
    "SphericalParams",
    "derive_params",
]

"""
Vector and rotation-matrix primitives.

Vectors are float64 arrays of shape (3,), matrices arrays of shape (3, 3).
"""
from typing import Optional

import numpy as np

from shared.config import settings
from shared.errors import UsageError

Array = np.ndarray


def hat(v: Array) -> Array:
    """
    Skew-symmetric matrix of a 3-vector, so that hat(v) @ w == v x w.

    Args:
        v: Vector of shape (3,)

    Returns:
        3x3 skew-symmetric matrix
    """
    x, y, z = np.asarray(v, dtype=np.float64)
    return np.array([
        [0.0, -z, y],
        [z, 0.0, -x],
        [-y, x, 0.0],
    ])


def is_skew(S: Array, tol: Optional[float] = None) -> bool:
    """Check max |S + S^T| against an absolute tolerance."""
    tol = settings.skew_tolerance if tol is None else tol
    S = np.asarray(S, dtype=np.float64)
    return bool(np.max(np.abs(S + S.T)) <= tol)


def vee(S: Array, tol: Optional[float] = None) -> Array:
    """
    Inverse of hat.

    Args:
        S: Skew-symmetric 3x3 matrix
        tol: Absolute skewness tolerance (defaults to settings.skew_tolerance)

    Returns:
        Vector of shape (3,)

    Raises:
        UsageError: if S is not skew-symmetric within tolerance
    """
    S = np.asarray(S, dtype=np.float64)
    if S.shape != (3, 3):
        raise UsageError(f"vee expects a 3x3 matrix, got shape {S.shape}")
    if not is_skew(S, tol):
        raise UsageError(f"vee got a non-skew matrix (max |S + S^T| = {np.max(np.abs(S + S.T)):.3e})")
    return np.array([S[2, 1], S[0, 2], S[1, 0]])


def unit(v: Array) -> Array:
    """Normalize a nonzero vector."""
    v = np.asarray(v, dtype=np.float64)
    norm = np.linalg.norm(v)
    if norm == 0.0:
        raise UsageError("cannot normalize the zero vector")
    return v / norm


def orthonormality_defect(g: Array) -> float:
    """Largest of max |g^T g - 1| and |det g - 1|."""
    g = np.asarray(g, dtype=np.float64)
    gram = np.max(np.abs(g.T @ g - np.eye(3)))
    return float(max(gram, abs(np.linalg.det(g) - 1.0)))


def project_to_so3(g: Array) -> Array:
    """Closest rotation in the Frobenius norm (polar factor via SVD)."""
    U, _, Vt = np.linalg.svd(np.asarray(g, dtype=np.float64))
    R = U @ Vt
    if np.linalg.det(R) < 0:
        U[:, -1] *= -1.0
        R = U @ Vt
    return R

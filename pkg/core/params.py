"""
Configuration tags and parameters of the spherical ball bearing.

Four configurations are supported:

- I:   balls roll outside the fixed sphere, the moving sphere encloses them (rho = R + 2r)
- II:  balls roll inside the fixed sphere, the moving sphere sits inside them (rho = R - 2r)
- III: one spherical shell encloses the fixed sphere and rolls inside the moving one (rho = 2r - R > R)
- IV:  one spherical shell rolls inside the fixed sphere and encloses the moving one (rho = 2r - R < R)
"""
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from shared.config import settings
from shared.errors import GeometryError


class Configuration(str, Enum):
    """Spherical ball-bearing configurations."""
    I = "I"
    II = "II"
    III = "III"
    IV = "IV"

    @property
    def sigma(self) -> int:
        """Sign convention: +1 for I and III, -1 for II and IV."""
        return 1 if self in (Configuration.I, Configuration.III) else -1

    @property
    def single_ball_only(self) -> bool:
        return self in (Configuration.III, Configuration.IV)


def derive_params(config: Configuration, R: float, r: float) -> Tuple[float, float, float]:
    """
    Derive (epsilon, delta, rho) from the radii.

    Args:
        config: Configuration tag
        R: Radius of the fixed sphere
        r: Radius of the balls

    Returns:
        Tuple (epsilon, delta, rho)

    Raises:
        GeometryError: naming the violated inequality
    """
    config = Configuration(config)
    if not (R > 0 and r > 0):
        raise GeometryError(f"radii must be positive (R={R}, r={r})")

    if config is Configuration.I:
        rho = R + 2 * r
        return R / (2 * R + 2 * r), (R + 2 * r) / (2 * r), rho

    if config is Configuration.II:
        rho = R - 2 * r
        if rho <= 0:
            raise GeometryError(f"case II requires rho = R - 2r > 0 (R={R}, r={r}, rho={rho})")
        return R / (2 * R - 2 * r), -(R - 2 * r) / (2 * r), rho

    rho = 2 * r - R
    if rho <= 0:
        raise GeometryError(f"case {config.value} requires rho = 2r - R > 0 (R={R}, r={r}, rho={rho})")
    if config is Configuration.III and not rho > R:
        raise GeometryError(f"case III requires rho = 2r - R > R (R={R}, r={r}, rho={rho})")
    if config is Configuration.IV and not rho < R:
        raise GeometryError(f"case IV requires rho = 2r - R < R (R={R}, r={r}, rho={rho})")
    return R / (2 * R - 2 * r), (2 * r - R) / (2 * r), rho


class SphericalParams(BaseModel):
    """Geometry and inertia of a spherical ball bearing with n balls."""

    model_config = ConfigDict(frozen=True)

    configuration: Configuration = Field(..., description="Configuration tag I-IV")
    R: float = Field(..., gt=0, description="Radius of the fixed sphere")
    r: float = Field(..., gt=0, description="Radius of every ball")
    masses: List[float] = Field(..., min_length=1, description="Ball masses m_i")
    inertias: List[float] = Field(..., min_length=1, description="Scalar ball inertias I_i")
    A: float = Field(..., gt=0, description="Principal inertia of the moving sphere, axis 1")
    B: float = Field(..., gt=0, description="Principal inertia of the moving sphere, axis 2")
    C: float = Field(..., gt=0, description="Principal inertia of the moving sphere, axis 3")
    epsilon_override: Optional[float] = Field(
        None, description="Formal epsilon replacing the geometric one (e.g. 1 for the fixed-centre limit)"
    )

    @model_validator(mode="after")
    def validate_geometry(self) -> "SphericalParams":
        """Check ball lists, inertias and the configuration inequalities."""
        if len(self.masses) != len(self.inertias):
            raise ValueError(f"{len(self.masses)} masses but {len(self.inertias)} inertias")
        if any(m <= 0 for m in self.masses) or any(i <= 0 for i in self.inertias):
            raise ValueError("ball masses and inertias must be positive")
        if self.configuration.single_ball_only and len(self.masses) != 1:
            raise ValueError(f"case {self.configuration.value} is defined for one ball only, got n={len(self.masses)}")
        derive_params(self.configuration, self.R, self.r)
        return self

    @property
    def n(self) -> int:
        return len(self.masses)

    @property
    def sigma(self) -> int:
        return self.configuration.sigma

    @property
    def epsilon(self) -> float:
        if self.epsilon_override is not None:
            return self.epsilon_override
        return derive_params(self.configuration, self.R, self.r)[0]

    @property
    def delta(self) -> float:
        return derive_params(self.configuration, self.R, self.r)[1]

    @property
    def rho(self) -> float:
        return derive_params(self.configuration, self.R, self.r)[2]

    @property
    def inertia(self) -> np.ndarray:
        """Inertia tensor diag(A, B, C) of the moving sphere."""
        return np.diag([self.A, self.B, self.C])

    @property
    def ball_weights(self) -> np.ndarray:
        """D_i = delta^2 (I_i + m_i r^2) for every ball."""
        m = np.asarray(self.masses)
        inertia = np.asarray(self.inertias)
        return self.delta ** 2 * (inertia + m * self.r ** 2)

    @property
    def center_distance(self) -> float:
        """Distance |OO_i| from the common centre to every ball centre."""
        if self.configuration is Configuration.I:
            return self.R + self.r
        if self.configuration is Configuration.III:
            return self.r - self.R
        return self.R - self.r

    @property
    def min_separation(self) -> Optional[float]:
        """Lower bound on |Gamma_i - Gamma_j| that keeps balls apart (cases I and II)."""
        if self.configuration is Configuration.I:
            return 2 * self.r / (self.R + self.r)
        if self.configuration is Configuration.II:
            return 2 * self.r / (self.R - self.r)
        return None

    @property
    def is_epsilon_minus_one(self) -> bool:
        return abs(self.epsilon + 1.0) <= settings.detection_tolerance

    @property
    def is_axisymmetric(self) -> bool:
        """True when B = C within the detection tolerance scaled by max(A, B, C)."""
        return abs(self.B - self.C) <= settings.detection_tolerance * max(self.A, self.B, self.C)

    def with_epsilon(self, epsilon: float) -> "SphericalParams":
        """Copy with a formal epsilon."""
        return self.model_copy(update={"epsilon_override": epsilon})

    def with_inertia(self, A: float, B: float, C: float) -> "SphericalParams":
        return self.model_copy(update={"A": A, "B": B, "C": C})

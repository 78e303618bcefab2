"""
Parameters, states and level-set constants of the planar ball bearing.
"""
import math
from dataclasses import dataclass
from typing import List

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from shared.errors import StateError

Array = np.ndarray


class PlanarParams(BaseModel):
    """Plane of mass m and inertia I resting on n homogeneous balls of radius r."""

    model_config = ConfigDict(frozen=True)

    m: float = Field(..., gt=0, description="Mass of the plane")
    I: float = Field(..., gt=0, description="Inertia of the plane about the normal through O")
    r: float = Field(..., gt=0, description="Ball radius")
    masses: List[float] = Field(..., min_length=1, description="Ball masses m_i")
    inertias: List[float] = Field(..., min_length=1, description="Scalar ball inertias I_i")

    @model_validator(mode="after")
    def validate_balls(self) -> "PlanarParams":
        if len(self.masses) != len(self.inertias):
            raise ValueError(f"{len(self.masses)} masses but {len(self.inertias)} inertias")
        if any(m <= 0 for m in self.masses) or any(i <= 0 for i in self.inertias):
            raise ValueError("ball masses and inertias must be positive")
        return self

    @property
    def n(self) -> int:
        return len(self.masses)

    @property
    def ball_deltas(self) -> Array:
        """delta_i = (m_i r^2 + I_i) / (4 r^2)."""
        return (np.asarray(self.masses) * self.r ** 2 + np.asarray(self.inertias)) / (4 * self.r ** 2)

    @property
    def delta(self) -> float:
        return float(np.sum(self.ball_deltas))


@dataclass(frozen=True)
class PlanarState:
    """Velocities v = (v_x, v_y, v_phi) and moments n = (N1, N2, M)."""
    vx: float
    vy: float
    vphi: float
    N1: float
    N2: float
    M: float

    def to_vector(self) -> Array:
        return np.array([self.vx, self.vy, self.vphi, self.N1, self.N2, self.M])

    @classmethod
    def from_vector(cls, y: Array) -> "PlanarState":
        return cls(*(float(v) for v in y))

    @property
    def A(self) -> float:
        return math.hypot(self.N1, self.N2)

    @property
    def theta(self) -> float:
        return math.atan2(self.N2, self.N1)

    def f3(self, params: PlanarParams) -> float:
        return params.delta * self.M - self.N1 ** 2 - self.N2 ** 2

    def validate(self, params: PlanarParams) -> "PlanarState":
        """
        Raises:
            StateError: if the state is non-finite or off the region delta M > N1^2 + N2^2
        """
        if not np.all(np.isfinite(self.to_vector())):
            raise StateError("planar state has non-finite components")
        if self.f3(params) <= 0:
            raise StateError(f"planar state is off the admissible region (delta M - |N|^2 = {self.f3(params):.3e})")
        return self


@dataclass(frozen=True)
class LevelSetData:
    """Constants of one level set of (f1, f2, f3) and of the quadrature."""
    m: float
    delta: float
    d1: float
    d2: float
    d3: float
    d5: float           # det on the level set is d5 + c A^2
    d6: float           # v_phi = d6 / sqrt(d5 + c A^2)
    d7: float           # k A sin(theta - alpha) + s sqrt(d5 + c A^2)
    alpha: float
    k: float

    @property
    def c(self) -> float:
        return self.m * (self.m + self.delta) / self.delta

    @property
    def kappa(self) -> float:
        """(m + 2 delta) / (2 (m + delta)), the rotation coefficient of the N-equations."""
        return (self.m + 2 * self.delta) / (2 * (self.m + self.delta))

    @property
    def s(self) -> float:
        return (self.m + 2 * self.delta) * self.delta * self.d6 / (2 * self.m * (self.m + self.delta) ** 2)


@dataclass(frozen=True)
class PlanarTrajectory:
    """Samples of the level-set motion in polar form."""
    times: Array
    A: Array
    theta: Array
    v_phi: Array
    method: str         # "quadrature" or "ode"

    @property
    def N1(self) -> Array:
        return self.A * np.cos(self.theta)

    @property
    def N2(self) -> Array:
        return self.A * np.sin(self.theta)

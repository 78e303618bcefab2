"""
State containers for the spherical ball bearing.

States are immutable dataclasses holding float64 arrays; they pack to and
from the flat vectors that the integrator works with.
"""
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from core.geometry import orthonormality_defect
from core.params import SphericalParams
from shared.config import settings
from shared.errors import GeometryError, StateError

Array = np.ndarray


@dataclass(frozen=True)
class ReducedState:
    """A point (Omega, Gamma_1..Gamma_n) of the second reduced space, with the constants c_i."""
    omega: Array                 # (3,) angular velocity of the moving sphere, body frame
    gammas: Array                # (n, 3) unit directions to the ball centres, body frame
    c: Array                     # (n,) values of <Omega_i, Gamma_i>

    def __post_init__(self):
        object.__setattr__(self, "omega", np.asarray(self.omega, dtype=np.float64).reshape(3))
        object.__setattr__(self, "gammas", np.atleast_2d(np.asarray(self.gammas, dtype=np.float64)))
        object.__setattr__(self, "c", np.atleast_1d(np.asarray(self.c, dtype=np.float64)))
        if self.gammas.shape[1] != 3 or self.gammas.shape[0] != self.c.shape[0]:
            raise StateError(f"gammas {self.gammas.shape} and c {self.c.shape} do not describe the same balls")

    @property
    def n(self) -> int:
        return self.gammas.shape[0]

    def to_vector(self) -> Array:
        """Flatten (Omega, Gamma_1, ..., Gamma_n); c stays fixed."""
        return np.concatenate([self.omega, self.gammas.ravel()])

    @classmethod
    def from_vector(cls, y: Array, c: Array) -> "ReducedState":
        c = np.atleast_1d(np.asarray(c, dtype=np.float64))
        return cls(omega=y[:3], gammas=np.asarray(y[3:3 + 3 * c.size]).reshape(c.size, 3), c=c)

    def renormalized(self) -> "ReducedState":
        norms = np.linalg.norm(self.gammas, axis=1, keepdims=True)
        return ReducedState(omega=self.omega, gammas=self.gammas / norms, c=self.c)

    def unit_defect(self) -> float:
        return float(np.max(np.abs(np.linalg.norm(self.gammas, axis=1) - 1.0)))

    def validate(self, params: SphericalParams, check_feasibility: bool = True) -> "ReducedState":
        """
        Check the state against its parameters.

        Args:
            params: System parameters
            check_feasibility: Also check the ball-separation region (cases I/II, n >= 2)

        Returns:
            The state itself, for chaining

        Raises:
            StateError: wrong ball count, non-finite entries or non-unit Gamma_i
            GeometryError: balls placed closer than the separation bound
        """
        if self.n != params.n:
            raise StateError(f"state has {self.n} balls, parameters have {params.n}")
        if not (np.all(np.isfinite(self.omega)) and np.all(np.isfinite(self.gammas)) and np.all(np.isfinite(self.c))):
            raise StateError("state has non-finite components")
        if self.unit_defect() > settings.unit_tolerance:
            raise StateError(f"Gamma vectors are not unit (defect {self.unit_defect():.3e})")
        bound = params.min_separation
        if check_feasibility and bound is not None and self.n >= 2:
            for i in range(self.n):
                for j in range(i + 1, self.n):
                    gap = np.linalg.norm(self.gammas[i] - self.gammas[j])
                    if gap < bound:
                        raise GeometryError(
                            f"balls {i + 1} and {j + 1} overlap: |Gamma_i - Gamma_j| = {gap:.6f} < 2r/(R±r) = {bound:.6f}"
                        )
        return self


@dataclass(frozen=True)
class FullState:
    """Reduced state plus the attitudes g of the sphere and g_i of the balls."""
    reduced: ReducedState
    g: Array                     # (3, 3)
    g_balls: Array               # (n, 3, 3)

    def __post_init__(self):
        object.__setattr__(self, "g", np.asarray(self.g, dtype=np.float64).reshape(3, 3))
        object.__setattr__(self, "g_balls", np.asarray(self.g_balls, dtype=np.float64).reshape(-1, 3, 3))

    @classmethod
    def at_identity(cls, reduced: ReducedState) -> "FullState":
        return cls(reduced=reduced, g=np.eye(3), g_balls=np.tile(np.eye(3), (reduced.n, 1, 1)))

    @property
    def n(self) -> int:
        return self.reduced.n

    def to_vector(self) -> Array:
        return np.concatenate([self.reduced.to_vector(), self.g.ravel(), self.g_balls.ravel()])

    @classmethod
    def from_vector(cls, y: Array, c: Array) -> "FullState":
        c = np.atleast_1d(np.asarray(c, dtype=np.float64))
        n = c.size
        k = 3 + 3 * n
        return cls(
            reduced=ReducedState.from_vector(y[:k], c),
            g=y[k:k + 9],
            g_balls=y[k + 9:k + 9 + 9 * n],
        )

    def renormalized(self) -> "FullState":
        return FullState(reduced=self.reduced.renormalized(), g=self.g, g_balls=self.g_balls)

    def unit_defect(self) -> float:
        return self.reduced.unit_defect()

    def attitude_defect(self) -> float:
        """Worst orthonormality defect over g and all g_i."""
        return max([orthonormality_defect(self.g)] + [orthonormality_defect(gi) for gi in self.g_balls])


@dataclass(frozen=True)
class DerivedQuantities:
    """Momenta and n=1 shorthands evaluated at a reduced state."""
    modified_inertia: Array      # bold I
    M: Array                     # bold I Omega
    N: Array                     # delta sum I_i c_i Gamma_i
    total_momentum: Array        # M + N
    D: Optional[float] = None    # n = 1 only
    d: Optional[float] = None
    L: Optional[float] = None


@dataclass(frozen=True)
class ConstrainedState:
    """Unreduced velocities (Omega, Omega_i, V_{O_i}) with the ball directions Gamma_i."""
    omega: Array                 # (3,)
    omega_balls: Array           # (n, 3)
    velocities: Array            # (n, 3) ball-centre velocities in the sphere frame
    gammas: Array                # (n, 3)

    def __post_init__(self):
        object.__setattr__(self, "omega", np.asarray(self.omega, dtype=np.float64).reshape(3))
        for name in ("omega_balls", "velocities", "gammas"):
            object.__setattr__(self, name, np.atleast_2d(np.asarray(getattr(self, name), dtype=np.float64)))

    @property
    def n(self) -> int:
        return self.gammas.shape[0]


@dataclass
class Trajectory:
    """Sampled output of an integration run."""
    times: Array
    states: List[ReducedState] = field(default_factory=list)
    full_states: List[FullState] = field(default_factory=list)
    unit_defects: List[float] = field(default_factory=list)   # pre-renormalisation defect per accepted step
    accepted_steps: int = 0
    rejected_steps: int = 0

    @property
    def max_unit_defect(self) -> float:
        return max(self.unit_defects, default=0.0)


@dataclass(frozen=True)
class ReducedRates:
    """Time derivatives (dOmega/dt, dGamma_i/dt) of a reduced state."""
    omega_dot: Array             # (3,)
    gammas_dot: Array            # (n, 3)

    def to_vector(self) -> Array:
        return np.concatenate([self.omega_dot, self.gammas_dot.ravel()])


@dataclass(frozen=True)
class FullRates:
    """Reduced rates plus attitude derivatives dg/dt and dg_i/dt."""
    reduced: ReducedRates
    g_dot: Array                 # (3, 3)
    g_balls_dot: Array           # (n, 3, 3)

    def to_vector(self) -> Array:
        return np.concatenate([self.reduced.to_vector(), self.g_dot.ravel(), self.g_balls_dot.ravel()])

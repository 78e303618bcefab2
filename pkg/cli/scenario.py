"""
Scenario files: validated run descriptions in JSON or YAML.

Field names carry their units (radius_m, mass_kg, ...). Initial states are
given explicitly or drawn from the seeded generator when omitted.
"""
import copy
import itertools
import json
import logging
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

import numpy as np
import yaml
from pydantic import BaseModel, Field, field_validator, model_validator

from core.params import Configuration, SphericalParams
from planar.dynamics import planar_state_from_contacts
from planar.sampling import random_bounded_state
from planar.schemas import PlanarParams, PlanarState
from shared.config import settings
from shared.errors import ScenarioError, UsageError
from spherical.sampling import random_reduced_state
from spherical.schemas import ReducedState

logger = logging.getLogger(__name__)


class Check(str, Enum):
    INTEGRALS = "integrals"
    MEASURE = "measure"
    ORACLE = "oracle"
    F3 = "F3"
    F3PM = "F3pm"
    ANSATZ = "ansatz"
    QUADRATURE_COMPARE = "quadrature-compare"


SPHERICAL_CHECKS = {Check.INTEGRALS, Check.MEASURE, Check.ORACLE, Check.F3, Check.F3PM, Check.ANSATZ}
PLANAR_CHECKS = {Check.INTEGRALS, Check.MEASURE, Check.QUADRATURE_COMPARE}


class SphericalGeometry(BaseModel):
    configuration: Configuration = Field(..., description="Configuration tag I-IV")
    fixed_radius_m: float = Field(..., gt=0, description="Radius R of the fixed sphere")
    ball_radius_m: float = Field(..., gt=0, description="Radius r of the balls")
    ball_masses_kg: List[float] = Field(..., min_length=1)
    ball_inertias_kg_m2: List[float] = Field(..., min_length=1)
    sphere_inertia_kg_m2: Tuple[float, float, float] = Field(..., description="Principal inertias (A, B, C)")
    epsilon_override: Optional[float] = Field(None, description="Formal epsilon replacing the geometric value")

    def to_params(self) -> SphericalParams:
        A, B, C = self.sphere_inertia_kg_m2
        return SphericalParams(
            configuration=self.configuration,
            R=self.fixed_radius_m,
            r=self.ball_radius_m,
            masses=self.ball_masses_kg,
            inertias=self.ball_inertias_kg_m2,
            A=A,
            B=B,
            C=C,
            epsilon_override=self.epsilon_override,
        )


class SphericalInitial(BaseModel):
    """Explicit initial state; any omitted part is drawn at random."""
    omega_rad_s: Optional[Tuple[float, float, float]] = None
    gammas: Optional[List[Tuple[float, float, float]]] = None
    c_rad_s: Optional[List[float]] = None

    def to_state(self, params: SphericalParams, rng: np.random.Generator) -> ReducedState:
        drawn = random_reduced_state(params, rng)
        return ReducedState(
            omega=drawn.omega if self.omega_rad_s is None else self.omega_rad_s,
            gammas=drawn.gammas if self.gammas is None else self.gammas,
            c=drawn.c if self.c_rad_s is None else self.c_rad_s,
        ).validate(params)


class SphericalSection(BaseModel):
    geometry: SphericalGeometry
    initial: SphericalInitial = Field(default_factory=SphericalInitial)


class PlanarGeometry(BaseModel):
    plane_mass_kg: float = Field(..., gt=0)
    plane_inertia_kg_m2: float = Field(..., gt=0)
    ball_radius_m: float = Field(..., gt=0)
    ball_masses_kg: List[float] = Field(..., min_length=1)
    ball_inertias_kg_m2: List[float] = Field(..., min_length=1)

    def to_params(self) -> PlanarParams:
        return PlanarParams(
            m=self.plane_mass_kg,
            I=self.plane_inertia_kg_m2,
            r=self.ball_radius_m,
            masses=self.ball_masses_kg,
            inertias=self.ball_inertias_kg_m2,
        )


class PlanarInitial(BaseModel):
    """Velocities plus either contact points or the moments (N1, N2, M); random bounded state when empty."""
    v_x_m_s: Optional[float] = None
    v_y_m_s: Optional[float] = None
    v_phi_rad_s: Optional[float] = None
    contact_points_m: Optional[List[Tuple[float, float]]] = None
    moments: Optional[Tuple[float, float, float]] = Field(None, description="(N1, N2, M)")

    @model_validator(mode="after")
    def one_placement(self) -> "PlanarInitial":
        if self.contact_points_m is not None and self.moments is not None:
            raise ValueError("give either contact_points_m or moments, not both")
        velocities = (self.v_x_m_s, self.v_y_m_s, self.v_phi_rad_s)
        placed = self.contact_points_m is not None or self.moments is not None
        if placed and any(v is None for v in velocities):
            raise ValueError("an explicit planar state needs v_x_m_s, v_y_m_s and v_phi_rad_s")
        return self

    def to_state(self, params: PlanarParams, rng: np.random.Generator) -> PlanarState:
        v = (self.v_x_m_s, self.v_y_m_s, self.v_phi_rad_s)
        if self.contact_points_m is not None:
            state = planar_state_from_contacts(params, v, self.contact_points_m)
        elif self.moments is not None:
            N1, N2, M = self.moments
            state = PlanarState(vx=v[0], vy=v[1], vphi=v[2], N1=N1, N2=N2, M=M)
        else:
            state = random_bounded_state(params, rng)
        return state.validate(params)


class PlanarSection(BaseModel):
    geometry: PlanarGeometry
    initial: PlanarInitial = Field(default_factory=PlanarInitial)


class RunControls(BaseModel):
    """Integration controls; unset values fall back to the settings."""
    t_final_s: Optional[float] = Field(None, ge=0)
    tol: Optional[float] = Field(None, gt=0)
    samples: Optional[int] = Field(None, ge=2)
    seed: Optional[int] = Field(None, ge=0)

    def resolved(self) -> "RunControls":
        return RunControls(
            t_final_s=settings.t_final if self.t_final_s is None else self.t_final_s,
            tol=settings.tol if self.tol is None else self.tol,
            samples=settings.samples if self.samples is None else self.samples,
            seed=settings.seed if self.seed is None else self.seed,
        )


class Scenario(BaseModel):
    name: str = Field(..., min_length=1)
    system: Literal["spherical", "planar"]
    spherical: Optional[SphericalSection] = None
    planar: Optional[PlanarSection] = None
    run: RunControls = Field(default_factory=RunControls)
    checks: List[Check] = Field(default_factory=list)
    sweep: Dict[str, List[Union[float, int, str]]] = Field(
        default_factory=dict, description="Grid over dotted field paths, e.g. run.tol"
    )

    @field_validator("checks")
    @classmethod
    def unique_checks(cls, v: List[Check]) -> List[Check]:
        return list(dict.fromkeys(v))

    @model_validator(mode="after")
    def section_matches_system(self) -> "Scenario":
        section = getattr(self, self.system)
        if section is None:
            raise ValueError(f"system '{self.system}' needs a '{self.system}' section")
        allowed = SPHERICAL_CHECKS if self.system == "spherical" else PLANAR_CHECKS
        bad = [c.value for c in self.checks if c not in allowed]
        if bad:
            raise ValueError(f"checks {bad} do not apply to the {self.system} system")
        return self

    def with_value(self, path: str, value: Any) -> "Scenario":
        """Copy with one dotted field replaced, validated again."""
        data = copy.deepcopy(self.model_dump(mode="json"))
        target = data
        keys = path.split(".")
        for key in keys[:-1]:
            if not isinstance(target.get(key), dict):
                raise UsageError(f"'{path}' does not name a scenario field")
            target = target[key]
        target[keys[-1]] = value
        data["sweep"] = {}
        return Scenario.model_validate(data)

    def grid(self) -> List[Tuple[Dict[str, Any], "Scenario"]]:
        """Cartesian product of the sweep axes; a scenario without axes is a one-point grid."""
        if not self.sweep:
            return [({}, self)]
        axes = sorted(self.sweep)
        points = []
        for values in itertools.product(*(self.sweep[a] for a in axes)):
            point = dict(zip(axes, values))
            scenario = self
            for path, value in point.items():
                scenario = scenario.with_value(path, value)
            points.append((point, scenario))
        return points


def load_scenario(path: Union[str, Path]) -> Scenario:
    """
    Read and validate a scenario; the parser is chosen by file suffix.

    Raises:
        ScenarioError: missing file or malformed JSON/YAML
        pydantic.ValidationError: content fails validation
    """
    scenario_path = Path(path)
    if not scenario_path.exists():
        raise ScenarioError(f"scenario file {scenario_path} not found")

    try:
        with open(scenario_path, "r", encoding="utf-8") as f:
            if scenario_path.suffix.lower() in [".yaml", ".yml"]:
                data = yaml.safe_load(f)
            else:
                data = json.load(f)
    except (yaml.YAMLError, json.JSONDecodeError) as e:
        raise ScenarioError(f"cannot parse {scenario_path}: {e}") from e

    if not isinstance(data, dict):
        raise ScenarioError(f"{scenario_path} does not contain a mapping")
    scenario = Scenario.model_validate(data)
    logger.info(f"Loaded scenario '{scenario.name}' ({scenario.system}) from {scenario_path}")
    return scenario

"""
Execution of scenarios: integration, checks and report assembly.
"""
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, ValidationError

from ansatz.certify import pointwise_derivative
from ansatz.exponential import residuals, solve_for
from ansatz.linear import linear_integral_rate, nullspace, system_for
from core.params import SphericalParams
from invariants.integrals import integral_drift, integrals
from invariants.measure import verify_measure
from planar.dynamics import (
    planar_det,
    planar_integrals,
    reduce_to_level_set,
    remark_integral,
    verify_planar_measure,
)
from planar.quadrature import integrate_planar, ode_solution, oscillation_period, polar_divergence, quadrature_solution
from planar.schemas import PlanarParams, PlanarState
from shared.config import settings
from shared.errors import BearingError, InadmissibleAError, ScenarioError, UsageError
from spherical.dynamics import derived_quantities, reduced_field
from spherical.integrator import integrate_full
from spherical.oracle import constrained_state, oracle_field
from spherical.schemas import FullState, ReducedState

from .report import write_json, write_trajectory_csv
from .scenario import Check, RunControls, Scenario

logger = logging.getLogger(__name__)

DRIFT_THRESHOLD = 1e-8
THIRD_INTEGRAL_THRESHOLD = 1e-7
MEASURE_THRESHOLD = 1e-6
ORACLE_THRESHOLD = 1e-9
POINTWISE_THRESHOLD = 1e-10
QUADRATURE_THRESHOLD = 1e-6
REMARK_THRESHOLD = 1e-10
ANSATZ_RESIDUAL_THRESHOLD = 1e-12
CHECK_STATES = 10

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_NUMERICAL = 4
EXIT_CHECK_FAILED = 5

# exceptions turned into an exit code instead of a traceback
RUN_FAILURES = (BearingError, ValidationError, ValueError, ArithmeticError, OSError)


class CheckResult(BaseModel):
    name: str
    passed: bool
    value: float = Field(..., description="Measured quantity compared against the threshold")
    threshold: float
    details: Dict[str, Any] = Field(default_factory=dict)


class RunReport(BaseModel):
    """Outcome of one scenario run."""
    scenario: str
    system: str
    run: RunControls
    columns: List[str] = Field(default_factory=list)
    rows: List[List[float]] = Field(default_factory=list, description="Per-sample state rows, also written as CSV")
    drifts: Dict[str, float] = Field(default_factory=dict)
    checks: List[CheckResult] = Field(default_factory=list)
    wall_clock_s: float = Field(0.0, exclude=True)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def exit_code(self) -> int:
        return EXIT_OK if self.passed else EXIT_CHECK_FAILED


class SweepPoint(BaseModel):
    point: Dict[str, Any]
    exit_code: int
    error: Optional[str] = None
    report: Optional[RunReport] = None


class SweepReport(BaseModel):
    scenario: str
    points: List[SweepPoint]
    worst_drift: Dict[str, float] = Field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        return max((p.exit_code for p in self.points), default=EXIT_OK)


def exit_code_for(error: BaseException) -> int:
    """
    Map an exception to the CLI exit code of its family.

    Invalid input is a pydantic ValidationError or one of our ValueError
    subclasses other than InadmissibleAError. Any other ValueError comes from
    numpy or scipy (LinAlgError, root brackets) and counts as numerical.
    """
    if isinstance(error, (ScenarioError, OSError)):
        return EXIT_PARSE
    if isinstance(error, ValidationError):
        return EXIT_VALIDATION
    if isinstance(error, BearingError) and isinstance(error, ValueError) and not isinstance(error, InadmissibleAError):
        return EXIT_VALIDATION
    return EXIT_NUMERICAL


def _worst(values: Iterable[float]) -> float:
    return max(values, default=0.0)


def _check(name: str, value: float, threshold: float, **details) -> CheckResult:
    passed = bool(np.isfinite(value)) and value < threshold
    level = logging.INFO if passed else logging.WARNING
    logger.log(level, f"check {name}: {value:.3e} (threshold {threshold:.1e}) -> {'pass' if passed else 'FAIL'}")
    return CheckResult(name=name, passed=passed, value=float(value), threshold=threshold, details=details)


def _probe_states(states: List[Any]) -> List[Any]:
    step = max(1, len(states) // CHECK_STATES)
    return states[::step][:CHECK_STATES]


# Spherical system

def _spherical_columns(params: SphericalParams) -> List[str]:
    columns = ["t", "omega_1", "omega_2", "omega_3"]
    for i in range(params.n):
        columns += [f"gamma{i + 1}_{k}" for k in (1, 2, 3)]
    columns += ["F1", "F2", "T"]
    if params.n == 1 and params.is_epsilon_minus_one:
        columns.append("F3")
    if params.n == 1 and params.is_axisymmetric:
        columns += ["F3plus", "F3minus"]
    columns += ["mu", "attitude_defect"]
    return columns


def _spherical_row(params: SphericalParams, t: float, full: FullState, columns: List[str]) -> List[float]:
    state = full.reduced
    report = integrals(params, state).model_dump()
    row = [t, *state.omega, *state.gammas.ravel()]
    row += [report[name] for name in columns[len(row):-1]]
    row.append(full.attitude_defect())
    return [float(v) for v in row]


def _measure_check(params: SphericalParams, states: List[ReducedState]) -> CheckResult:
    weighted, control = [], []
    for state in states:
        scale = 1.0 + float(np.dot(state.omega, state.omega))
        weighted.append(abs(verify_measure(params, state)) / scale)
        control.append(abs(verify_measure(params, state, weighted=False)) / scale)
    return _check(
        "measure",
        _worst(weighted),
        MEASURE_THRESHOLD,
        mean_residual=float(np.mean(weighted)),
        **{"unweighted_fraction_above_1e-3": float(np.mean(np.array(control) > 1e-3))},
    )


def _oracle_check(params: SphericalParams, states: List[ReducedState]) -> CheckResult:
    worst = 0.0
    for state in states:
        reduced = reduced_field(params, state).omega_dot
        oracle = oracle_field(params, constrained_state(params, state)).omega_dot
        worst = max(worst, float(np.linalg.norm(reduced - oracle) / max(np.linalg.norm(reduced), 1.0)))
    return _check("oracle", worst, ORACLE_THRESHOLD)


def _ansatz_checks(params: SphericalParams, state: ReducedState) -> List[CheckResult]:
    if params.n != 1:
        raise UsageError(f"the ansatz search is set up for one ball, got n={params.n}")
    results = []
    c = float(state.c[0])
    basis = nullspace(system_for(params, c))
    scale = 1.0 + float(np.dot(state.omega, state.omega)) ** 1.5
    rates = [abs(linear_integral_rate(params, state, x)) / scale for x in basis]
    results.append(_check(
        "ansatz-linear",
        _worst(rates),
        POINTWISE_THRESHOLD,
        nullspace_dimension=len(basis),
        nullspace=[list(map(float, x)) for x in basis],
        epsilon=params.epsilon,
    ))

    if params.is_axisymmetric:
        q = derived_quantities(params, state)
        worst_residual, worst_rate = 0.0, 0.0
        for ansatz in solve_for(params, c):
            worst_residual = max(worst_residual, *residuals(ansatz, params.A, params.C, q.D, q.d, params.epsilon))
            value = abs(ansatz.evaluate(params, state))
            rate = pointwise_derivative(lambda s, a=ansatz: a.evaluate(params, s), params, state)
            worst_rate = max(worst_rate, rate / max(value, 1.0))
        results.append(_check(
            "ansatz-exponential",
            worst_residual,
            ANSATZ_RESIDUAL_THRESHOLD * max(1.0, params.A, params.C, q.D) ** 2,
            pointwise_rate=worst_rate,
            degenerate=params.A == params.C,
        ))
    return results


def run_spherical(scenario: Scenario, controls: RunControls) -> RunReport:
    section = scenario.spherical
    params = section.geometry.to_params()
    rng = np.random.default_rng(controls.seed)
    state = section.initial.to_state(params, rng)

    trajectory = integrate_full(
        params, FullState.at_identity(state), controls.t_final_s, tol=controls.tol, samples=controls.samples
    )
    columns = _spherical_columns(params)
    rows = [_spherical_row(params, t, full, columns) for t, full in zip(trajectory.times, trajectory.full_states)]
    drifts = integral_drift(params, trajectory.states)
    drifts["unit_defect"] = trajectory.max_unit_defect

    probes = _probe_states(trajectory.states)
    checks = []
    for check in scenario.checks:
        if check is Check.INTEGRALS:
            names = [k for k in drifts if k in ("F1", "F2", "T") or k.startswith(("F_", "c_"))]
            checks.append(_check("integrals", _worst(drifts[k] for k in names), DRIFT_THRESHOLD))
        elif check is Check.F3:
            if "F3" not in drifts:
                raise UsageError(f"check F3 needs one ball and eps = -1 (eps = {params.epsilon})")
            checks.append(_check("F3", drifts["F3"], THIRD_INTEGRAL_THRESHOLD))
        elif check is Check.F3PM:
            if "F3plus" not in drifts:
                raise UsageError("check F3pm needs one ball and B = C")
            names = [k for k in ("F3plus", "F3minus", "F3_phase") if k in drifts]
            checks.append(_check("F3pm", _worst(drifts[k] for k in names), THIRD_INTEGRAL_THRESHOLD))
        elif check is Check.MEASURE:
            checks.append(_measure_check(params, probes))
        elif check is Check.ORACLE:
            checks.append(_oracle_check(params, probes))
        elif check is Check.ANSATZ:
            checks.extend(_ansatz_checks(params, state))

    return RunReport(
        scenario=scenario.name, system="spherical", run=controls, columns=columns, rows=rows, drifts=drifts, checks=checks
    )


# Planar system

PLANAR_COLUMNS = [
    "t", "v_x", "v_y", "v_phi", "N1", "N2", "M", "A", "theta", "f1", "f2", "f3", "f4", "mu",
]


def _planar_row(params: PlanarParams, t: float, state: PlanarState) -> List[float]:
    return [
        float(v) for v in (
            t, *state.to_vector(), state.A, state.theta,
            *planar_integrals(params, state), math.sqrt(planar_det(params, state)),
        )
    ]


def _planar_drifts(params: PlanarParams, states: List[PlanarState]) -> Dict[str, float]:
    values = np.array([planar_integrals(params, s) for s in states])
    drifts = {}
    for k, name in enumerate(("f1", "f2", "f3", "f4")):
        column = values[:, k]
        scale = max(abs(column[0]), 1.0 if name in ("f1", "f2") else 1e-300)
        drifts[name] = float(np.max(np.abs(column - column[0])) / scale)
    drifts["min_f3"] = float(np.min(values[:, 2]))
    return drifts


def _quadrature_check(params: PlanarParams, state: PlanarState, controls: RunControls) -> List[CheckResult]:
    level, initial = reduce_to_level_set(params, state)
    t_final = controls.t_final_s
    try:
        t_final = max(t_final, oscillation_period(level, initial))
    except (BearingError, ValueError):
        pass
    times = np.linspace(0.0, t_final, controls.samples)
    quad = quadrature_solution(level, initial, times)
    ode = ode_solution(level, initial, times)
    deviation = float(np.max(np.abs(quad.A - ode.A)))
    d6_sq = level.d6 ** 2
    remark = max(
        abs(remark_integral(level, v, a) - d6_sq)
        for traj in (quad, ode)
        for v, a in zip(traj.v_phi, traj.A)
    ) / max(d6_sq, 1e-300)
    return [
        _check("quadrature-compare", deviation, QUADRATURE_THRESHOLD, method=quad.method, t_final=t_final),
        _check("remark-integral", remark, REMARK_THRESHOLD),
    ]


def _planar_measure_check(params: PlanarParams, states: List[PlanarState]) -> List[CheckResult]:
    weighted, control, polar = [], [], []
    for state in states:
        scale = 1.0 + float(np.dot(state.to_vector()[:3], state.to_vector()[:3]))
        weighted.append(abs(verify_planar_measure(params, state)) / scale)
        control.append(abs(verify_planar_measure(params, state, weighted=False)) / scale)
        level, _ = reduce_to_level_set(params, state)
        if state.A > 0:
            polar.append(abs(polar_divergence(level, state.A, state.theta)) / scale)
    return [
        _check(
            "measure",
            _worst(weighted),
            MEASURE_THRESHOLD,
            **{"unweighted_fraction_above_1e-3": float(np.mean(np.array(control) > 1e-3))},
        ),
        _check("polar-measure", _worst(polar), MEASURE_THRESHOLD),
    ]


def run_planar(scenario: Scenario, controls: RunControls) -> RunReport:
    section = scenario.planar
    params = section.geometry.to_params()
    rng = np.random.default_rng(controls.seed)
    state = section.initial.to_state(params, rng)

    times = np.linspace(0.0, controls.t_final_s, controls.samples)
    states = integrate_planar(params, state, times, tol=controls.tol)
    rows = [_planar_row(params, t, s) for t, s in zip(times, states)]
    drifts = _planar_drifts(params, states)

    checks = []
    for check in scenario.checks:
        if check is Check.INTEGRALS:
            names = ("f1", "f2", "f3", "f4")
            passed_region = drifts["min_f3"] > 0
            result = _check("integrals", _worst(drifts[k] for k in names), DRIFT_THRESHOLD, stays_in_region=passed_region)
            if not passed_region:
                result.passed = False
            checks.append(result)
        elif check is Check.MEASURE:
            checks.extend(_planar_measure_check(params, _probe_states(states)))
        elif check is Check.QUADRATURE_COMPARE:
            checks.extend(_quadrature_check(params, state, controls))

    return RunReport(
        scenario=scenario.name, system="planar", run=controls, columns=PLANAR_COLUMNS, rows=rows, drifts=drifts, checks=checks
    )


# Entry points

def run(
    scenario: Scenario,
    out_dir: Optional[Path] = None,
    extra_checks: Iterable[Check] = (),
    overrides: Optional[Dict[str, Any]] = None,
) -> RunReport:
    """
    Run one scenario and write its artifacts.

    Args:
        scenario: Validated scenario
        out_dir: Directory for trajectory.csv and report.json (nothing written when None)
        extra_checks: Checks added to those named in the scenario
        overrides: RunControls fields overriding the scenario (CLI flags)

    Returns:
        RunReport
    """
    start = time.perf_counter()
    checks = list(dict.fromkeys([*scenario.checks, *extra_checks]))
    scenario = scenario.model_copy(update={"checks": checks})
    values = scenario.run.model_dump()
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    controls = RunControls(**values).resolved()

    logger.info(f"Running scenario '{scenario.name}' ({scenario.system}), seed={controls.seed}")
    runner = run_spherical if scenario.system == "spherical" else run_planar
    report = runner(scenario, controls)
    report.wall_clock_s = time.perf_counter() - start
    logger.info(f"Scenario '{scenario.name}' finished in {report.wall_clock_s:.2f}s, passed={report.passed}")

    if out_dir is not None:
        out_dir = Path(out_dir)
        write_trajectory_csv(out_dir / "trajectory.csv", report.columns, report.rows)
        write_json(out_dir / "report.json", report.model_dump(mode="json", exclude={"rows"}))
    return report


def _run_point(args: Tuple[int, Dict[str, Any], Scenario, Optional[Path], Tuple[Check, ...], Dict[str, Any]]) -> SweepPoint:
    index, point, scenario, out_dir, extra, overrides = args
    point_dir = None if out_dir is None else Path(out_dir) / f"point_{index:03d}"
    try:
        report = run(scenario, out_dir=point_dir, extra_checks=extra, overrides=overrides)
        return SweepPoint(point=point, exit_code=report.exit_code, report=report.model_copy(update={"rows": []}))
    except RUN_FAILURES as e:
        code = exit_code_for(e)
        logger.error(f"sweep point {point} failed with exit code {code}: {e}")
        return SweepPoint(point=point, exit_code=code, error=str(e))


def sweep(
    scenario: Scenario,
    out_dir: Optional[Path] = None,
    extra_checks: Iterable[Check] = (),
    overrides: Optional[Dict[str, Any]] = None,
    workers: Optional[int] = None,
) -> SweepReport:
    """
    Run every point of the scenario's sweep grid; points fail independently.

    Args:
        scenario: Scenario with a sweep section (a scenario without one is a one-point grid)
        out_dir: Directory receiving one sub-directory per point and sweep.json
        extra_checks: Checks added to every point
        overrides: RunControls overrides applied to every point
        workers: Worker cap (defaults to settings.workers)

    Returns:
        SweepReport with the points in grid order
    """
    workers = settings.workers if workers is None else workers
    grid = scenario.grid()
    jobs = [(i, point, s, out_dir, tuple(extra_checks), overrides or {}) for i, (point, s) in enumerate(grid)]
    logger.info(f"Sweeping {len(jobs)} grid points of '{scenario.name}' with {workers} workers")

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        points = list(pool.map(_run_point, jobs))

    worst: Dict[str, float] = {}
    for p in points:
        if p.report is None:
            continue
        for name, value in p.report.drifts.items():
            worst[name] = max(worst.get(name, 0.0), value)

    result = SweepReport(scenario=scenario.name, points=points, worst_drift=worst)
    if out_dir is not None:
        write_json(Path(out_dir) / "sweep.json", result.model_dump(mode="json"))
    return result

"""
Tests for scenario loading, the runner and the command-line entry point.
"""
import json

import pytest

import numpy as np
import scipy.optimize
from pydantic import ValidationError

from cli.main import main
from cli.report import read_trajectory_csv
from cli.runner import EXIT_NUMERICAL, EXIT_PARSE, EXIT_VALIDATION, exit_code_for, run, sweep
from cli.scenario import Check, Scenario, load_scenario
from shared.config import get_settings
from shared.errors import InadmissibleAError, ScenarioError, StiffnessError, UsageError

SHORT = ["--t-final", "2", "--samples", "5"]


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


BAD_CASE_II = """
name: bad-case-II
system: spherical
spherical:
  geometry:
    configuration: II
    fixed_radius_m: 2.0
    ball_radius_m: 1.0
    ball_masses_kg: [1.0]
    ball_inertias_kg_m2: [0.4]
    sphere_inertia_kg_m2: [2.0, 3.0, 4.0]
"""


class TestSettings:
    """Test environment configuration."""

    def test_defaults(self):
        """Defaults match the documented run controls."""
        s = get_settings()
        assert s.tol == 1e-10
        assert s.nullspace_tolerance == 1e-10

    def test_environment_override(self, monkeypatch):
        """BEARING_-prefixed variables override the defaults."""
        monkeypatch.setenv("BEARING_TOL", "1e-8")
        monkeypatch.setenv("BEARING_WORKERS", "2")
        s = get_settings()
        assert s.tol == 1e-8
        assert s.workers == 2


class TestScenarioLoading:
    """Test reading and validating scenario files."""

    def test_load_json(self, data_dir):
        """JSON scenarios load into a validated model."""
        scenario = load_scenario(data_dir / "case_III_eps_minus_one.json")
        assert scenario.system == "spherical"
        params = scenario.spherical.geometry.to_params()
        assert params.epsilon == pytest.approx(-1.0)
        assert scenario.checks == [Check.INTEGRALS, Check.F3, Check.MEASURE, Check.ORACLE]

    def test_load_yaml(self, data_dir):
        """YAML scenarios load the same way."""
        scenario = load_scenario(data_dir / "symmetric_BC.yaml")
        params = scenario.spherical.geometry.to_params()
        assert params.is_axisymmetric
        assert scenario.run.t_final_s == 50.0

    def test_missing_file(self, tmp_path):
        """A missing file is a scenario error."""
        with pytest.raises(ScenarioError):
            load_scenario(tmp_path / "nope.json")

    def test_malformed_json(self, tmp_path):
        """Unparseable JSON is a scenario error."""
        path = write(tmp_path / "broken.json", '{"name": "x", "system": ')
        with pytest.raises(ScenarioError):
            load_scenario(path)

    def test_missing_section(self, tmp_path):
        """The section named by system must be present."""
        path = write(tmp_path / "empty.yaml", "name: empty\nsystem: planar\n")
        with pytest.raises(ValidationError):
            load_scenario(path)

    def test_check_system_mismatch(self, data_dir):
        """Planar-only checks are rejected on spherical scenarios."""
        scenario = load_scenario(data_dir / "case_III_eps_minus_one.json")
        data = scenario.model_dump(mode="json")
        data["checks"] = ["quadrature-compare"]
        with pytest.raises(ValidationError):
            Scenario.model_validate(data)

    def test_grid(self, data_dir):
        """Sweep axes expand in order; no axes give one point."""
        sweep_scenario = load_scenario(data_dir / "epsilon_sweep.yaml")
        grid = sweep_scenario.grid()
        assert [p["spherical.geometry.epsilon_override"] for p, _ in grid] == [-1.0, -0.5, 0.5, 1.0]
        assert grid[0][1].spherical.geometry.to_params().epsilon == -1.0
        assert grid[0][1].sweep == {}
        plain = load_scenario(data_dir / "symmetric_BC.yaml")
        assert plain.grid() == [({}, plain)]

    def test_with_value_bad_path(self, data_dir):
        """Paths through non-mapping fields are usage errors."""
        scenario = load_scenario(data_dir / "symmetric_BC.yaml")
        with pytest.raises(UsageError):
            scenario.with_value("bogus.tol", 1e-8)


class TestRunner:
    """Test scenario execution and report files."""

    def test_run_writes_artifacts(self, data_dir, tmp_path):
        """trajectory.csv and report.json are written and the checks pass."""
        scenario = load_scenario(data_dir / "case_III_eps_minus_one.json")
        report = run(scenario, out_dir=tmp_path, overrides={"t_final_s": 2.0, "samples": 5})
        assert report.passed
        assert [c.name for c in report.checks] == ["integrals", "F3", "measure", "oracle"]

        columns, rows = read_trajectory_csv(tmp_path / "trajectory.csv")
        assert columns[0] == "t" and "F3" in columns
        assert len(rows) == 5
        assert rows[-1][0] == 2.0

        payload = json.loads((tmp_path / "report.json").read_text())
        assert payload["scenario"] == "case-III-eps-minus-one"
        assert "rows" not in payload
        assert "wall_clock_s" not in payload

    def test_csv_header(self, data_dir, tmp_path):
        """The first line names the schema version."""
        run(load_scenario(data_dir / "planar_contacts.yaml"), out_dir=tmp_path, overrides={"t_final_s": 1.0, "samples": 3})
        first = (tmp_path / "trajectory.csv").read_text().splitlines()[0]
        assert first == "# bearing-trajectory v1"

    def test_bad_csv_header(self, tmp_path):
        """Foreign files are refused."""
        path = write(tmp_path / "other.csv", "t,x\n0,1\n")
        with pytest.raises(ValueError):
            read_trajectory_csv(path)

    def test_deterministic_reports(self, data_dir, tmp_path):
        """Two runs with the same seed give byte-identical files."""
        scenario = load_scenario(data_dir / "planar_three_balls.json")
        overrides = {"t_final_s": 1.0, "samples": 5}
        run(scenario, out_dir=tmp_path / "a", overrides=overrides)
        run(scenario, out_dir=tmp_path / "b", overrides=overrides)
        for name in ("report.json", "trajectory.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_overrides(self, data_dir):
        """CLI overrides replace scenario controls; unset ones fall back."""
        scenario = load_scenario(data_dir / "symmetric_BC.yaml")
        report = run(scenario, overrides={"t_final_s": 0.5, "samples": 3, "seed": 9, "tol": None})
        assert report.run.seed == 9
        assert report.run.tol == 1e-10
        assert len(report.rows) == 3

    def test_epsilon_sweep(self, data_dir, tmp_path):
        """Nullspace dimensions over eps = -1, -1/2, 1/2, 1 are 1, 0, 0, 1."""
        result = sweep(load_scenario(data_dir / "epsilon_sweep.yaml"), out_dir=tmp_path, workers=2)
        dims = []
        for point in result.points:
            linear = next(c for c in point.report.checks if c.name == "ansatz-linear")
            dims.append(linear.details["nullspace_dimension"])
        assert dims == [1, 0, 0, 1]
        assert result.exit_code == 0
        assert (tmp_path / "sweep.json").exists()
        assert (tmp_path / "point_003" / "report.json").exists()

    def test_sweep_isolates_failures(self, data_dir):
        """A failing grid point does not stop the others."""
        scenario = load_scenario(data_dir / "symmetric_BC.yaml")
        data = scenario.model_dump(mode="json")
        data["sweep"] = {"spherical.geometry.configuration": ["I", "II"]}
        data["run"].update(t_final_s=0.5, samples=3)
        data["checks"] = ["integrals"]
        result = sweep(Scenario.model_validate(data), workers=1)
        assert [p.exit_code for p in result.points] == [0, EXIT_VALIDATION]
        assert result.points[1].error
        assert result.exit_code == EXIT_VALIDATION

    def test_exit_codes(self):
        """Error families map to exit codes."""
        assert exit_code_for(ScenarioError("x")) == EXIT_PARSE
        assert exit_code_for(UsageError("x")) == EXIT_VALIDATION
        assert exit_code_for(StiffnessError("x", t=1.0, state=None)) == EXIT_NUMERICAL
        assert exit_code_for(InadmissibleAError("x", A=1.0, argument=1.5)) == EXIT_NUMERICAL

    def test_library_failures_are_numerical(self):
        """ValueErrors raised inside numpy and scipy are numerical failures, not invalid input."""
        with pytest.raises(np.linalg.LinAlgError) as singular:
            np.linalg.solve(np.zeros((3, 3)), np.ones(3))
        with pytest.raises(ValueError) as bracket:
            scipy.optimize.brentq(lambda x: x * x + 1.0, -1.0, 1.0)
        assert exit_code_for(singular.value) == EXIT_NUMERICAL
        assert exit_code_for(bracket.value) == EXIT_NUMERICAL
        assert exit_code_for(ZeroDivisionError()) == EXIT_NUMERICAL
        assert exit_code_for(OSError("disk full")) == EXIT_PARSE
        with pytest.raises(ValidationError) as invalid:
            Scenario.model_validate({"name": "x", "system": "planar"})
        assert exit_code_for(invalid.value) == EXIT_VALIDATION


class TestMain:
    """Test the command-line entry point."""

    def test_check_invariants(self, data_dir, tmp_path):
        """A short spherical run passes every applicable check."""
        code = main(["check-invariants", "--scenario", str(data_dir / "case_III_eps_minus_one.json"), "--out", str(tmp_path), *SHORT])
        assert code == 0
        payload = json.loads((tmp_path / "report.json").read_text())
        assert {c["name"] for c in payload["checks"]} >= {"integrals", "measure", "oracle", "F3"}

    def test_find_integrals(self, data_dir, tmp_path):
        """The exponential ansatz is solved for B = C."""
        code = main(["find-integrals", "--scenario", str(data_dir / "symmetric_BC.yaml"), "--out", str(tmp_path), *SHORT])
        assert code == 0
        payload = json.loads((tmp_path / "report.json").read_text())
        assert "ansatz-exponential" in {c["name"] for c in payload["checks"]}

    def test_compare_quadrature(self, data_dir, tmp_path):
        """Quadrature and direct integration agree for the planar scenario."""
        code = main(["compare-quadrature", "--scenario", str(data_dir / "planar_three_balls.json"), "--out", str(tmp_path), *SHORT])
        assert code == 0

    def test_wrong_system(self, data_dir, tmp_path):
        """simulate-planar on a spherical scenario is invalid input."""
        code = main(["simulate-planar", "--scenario", str(data_dir / "symmetric_BC.yaml"), "--out", str(tmp_path)])
        assert code == EXIT_VALIDATION

    def test_parse_error(self, tmp_path):
        """Malformed files exit with 2."""
        path = write(tmp_path / "broken.json", "{")
        assert main(["simulate-spherical", "--scenario", str(path), "--out", str(tmp_path)]) == EXIT_PARSE
        assert main(["simulate-spherical", "--scenario", str(tmp_path / "none.yaml"), "--out", str(tmp_path)]) == EXIT_PARSE

    def test_invalid_geometry(self, tmp_path):
        """Case II with R <= 2r exits with 3."""
        path = write(tmp_path / "bad.yaml", BAD_CASE_II)
        assert main(["simulate-spherical", "--scenario", str(path), "--out", str(tmp_path), *SHORT]) == EXIT_VALIDATION

    def test_unwritable_output(self, data_dir, tmp_path):
        """A report directory that cannot be created exits with 2."""
        blocker = write(tmp_path / "taken", "not a directory")
        code = main(["simulate-planar", "--scenario", str(data_dir / "planar_contacts.yaml"), "--out", str(blocker / "run"), *SHORT])
        assert code == EXIT_PARSE


@pytest.mark.slow
class TestScenarioAcceptance:
    """Full-length runs of the bundled scenarios."""

    @pytest.mark.parametrize("filename", [
        "case_III_eps_minus_one.json",
        "symmetric_BC.yaml",
        "case_II_three_balls.yaml",
        "planar_three_balls.json",
        "planar_contacts.yaml",
    ])
    def test_scenario_passes(self, data_dir, tmp_path, filename):
        """Every bundled scenario passes its own checks."""
        report = run(load_scenario(data_dir / filename), out_dir=tmp_path)
        failed = [c.name for c in report.checks if not c.passed]
        assert not failed

    def test_tolerance_sweep(self, data_dir, tmp_path):
        """Drift shrinks as the tolerance tightens."""
        result = sweep(load_scenario(data_dir / "tolerance_sweep.json"), out_dir=tmp_path, workers=3)
        drifts = [p.report.drifts["F1"] for p in result.points]
        assert drifts[0] > drifts[2]

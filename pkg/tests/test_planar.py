"""
Unit tests for the planar bearing: field, integrals, level-set reduction and quadrature.
"""
import math

import pytest

import numpy as np
from pydantic import ValidationError

from planar.dynamics import (
    inertia_matrix,
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
from planar.quadrature import (
    admissible_interval,
    gap_quotient,
    integrate_planar,
    ode_solution,
    oscillation_period,
    polar_divergence,
    potential,
    quadrature_solution,
    theta_argument,
    theta_of_A,
    v_phi_of_A,
)
from planar.sampling import random_bounded_state, random_planar_state
from planar.schemas import PlanarParams, PlanarState
from shared.errors import InadmissibleAError, StateError, UsageError


def wrapped(x):
    return np.angle(np.exp(1j * np.asarray(x)))


def integral_gradients(params, s):
    """Gradients of f1..f4 with respect to (vx, vy, vphi, N1, N2, M)."""
    a = params.m + params.delta
    return [
        np.array([a, 0.0, -s.N2, 0.0, -s.vphi, 0.0]),
        np.array([0.0, a, s.N1, s.vphi, 0.0, 0.0]),
        np.array([0.0, 0.0, 0.0, -2 * s.N1, -2 * s.N2, params.delta]),
        np.array([
            a * s.vx - s.vphi * s.N2,
            a * s.vy + s.vphi * s.N1,
            (params.I + s.M) * s.vphi + s.N1 * s.vy - s.N2 * s.vx,
            s.vphi * s.vy,
            -s.vphi * s.vx,
            0.5 * s.vphi ** 2,
        ]),
    ]


@pytest.fixture
def unbounded_level(planar_params):
    """Small v_phi: the radius turns once and escapes."""
    f3 = 0.5
    state = PlanarState(vx=1.0, vy=0.0, vphi=0.3, N1=1.0, N2=0.0, M=(f3 + 1.0) / planar_params.delta)
    level, y0 = reduce_to_level_set(planar_params, state)
    return level, y0


class TestPlanarParams:
    """Test parameter validation."""

    def test_delta(self, planar_params):
        """delta_i = (m_i r^2 + I_i) / (4 r^2)."""
        np.testing.assert_allclose(planar_params.ball_deltas, [0.35, 0.35, 0.35])
        assert planar_params.delta == pytest.approx(1.05)

    def test_mismatched_balls(self):
        """Masses and inertias must pair up."""
        with pytest.raises(ValidationError):
            PlanarParams(m=1.0, I=1.0, r=0.5, masses=[1.0, 1.0], inertias=[0.1])

    def test_state_off_region(self, planar_params):
        """delta M <= |N|^2 is rejected."""
        state = PlanarState(vx=0.0, vy=0.0, vphi=1.0, N1=1.0, N2=0.0, M=0.5)
        with pytest.raises(StateError):
            state.validate(planar_params)
        with pytest.raises(StateError):
            planar_field(planar_params, state)


class TestPlanarField:
    """Test the six-dimensional planar equations."""

    def test_equilibrium(self, planar_params):
        """v = 0 is an equilibrium for any admissible n."""
        state = PlanarState(vx=0.0, vy=0.0, vphi=0.0, N1=0.3, N2=-0.2, M=1.0)
        np.testing.assert_array_equal(planar_field(planar_params, state), np.zeros(6))

    def test_det_formula(self, planar_params, rng):
        """det bold_I = (m + delta)((m + delta) I + m M + f3)."""
        for _ in range(10):
            state = random_planar_state(planar_params, rng)
            assert planar_det(planar_params, state) == pytest.approx(
                np.linalg.det(inertia_matrix(planar_params, state)), rel=1e-12
            )

    def test_integrals_at_rest(self, planar_params):
        """With v = 0 only f3 survives."""
        state = PlanarState(vx=0.0, vy=0.0, vphi=0.0, N1=0.3, N2=0.4, M=1.0)
        f1, f2, f3, f4 = planar_integrals(planar_params, state)
        assert (f1, f2, f4) == (0.0, 0.0, 0.0)
        assert f3 == pytest.approx(1.05 - 0.25)

    def test_integrals_conserved_pointwise(self, planar_params, rng):
        """grad f_k . X vanishes for all four integrals."""
        for _ in range(20):
            state = random_planar_state(planar_params, rng)
            field = planar_field(planar_params, state)
            scale = 1.0 + np.linalg.norm(state.to_vector()) ** 3
            for gradient in integral_gradients(planar_params, state):
                assert abs(gradient @ field) < 1e-12 * scale

    def test_state_from_contacts(self, planar_params):
        """Symmetric contacts give N = 0 and M = sum delta_i |B_i|^2."""
        points = [(1.0, 0.0), (-0.5, math.sqrt(3) / 2), (-0.5, -math.sqrt(3) / 2)]
        state = planar_state_from_contacts(planar_params, (0.1, 0.2, 0.3), points)
        assert state.N1 == pytest.approx(0.0, abs=1e-15)
        assert state.N2 == pytest.approx(0.0, abs=1e-15)
        assert state.M == pytest.approx(1.05)
        assert state.vphi == 0.3
        with pytest.raises(StateError):
            planar_state_from_contacts(planar_params, (0.0, 0.0, 0.0), points[:2])

    def test_measure_density(self, planar_params, rng):
        """sqrt(det bold_I) is invariant while the flat measure is not."""
        moved = 0
        for _ in range(10):
            state = random_planar_state(planar_params, rng)
            scale = 1.0 + np.linalg.norm(state.to_vector()) ** 2
            assert abs(verify_planar_measure(planar_params, state)) < 1e-6 * scale
            if abs(verify_planar_measure(planar_params, state, weighted=False)) > 1e-4:
                moved += 1
        assert moved >= 8

    def test_full_integration_conserves(self, planar_params, rng):
        """f1..f4 drift below 1e-8 over t = 10."""
        state = random_planar_state(planar_params, rng)
        states = integrate_planar(planar_params, state, np.linspace(0.0, 10.0, 11))
        start = np.array(planar_integrals(planar_params, state))
        for s in states:
            np.testing.assert_allclose(planar_integrals(planar_params, s), start, rtol=1e-8, atol=1e-8)

    def test_integration_grid(self, planar_params, rng):
        """The output grid starts at 0 and is non-decreasing."""
        state = random_planar_state(planar_params, rng)
        with pytest.raises(UsageError):
            integrate_planar(planar_params, state, [1.0, 2.0])
        with pytest.raises(UsageError):
            integrate_planar(planar_params, state, [0.0, 2.0, 1.0])
        assert integrate_planar(planar_params, state, [0.0]) == [state]


class TestLevelSet:
    """Test the reduction to (v_phi, N1, N2)."""

    def test_reduced_field_matches_full(self, planar_params, rng):
        """The closed system reproduces the v_phi, N1, N2 rows of the full field."""
        for _ in range(10):
            state = random_planar_state(planar_params, rng)
            level, y = reduce_to_level_set(planar_params, state)
            np.testing.assert_allclose(
                level_set_field(level, y), planar_field(planar_params, state)[2:5], rtol=1e-10, atol=1e-12
            )

    def test_lift(self, planar_params, rng):
        """Lifting the reduced coordinates recovers the state."""
        state = random_planar_state(planar_params, rng)
        level, y = reduce_to_level_set(planar_params, state)
        np.testing.assert_allclose(lift_from_level_set(level, y).to_vector(), state.to_vector(), rtol=1e-12, atol=1e-12)

    def test_det_on_level_set(self, planar_params, rng):
        """det bold_I = d5 + c A^2 on the level set."""
        for _ in range(10):
            state = random_planar_state(planar_params, rng)
            level, _ = reduce_to_level_set(planar_params, state)
            assert planar_det(planar_params, state) == pytest.approx(level.d5 + level.c * state.A ** 2, rel=1e-12)

    def test_remark_integral_from_energy(self, planar_params, rng):
        """d6^2 = 2 (m + delta)^2 f4 - (m + delta)(d1^2 + d2^2)."""
        for _ in range(10):
            state = random_planar_state(planar_params, rng)
            level, _ = reduce_to_level_set(planar_params, state)
            a = planar_params.m + planar_params.delta
            f4 = planar_integrals(planar_params, state)[3]
            expected = 2 * a ** 2 * f4 - a * (level.d1 ** 2 + level.d2 ** 2)
            assert level.d6 ** 2 == pytest.approx(expected, rel=1e-10, abs=1e-12)
            assert remark_integral(level, state.vphi, state.A) == pytest.approx(level.d6 ** 2, rel=1e-12)

    def test_v_phi_of_A(self, planar_params, rng):
        """v_phi(A0) is the initial angular velocity."""
        state = random_planar_state(planar_params, rng)
        level, _ = reduce_to_level_set(planar_params, state)
        assert v_phi_of_A(level, state.A) == pytest.approx(state.vphi, rel=1e-12)

    def test_time_reversal(self, planar_params, rng):
        """Reversing the velocities flips d1, d2, d6, s and d7 and turns alpha by pi."""
        state = random_planar_state(planar_params, rng)
        reverse = PlanarState(vx=-state.vx, vy=-state.vy, vphi=-state.vphi, N1=state.N1, N2=state.N2, M=state.M)
        level, _ = reduce_to_level_set(planar_params, state)
        level_rev, _ = reduce_to_level_set(planar_params, reverse)
        for name in ("d1", "d2", "d6", "s", "d7"):
            assert getattr(level_rev, name) == pytest.approx(-getattr(level, name), rel=1e-12), name
        assert level_rev.d5 == pytest.approx(level.d5)
        assert level_rev.k == pytest.approx(level.k)
        assert abs(wrapped(level_rev.alpha - level.alpha - math.pi)) < 1e-12


class TestQuadrature:
    """Test the quadrature solution against direct integration."""

    def test_theta_of_A_at_start(self, planar_params, rng):
        """The branch given by cos(theta - alpha) recovers theta0."""
        state = random_bounded_state(planar_params, rng)
        level, _ = reduce_to_level_set(planar_params, state)
        branch = 1 if math.cos(state.theta - level.alpha) > 0 else -1
        assert abs(wrapped(theta_of_A(level, state.A, branch) - state.theta)) < 1e-10
        assert potential(level, state.A, state.theta) == pytest.approx(level.d7, rel=1e-12)

    def test_interval_endpoints(self, planar_params, rng):
        """|sin(theta - alpha)| = 1 at the turning points and A outside is rejected."""
        state = random_bounded_state(planar_params, rng)
        level, _ = reduce_to_level_set(planar_params, state)
        interval = admissible_interval(level, state.A)
        assert interval.bounded
        assert interval.A_lo < state.A < interval.A_hi
        assert abs(theta_argument(level, interval.A_lo)) == pytest.approx(1.0, abs=1e-8)
        assert abs(theta_argument(level, interval.A_hi)) == pytest.approx(1.0, abs=1e-8)
        with pytest.raises(InadmissibleAError) as exc_info:
            theta_of_A(level, interval.A_hi * 1.01)
        assert abs(exc_info.value.argument) > 1.0

    def test_theta_argument_needs_k(self, planar_params):
        """k = 0 leaves theta undetermined."""
        state = PlanarState(vx=0.0, vy=0.0, vphi=0.0, N1=0.3, N2=0.0, M=1.0)
        level, _ = reduce_to_level_set(planar_params, state)
        assert level.k == 0.0
        with pytest.raises(UsageError):
            theta_argument(level, 0.3)

    def test_bounded_matches_ode(self, planar_params, rng):
        """Quadrature and DOP853 agree over one period."""
        state = random_bounded_state(planar_params, rng)
        level, y0 = reduce_to_level_set(planar_params, state)
        period = oscillation_period(level, y0)
        times = np.linspace(0.0, period, 9)
        quad = quadrature_solution(level, y0, times)
        ode = ode_solution(level, y0, times)
        assert quad.method == "quadrature"
        np.testing.assert_allclose(quad.A, ode.A, atol=1e-6)
        assert np.max(np.abs(wrapped(quad.theta - ode.theta))) < 1e-6
        np.testing.assert_allclose(quad.v_phi, ode.v_phi, atol=1e-6)
        assert quad.A[-1] == pytest.approx(state.A, abs=1e-6)

    def test_gap_quotient(self, planar_params, rng):
        """-q(A) / (A - A_end) away from the ends, -q'(A_end) at them."""
        state = random_bounded_state(planar_params, rng)
        level, _ = reduce_to_level_set(planar_params, state)
        interval = admissible_interval(level, state.A)

        def minus_q(A):
            return (level.k * A) ** 2 - (level.d7 - level.s * math.sqrt(level.d5 + level.c * A * A)) ** 2

        A = 0.5 * (interval.A_lo + interval.A_hi)
        for end in (interval.A_lo, interval.A_hi):
            assert gap_quotient(level, A, end) * (A - end) == pytest.approx(minus_q(A), rel=1e-8)
        h = 1e-6 * interval.A_lo
        slope_lo = (minus_q(interval.A_lo + h) - minus_q(interval.A_lo - h)) / (2 * h)
        assert gap_quotient(level, interval.A_lo, interval.A_lo) == pytest.approx(slope_lo, rel=1e-5)
        assert gap_quotient(level, interval.A_lo, interval.A_lo) > 0
        assert gap_quotient(level, interval.A_hi, interval.A_hi) < 0

    def test_bounded_over_many_seeds(self, planar_params):
        """Turning-point roundoff never breaks the quadrature on generic level sets."""
        for seed in range(24):
            state = random_bounded_state(planar_params, np.random.default_rng(seed))
            level, y0 = reduce_to_level_set(planar_params, state)
            period = oscillation_period(level, y0)
            assert period > 0
            times = np.linspace(0.0, period, 9)
            quad = quadrature_solution(level, y0, times)
            ode = ode_solution(level, y0, times)
            np.testing.assert_allclose(quad.A, ode.A, atol=1e-6, err_msg=f"seed {seed}")
            assert np.max(np.abs(wrapped(quad.theta - ode.theta))) < 1e-6, seed

    def test_remark_integral_along_paths(self, planar_params, rng):
        """c v_phi^2 A^2 + d5 v_phi^2 stays at d6^2 on both solutions."""
        state = random_bounded_state(planar_params, rng)
        level, y0 = reduce_to_level_set(planar_params, state)
        times = np.linspace(0.0, 3.0, 7)
        for trajectory in (quadrature_solution(level, y0, times), ode_solution(level, y0, times)):
            values = [remark_integral(level, v, a) for v, a in zip(trajectory.v_phi, trajectory.A)]
            np.testing.assert_allclose(values, level.d6 ** 2, rtol=1e-9)

    def test_potential_along_ode(self, planar_params, rng):
        """The one-form is closed: its potential stays at d7."""
        state = random_bounded_state(planar_params, rng)
        level, y0 = reduce_to_level_set(planar_params, state)
        ode = ode_solution(level, y0, np.linspace(0.0, 5.0, 11))
        values = [potential(level, a, th) for a, th in zip(ode.A, ode.theta)]
        np.testing.assert_allclose(values, level.d7, rtol=1e-9, atol=1e-9)

    def test_negative_times(self, planar_params, rng):
        """Running backwards equals running the reversed motion forwards."""
        state = random_bounded_state(planar_params, rng)
        reverse = PlanarState(vx=-state.vx, vy=-state.vy, vphi=-state.vphi, N1=state.N1, N2=state.N2, M=state.M)
        level, y0 = reduce_to_level_set(planar_params, state)
        level_rev, y0_rev = reduce_to_level_set(planar_params, reverse)
        back = quadrature_solution(level, y0, [-0.7, -1.9])
        forward = quadrature_solution(level_rev, y0_rev, [0.7, 1.9])
        np.testing.assert_allclose(back.A, forward.A, atol=1e-8)
        assert np.max(np.abs(wrapped(back.theta - forward.theta))) < 1e-8

    def test_polar_divergence(self, planar_params, rng):
        """A is an invariant density of the polar system."""
        state = random_bounded_state(planar_params, rng)
        level, _ = reduce_to_level_set(planar_params, state)
        for A, theta in ((state.A, state.theta), (1.3 * state.A, 0.4), (0.8 * state.A, -2.0)):
            assert abs(polar_divergence(level, A, theta)) < 1e-6

    def test_unbounded_motion(self, planar_params, unbounded_level):
        """A escapes after one turning point; quadrature still matches the ODE."""
        level, y0 = unbounded_level
        interval = admissible_interval(level, math.hypot(y0[1], y0[2]))
        assert not interval.bounded
        times = np.linspace(0.0, 4.0, 5)
        quad = quadrature_solution(level, y0, times)
        ode = ode_solution(level, y0, times)
        assert quad.method == "quadrature"
        np.testing.assert_allclose(quad.A, ode.A, atol=1e-6)
        assert np.max(np.abs(wrapped(quad.theta - ode.theta))) < 1e-6
        with pytest.raises(UsageError):
            oscillation_period(level, y0)

    def test_k_zero_falls_back_to_ode(self):
        """Zero momenta make A constant; the ODE path is used."""
        params = PlanarParams(m=2.0, I=1.0, r=0.5, masses=[1.0], inertias=[1.75])
        assert params.delta == 2.0
        N1, N2, vphi = 0.5, -0.25, 0.75
        state = PlanarState(vx=vphi * N2 / 4, vy=-vphi * N1 / 4, vphi=vphi, N1=N1, N2=N2, M=1.0)
        level, y0 = reduce_to_level_set(params, state)
        assert level.k == 0.0
        trajectory = quadrature_solution(level, y0, np.linspace(0.0, 2.0, 5))
        assert trajectory.method == "ode"
        np.testing.assert_allclose(trajectory.A, math.hypot(N1, N2), rtol=1e-10)


@pytest.mark.slow
class TestQuadratureAcceptance:
    """Quadrature against direct integration on many level sets."""

    def test_random_level_sets(self, planar_params):
        """Ten bounded level sets, one period each, agree to 1e-6."""
        rng = np.random.default_rng(2024)
        for _ in range(10):
            state = random_bounded_state(planar_params, rng)
            level, y0 = reduce_to_level_set(planar_params, state)
            times = np.linspace(0.0, oscillation_period(level, y0), 17)
            quad = quadrature_solution(level, y0, times)
            ode = ode_solution(level, y0, times)
            np.testing.assert_allclose(quad.A, ode.A, atol=1e-6)
            assert np.max(np.abs(wrapped(quad.theta - ode.theta))) < 1e-6

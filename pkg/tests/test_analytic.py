"""Analytic step-response tests: poles, ramp algebra, dual-route agreement.

The exact-rational oracles are frozen from an independent evaluation of the
backlog quadratic q_n = T[(n+1)(lam-sc) - nK(sc-r) - n(n+1)/2 KI(sc-r)].
"""

import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from foqsim.analytic import (
    StepScenario,
    initial_period,
    is_stable,
    multiflow_initial_rate,
    poles,
    queue_at,
    queue_trajectory,
    step_response_closed_form,
    step_response_recurrence,
)

# lam = 2, r_opt = 0.9, sc = 1, K = 0, KI = 0.5, T = 1
FLOAT_CASE = StepScenario(arrival_rate=2.0, desired_rate=0.9,
                          fabric_capacity=1.0, gain_p=0.0, gain_i=0.5,
                          interval=1.0)
EXACT_CASE = StepScenario(arrival_rate=Fraction(2), desired_rate=Fraction(9, 10),
                          fabric_capacity=Fraction(1), gain_p=Fraction(0),
                          gain_i=Fraction(1, 2), interval=Fraction(1))


class TestPoles:
    def test_integral_only(self):
        assert poles(0.0, 0.5) == (0.5, 0.0)

    def test_mixed_gains(self):
        z1, z2 = poles(0.5, 0.5)
        assert z1 == pytest.approx(0.7071067811865476, abs=1e-15)
        assert z2 == pytest.approx(-0.7071067811865476, abs=1e-15)

    def test_deadbeat(self):
        # K = 0, KI = 1 puts both poles at the origin
        z1, z2 = poles(0.0, 1.0)
        assert z1 == 0.0 and z2 == 0.0

    def test_ordering(self):
        for k in (0.0, 0.2, 0.5, 0.9):
            for ki in (0.1, 0.5, 1.0, 1.9):
                z1, z2 = poles(k, ki)
                assert abs(z1) >= abs(z2)

    def test_negative_gain_rejected(self):
        with pytest.raises(ValueError):
            poles(-0.1, 0.5)

    @given(st.floats(0.0, 0.95), st.floats(0.01, 3.0))
    def test_vieta_identities(self, k, ki):
        # z1 z2 = -K and z1 + z2 = 1 - K - KI
        z1, z2 = poles(k, ki)
        assert abs(z1 * z2 + k) <= 1e-12
        assert abs(z1 + z2 - (1.0 - k - ki)) <= 1e-12


class TestStability:
    def test_region_boundary(self):
        assert is_stable(0.0, 0.5)
        assert not is_stable(0.0, 0.0)
        assert not is_stable(0.0, 2.0)       # KI = 2(1 - K) exactly
        assert not is_stable(0.5, 1.0)
        assert is_stable(0.5, 0.999)
        assert not is_stable(0.0, -0.1)

    @given(st.floats(0.0, 0.99), st.floats(0.001, 0.999))
    def test_interior_poles_inside_unit_circle(self, k, frac):
        ki = frac * 2.0 * (1.0 - k)
        z1, z2 = poles(k, ki)
        assert is_stable(k, ki)
        assert abs(z1) < 1.0 and abs(z2) < 1.0


class TestRampAlgebra:
    def test_exact_backlog_values(self):
        # frozen: q_39 = 1, q_40 = 0 exactly, peak 21/2 at n = 19 and 20
        assert queue_at(EXACT_CASE, 39) == Fraction(1)
        assert queue_at(EXACT_CASE, 40) == Fraction(0)
        assert queue_at(EXACT_CASE, 19) == Fraction(21, 2)
        assert queue_at(EXACT_CASE, 20) == Fraction(21, 2)

    def test_exact_initial_period(self):
        n0, s_n0, peak = initial_period(EXACT_CASE)
        assert n0 == 41
        assert s_n0 == Fraction(41, 20)
        assert peak == Fraction(21, 2)

    def test_float_initial_period_shifts_one(self):
        # 1.0 - 0.9 rounds below 1/10, so q_40 lands at +7.1e-15 instead of 0
        # and the float route exits one interval later than the exact one
        n0, _, _ = initial_period(FLOAT_CASE)
        assert n0 == 42
        assert queue_at(FLOAT_CASE, 40) == pytest.approx(0.0, abs=1e-13)
        assert queue_at(FLOAT_CASE, 40) > 0.0

    def test_no_saturation(self):
        calm = StepScenario(arrival_rate=0.8, desired_rate=0.5,
                            fabric_capacity=1.0)
        assert initial_period(calm) == (0, 0.0, 0.0)

    def test_trajectory_matches_pointwise(self):
        traj = queue_trajectory(FLOAT_CASE, 10)
        assert traj == [queue_at(FLOAT_CASE, n) for n in range(10)]

    def test_scenario_validation(self):
        with pytest.raises(ValueError):
            StepScenario(arrival_rate=0.0, desired_rate=0.5, fabric_capacity=1.0)
        with pytest.raises(ValueError):
            StepScenario(arrival_rate=2.0, desired_rate=1.0, fabric_capacity=1.0)
        with pytest.raises(ValueError):
            StepScenario(arrival_rate=2.0, desired_rate=0.5,
                         fabric_capacity=1.0, interval=0.0)


class TestClosedForm:
    def test_ramp_values(self):
        # rho_n = (K + (n+1) KI)(sc - r_opt) while saturated
        resp = step_response_closed_form(FLOAT_CASE, 50)
        assert resp.drop_sequence[0] == pytest.approx(0.05, rel=1e-12)
        assert resp.drop_sequence[1] == pytest.approx(0.10, rel=1e-12)
        assert resp.drop_sequence[2] == pytest.approx(0.15, rel=1e-12)
        assert resp.n0 == 42
        assert len(resp.queue_sequence) == resp.n0

    def test_converges_to_rate_gap(self):
        # the drop rate must settle at lam - r_opt = 1.1
        resp = step_response_closed_form(FLOAT_CASE, 400)
        assert resp.drop_sequence[-1] == pytest.approx(1.1, rel=1e-9)
        assert resp.rate_gap == pytest.approx(1.1, rel=1e-12)

    def test_unstable_gains_rejected(self):
        bad = StepScenario(arrival_rate=2.0, desired_rate=0.9,
                           fabric_capacity=1.0, gain_p=0.0, gain_i=2.5)
        with pytest.raises(ValueError, match="stability region"):
            step_response_closed_form(bad, 10)

    def test_deadbeat_settles_in_one_interval(self):
        scen = StepScenario(arrival_rate=1.5, desired_rate=0.9,
                            fabric_capacity=1.0, gain_p=0.0, gain_i=1.0)
        resp = step_response_closed_form(scen, 30)
        # after the ramp handoff the repeated pole at 0 gives rho = D exactly
        for n in range(resp.n0 + 1, 30):
            assert resp.drop_sequence[n] == pytest.approx(0.6, rel=1e-12)

    def test_matches_recurrence(self):
        # dual-route agreement at one gain pair; the acceptance suite sweeps
        # the whole grid
        for scen in (FLOAT_CASE,
                     StepScenario(arrival_rate=1.5, desired_rate=0.7,
                                  fabric_capacity=1.0, gain_p=0.3,
                                  gain_i=0.6)):
            closed = step_response_closed_form(scen, 200)
            rec = step_response_recurrence(scen, 200)
            scale = abs(scen.arrival_rate - scen.desired_rate)
            for n in range(closed.n0 + 1, 200):
                dev = abs(closed.drop_sequence[n] - rec[n])
                assert dev / max(abs(rec[n]), scale) < 1e-9

    def test_unsaturated_step(self):
        # lam below capacity: no ramp, pure closed loop from n = 0
        scen = StepScenario(arrival_rate=0.95, desired_rate=0.5,
                            fabric_capacity=1.0, gain_p=0.0, gain_i=0.5)
        closed = step_response_closed_form(scen, 100)
        rec = step_response_recurrence(scen, 100)
        assert closed.n0 == 0
        assert closed.drop_sequence[-1] == pytest.approx(0.45, rel=1e-9)
        for n in range(1, 100):
            assert closed.drop_sequence[n] == pytest.approx(rec[n], rel=1e-9)


class TestRecurrence:
    def test_diverges_outside_region(self):
        bad = StepScenario(arrival_rate=2.0, desired_rate=0.9,
                           fabric_capacity=1.0, gain_p=0.0, gain_i=2.1)
        seq = step_response_recurrence(bad, 2000)
        assert max(abs(x) for x in seq) > 1e6

    def test_bounded_inside_region(self):
        seq = step_response_recurrence(FLOAT_CASE, 5000)
        assert max(abs(x) for x in seq) < 10.0


class TestMultiflow:
    def test_proportional_split_under_saturation(self):
        assert multiflow_initial_rate(1.0, 1.0, 1.28) == 0.64

    def test_uncontended_passthrough(self):
        assert multiflow_initial_rate(0.3, 0.2, 1.28) == 0.3

    def test_no_traffic_rejected(self):
        with pytest.raises(ValueError):
            multiflow_initial_rate(0.0, 0.0, 1.28)

#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
   Tests of reference evaluation, the geometric controller and allocation.
   Copyright 2024 The quadlcd developers. All rights reserved.
   Use is subject to license terms supplied in LICENSE.txt
"""

import numpy as np
import pytest
from numpy.polynomial import polynomial as P
from numpy.testing import assert_allclose
from scipy.spatial.transform import Rotation

from quadlcd.util.errors import FlatnessSingularity, InvalidOverride, \
    OutOfDomain
from quadlcd.util.flatness_control import ControlGains, FlatReference, \
    allocate, attitude_error, commanded_reference, control_step, \
    eval_reference, flat_to_attitude, hover_reference, make_gains, \
    se3_control
from quadlcd.util.minsnap import PiecewiseTrajectory, WaypointSet, \
    coefficient_index, solve_minsnap
from quadlcd.util.quad_dynamics import E3, WrenchCommand, hat, \
    hover_state, make_params, rotor_wrench, step, without_noise
from quadlcd.util.rollout_utils import run_closed_loop


@pytest.fixture
def params():
    return without_noise(make_params())


@pytest.fixture
def gains():
    return make_gains()


def gentle_trajectory():
    wps = WaypointSet(np.array([[0.0, 0.0, 0.0],
                                [0.8, 0.0, 0.0],
                                [0.8, 0.6, -0.3],
                                [0.4, 1.0, -0.5]]))
    return solve_minsnap(wps, 0.5)


class TestEvalReference(object):

    def test_monomial_derivatives(self):
        c = np.zeros(32)
        c[coefficient_index(0, 0, 3)] = 1.0
        ref = eval_reference(PiecewiseTrajectory(7, [2.0], c), 1.0)
        assert_allclose([ref.position[0], ref.velocity[0],
                         ref.acceleration[0], ref.jerk[0], ref.snap[0]],
                        [1.0, 3.0, 6.0, 6.0, 0.0])

    def test_start_is_first_waypoint_at_rest(self):
        traj = gentle_trajectory()
        ref = eval_reference(traj, 0.0)
        assert_allclose(ref.position, 0.0, atol=1e-12)
        for d in (ref.velocity, ref.acceleration, ref.jerk):
            assert_allclose(d, 0.0, atol=1e-9)

    def test_right_segment_is_used(self):
        rng = np.random.default_rng(3)
        traj = PiecewiseTrajectory(7, [1.0, 1.0], rng.normal(size=64))
        ref = eval_reference(traj, 1.5)
        second = traj.segment_coefficients(1)
        assert ref.position[1] == pytest.approx(
            P.polyval(0.5, second[1]), rel=1e-12)
        assert ref.yaw_rate == pytest.approx(
            P.polyval(0.5, P.polyder(second[3])), rel=1e-12)
        end = eval_reference(traj, 2.0)
        assert end.position[0] == pytest.approx(P.polyval(1.0, second[0]))

    @pytest.mark.parametrize("t", [-0.1, 2.1, float("nan")])
    def test_out_of_domain(self, t):
        traj = PiecewiseTrajectory(7, [1.0, 1.0], np.zeros(64))
        with pytest.raises(OutOfDomain):
            eval_reference(traj, t)


class TestFlatToAttitude(object):

    def test_hover(self, params):
        att = flat_to_attitude(hover_reference([1.0, 2.0, -3.0]), params)
        assert_allclose(att.rotation, np.eye(3), atol=1e-15)
        assert_allclose(att.angular_velocity, 0.0, atol=1e-15)
        assert_allclose(att.angular_acceleration, 0.0, atol=1e-9)

    def test_yaw_quarter_turn(self, params):
        att = flat_to_attitude(hover_reference(np.zeros(3), np.pi / 2),
                               params)
        assert_allclose(att.rotation,
                        [[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]],
                        atol=1e-15)

    def test_yaw_rate_maps_to_body_z(self, params):
        ref = hover_reference(np.zeros(3))
        ref.yaw_rate = 0.7
        att = flat_to_attitude(ref, params)
        assert_allclose(att.angular_velocity, [0.0, 0.0, 0.7], atol=1e-12)

    def test_free_fall_is_singular(self, params):
        ref = hover_reference(np.zeros(3))
        ref.acceleration = params.gravity * E3
        with pytest.raises(FlatnessSingularity):
            flat_to_attitude(ref, params)

    def test_rates_match_rotation_derivative(self, params):
        traj = gentle_trajectory()
        h = 1e-5
        for t in np.linspace(0.2, traj.total_duration - 0.2, 7):
            att = flat_to_attitude(eval_reference(traj, t), params)
            assert_allclose(att.rotation.T @ att.rotation, np.eye(3),
                            atol=1e-12)
            plus = flat_to_attitude(eval_reference(traj, t + h), params)
            minus = flat_to_attitude(eval_reference(traj, t - h), params)
            rdot = (plus.rotation - minus.rotation) / (2.0 * h)
            omega = att.rotation.T @ rdot
            assert_allclose(att.angular_velocity,
                            [omega[2, 1], omega[0, 2], omega[1, 0]],
                            atol=1e-6)
            wdot = (plus.angular_velocity - minus.angular_velocity) / (2 * h)
            assert_allclose(att.angular_acceleration, wdot, atol=1e-4)


class TestSe3Control(object):

    def test_on_reference_hover(self, params, gains):
        ref = hover_reference([0.5, 0.5, -1.0])
        state = hover_state(ref.position, params)
        cmd = se3_control(state, ref, flat_to_attitude(ref, params), gains,
                          params)
        assert cmd.thrust == pytest.approx(params.mass * params.gravity)
        assert_allclose(cmd.moment, 0.0, atol=1e-15)

    def test_position_offset_keeps_hover_thrust(self, params, gains):
        ref = hover_reference(np.zeros(3))
        state = hover_state([0.1, 0.0, 0.0], params)
        cmd = se3_control(state, ref, flat_to_attitude(ref, params), gains,
                          params)
        assert cmd.thrust == pytest.approx(params.mass * params.gravity)
        assert_allclose(cmd.moment, 0.0, atol=1e-15)

    def test_antipodal_yaw_gives_no_moment(self, params, gains):
        ref = hover_reference(np.zeros(3))
        state = hover_state(np.zeros(3), params)
        state.rotation = np.diag([-1.0, -1.0, 1.0])
        assert_allclose(attitude_error(state.rotation, np.eye(3)), 0.0,
                        atol=1e-15)
        cmd = se3_control(state, ref, flat_to_attitude(ref, params), gains,
                          params)
        assert_allclose(cmd.moment, 0.0, atol=1e-15)

    def test_attitude_error_source_is_antisymmetric(self):
        rots = Rotation.random(20, random_state=5).as_matrix()
        for r, rd in zip(rots[:10], rots[10:]):
            m = rd.T @ r - r.T @ rd
            assert_allclose(m, -m.T, atol=1e-12)
            assert_allclose(hat(attitude_error(r, rd)), 0.5 * m, atol=1e-12)

    def test_translation_equivariance(self, params, gains):
        rng = np.random.default_rng(11)
        traj = gentle_trajectory()
        ref = eval_reference(traj, 1.3)
        state = hover_state(ref.position + rng.normal(0, 0.05, 3), params)
        state.velocity = rng.normal(0, 0.2, 3)
        state.rotation = Rotation.from_rotvec(
            rng.normal(0, 0.1, 3)).as_matrix()
        state.angular_velocity = rng.normal(0, 0.5, 3)

        def wrench(offset):
            moved = hover_state(state.position + offset, params)
            moved.velocity = state.velocity
            moved.rotation = state.rotation
            moved.angular_velocity = state.angular_velocity
            shifted = FlatReference(ref.t, ref.position + offset,
                                    ref.velocity, ref.acceleration, ref.jerk,
                                    ref.snap, ref.yaw, ref.yaw_rate,
                                    ref.yaw_acc)
            att = flat_to_attitude(
                commanded_reference(moved, shifted, gains, params), params)
            return se3_control(moved, shifted, att, gains, params)

        base = wrench(np.zeros(3))
        moved = wrench(np.array([3.0, -7.0, 2.5]))
        assert moved.thrust == pytest.approx(base.thrust, abs=1e-12)
        assert_allclose(moved.moment, base.moment, atol=1e-12)

    def test_gains_must_be_positive(self):
        with pytest.raises(InvalidOverride):
            ControlGains(0.195, 0.0, 7.8e-3, 6.7e-4)


class TestAllocate(object):

    def test_hover(self, params):
        speeds, saturated = allocate(
            WrenchCommand(params.mass * params.gravity, np.zeros(3)), params)
        assert_allclose(speeds, params.hover_speed, rtol=1e-12)
        assert not saturated

    def test_excess_thrust_saturates(self, params):
        speeds, saturated = allocate(
            WrenchCommand(10 * params.mass * params.gravity, np.zeros(3)),
            params)
        assert_allclose(speeds, params.rotor_speed_max)
        assert saturated

    def test_negative_thrust_clamps(self, params):
        speeds, saturated = allocate(WrenchCommand(-1.0, np.zeros(3)),
                                     params)
        assert_allclose(speeds, params.rotor_speed_min)
        assert saturated

    def test_inverts_rotor_wrench(self, params):
        rng = np.random.default_rng(2)
        for _ in range(50):
            w = rng.uniform(300.0, 0.99 * params.rotor_speed_max, 4)
            speeds, saturated = allocate(rotor_wrench(w, params), params)
            assert not saturated
            assert_allclose(speeds, w, rtol=1e-9)


class TestClosedLoop(object):

    @pytest.mark.parametrize("offset", [[0.05, 0.0, 0.0], [0.0, 0.0, 0.05],
                                        [0.03, -0.03, 0.0283]])
    def test_hover_regulation(self, params, gains, offset):
        ref = hover_reference([1.0, 1.0, -1.0])
        state = hover_state(ref.position + np.array(offset), params)
        rng = np.random.default_rng(0)
        for _ in range(500):
            speeds, _ = control_step(state, ref, gains, params)
            state = step(state, speeds, params, 0.01, rng, 5)
        assert np.linalg.norm(state.position - ref.position) < 1e-3

    def test_gentle_tracking(self, params, gains):
        result = run_closed_loop(gentle_trajectory(), params, gains,
                                 np.random.default_rng(0))
        assert result.max_error < 0.05
        assert not result.crashed
        assert result.sat_fraction == 0.0

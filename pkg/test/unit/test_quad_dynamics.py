#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
   Tests of the rigid-body quadrotor simulator and the preset layer.
   Copyright 2024 The quadlcd developers. All rights reserved.
   Use is subject to license terms supplied in LICENSE.txt
"""

import os

import numpy as np
import pytest
from numpy.testing import assert_allclose

from quadlcd.util.errors import InvalidOverride, NonFiniteState, \
    UnknownPreset
from quadlcd.util.quad_dynamics import PRESET_DIR, QuadState, derivative, \
    hat, hover_state, make_params, parse_overrides, rotor_wrench, step, \
    vee, with_drag, without_noise


@pytest.fixture
def params():
    return without_noise(make_params())


class TestGeometry(object):

    def test_hat_is_cross_product(self):
        w = np.array([0.3, -1.2, 2.0])
        u = np.array([-0.7, 0.1, 0.4])
        assert_allclose(hat(w) @ u, np.cross(w, u))
        assert_allclose(vee(hat(w)), w)


class TestRotorWrench(object):

    def test_hover_speed_balances_weight(self, params):
        cmd = rotor_wrench(np.full(4, params.hover_speed), params)
        assert cmd.thrust == pytest.approx(params.mass * params.gravity)
        assert_allclose(cmd.moment, 0.0, atol=1e-15)

    def test_front_rotors_pitch_and_left_rotors_roll(self, params):
        w = params.hover_speed
        # rotors 1 and 2 sit at +y
        roll = rotor_wrench([1.1 * w, 1.1 * w, w, w], params)
        assert roll.moment[0] < 0
        # rotors 1 and 4 sit at +x
        pitch = rotor_wrench([1.1 * w, w, w, 1.1 * w], params)
        assert pitch.moment[1] > 0
        # rotors 1 and 3 spin positively
        yaw = rotor_wrench([1.1 * w, w, 1.1 * w, w], params)
        assert yaw.moment[2] > 0
        assert_allclose(yaw.moment[:2], 0.0, atol=1e-15)


class TestStep(object):

    def test_hover_is_an_equilibrium(self, params):
        state = hover_state([1.0, 2.0, -3.0], params)
        rng = np.random.default_rng(0)
        for _ in range(100):
            state = step(state, np.full(4, params.hover_speed), params,
                         0.01, rng, 5)
        assert_allclose(state.position, [1.0, 2.0, -3.0], atol=1e-9)
        assert_allclose(state.velocity, 0.0, atol=1e-9)
        assert_allclose(state.rotation, np.eye(3), atol=1e-12)

    def test_free_fall_follows_gravity(self, params):
        params = with_drag(params, [0.0, 0.0, 0.0])
        state = QuadState(np.zeros(3), np.zeros(3), np.eye(3), np.zeros(3),
                          np.zeros(4))
        rng = np.random.default_rng(0)
        for _ in range(50):
            state = step(state, np.zeros(4), params, 0.01, rng)
        # z points down
        assert state.position[2] == pytest.approx(
            0.5 * params.gravity * 0.5 ** 2, rel=1e-9)
        assert_allclose(state.position[:2], 0.0, atol=1e-12)

    def test_drag_opposes_velocity(self, params):
        state = hover_state(np.zeros(3), params)
        state.velocity = np.array([2.0, 0.0, 0.0])
        acc = derivative(state, params).velocity
        assert acc[0] == pytest.approx(-params.drag[0] * 2.0 / params.mass)

    def test_derivative_fields(self, params):
        state = hover_state(np.zeros(3), params)
        state.velocity = np.array([0.5, -1.0, 0.2])
        state.angular_velocity = np.array([1.0, 2.0, 3.0])
        rates = derivative(state, params)
        assert_allclose(rates.position, state.velocity)
        jw = params.inertia * state.angular_velocity
        assert_allclose(rates.angular_velocity,
                        -np.cross(state.angular_velocity, jw)
                        / params.inertia, atol=1e-9)
        assert_allclose(rates.rotation, hat(state.angular_velocity))

    def test_rotor_lag_is_first_order(self, params):
        state = hover_state(np.zeros(3), params)
        state.rotor_speeds = np.full(4, 1000.0)
        tau = params.motor_time_constant
        state = step(state, np.full(4, 2000.0), params, tau,
                     np.random.default_rng(0), 50)
        assert_allclose(state.rotor_speeds, 2000.0 - 1000.0 * np.exp(-1.0),
                        rtol=1e-6)

    def test_commands_saturate(self, params):
        state = hover_state(np.zeros(3), params)
        for _ in range(10):
            state = step(state, np.full(4, 1e5), params, 0.01,
                         np.random.default_rng(0), 5)
        assert np.all(state.rotor_speeds <= params.rotor_speed_max)
        assert_allclose(state.rotor_speeds, params.rotor_speed_max,
                        rtol=1e-6)

    def test_rotation_stays_orthonormal(self, params):
        state = hover_state(np.zeros(3), params)
        state.angular_velocity = np.array([8.0, -5.0, 3.0])
        w = params.hover_speed
        rng = np.random.default_rng(1)
        for _ in range(200):
            state = step(state, [1.05 * w, 0.97 * w, w, 1.01 * w], params,
                         0.01, rng, 5)
        rot = state.rotation
        assert_allclose(rot.T @ rot, np.eye(3), atol=1e-12)
        assert np.linalg.det(rot) == pytest.approx(1.0, abs=1e-12)

    def test_fourth_order_step(self, params):
        state = hover_state([0.0, 0.0, -1.0], params, yaw=0.3)
        state.velocity = np.array([1.0, -0.5, 0.3])
        state.angular_velocity = np.array([8.0, -6.0, 5.0])
        w = params.hover_speed
        cmd = np.array([1.04 * w, 0.98 * w, 1.01 * w, 0.97 * w])
        state.rotor_speeds = cmd.copy()

        def one_step_error(dt):
            rng = np.random.default_rng(0)
            coarse = step(state, cmd, params, dt, rng).as_vector()
            fine = step(state, cmd, params, dt, rng, 100).as_vector()
            return np.max(np.abs(coarse - fine))

        ratio = one_step_error(2e-2) / one_step_error(1e-2)
        # fourth order: between 2^4 and 2^5 per halving
        assert 12.0 < ratio < 40.0

    def test_noise_is_seeded(self):
        noisy = make_params()
        runs = []
        for _ in range(2):
            state = hover_state(np.zeros(3), noisy)
            rng = np.random.default_rng(42)
            for _ in range(20):
                state = step(state, np.full(4, noisy.hover_speed), noisy,
                             0.01, rng, 5)
            runs.append(state.as_vector())
        assert np.array_equal(runs[0], runs[1])
        assert not np.allclose(runs[0][18:22], noisy.hover_speed)

    def test_non_finite_state_raises(self, params):
        state = hover_state(np.zeros(3), params)
        state.velocity = np.array([np.nan, 0.0, 0.0])
        with pytest.raises(NonFiniteState):
            step(state, np.full(4, params.hover_speed), params, 0.01,
                 np.random.default_rng(0))

    def test_bad_time_step(self, params):
        with pytest.raises(ValueError):
            step(hover_state(np.zeros(3), params), np.zeros(4), params, 0.0,
                 np.random.default_rng(0))


class TestPresets(object):

    def test_default_preset(self):
        params = make_params()
        assert params.mass == pytest.approx(0.030)
        assert_allclose(params.drag, [0.005, 0.005, 0.010])
        assert params.motor_time_constant == pytest.approx(0.005)
        assert params.motor_noise_std == pytest.approx(100.0)
        max_thrust = 4 * params.k_f * params.rotor_speed_max ** 2
        assert max_thrust / (params.mass * params.gravity) == \
            pytest.approx(1.45, abs=0.02)

    def test_component_overrides(self):
        params = make_params(overrides=parse_overrides(
            ["d_x=0.004", "J_zz=3e-5", "sigma_m=0"]))
        assert_allclose(params.drag, [0.004, 0.005, 0.010])
        assert params.inertia[2] == pytest.approx(3e-5)
        assert params.motor_noise_std == 0.0

    def test_params_file(self, tmp_path):
        path = tmp_path / "heavy.params"
        with open(os.path.join(PRESET_DIR, "crazyflie-default.params")) as f:
            text = f.read()
        path.write_text(text.replace("mass = 0.030", "mass = 0.040"))
        assert make_params(path=str(path)).mass == pytest.approx(0.040)

    @pytest.mark.parametrize("override", [
        "mass=-1", "drag=0.1,0.1", "wingspan=2", "d_x=fast"])
    def test_invalid_overrides(self, override):
        with pytest.raises(InvalidOverride):
            make_params(overrides=parse_overrides([override]))

    def test_override_needs_equals(self):
        with pytest.raises(InvalidOverride):
            parse_overrides(["mass"])

    def test_unknown_preset(self):
        with pytest.raises(UnknownPreset):
            make_params("hummingbird")

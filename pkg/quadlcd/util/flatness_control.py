#!/usr/bin/env python
# -*- coding: utf-8 -*-

# -----------------------------------------------------------------------------
#   Copyright (C) 2024 The quadlcd developers. All rights reserved.

#   This program is free software; you can redistribute it and/or modify
#   it under the terms of the GNU General Public License as published by
#   the Free Software Foundation; either version 2 of the License, or
#   (at your option) any later version.
#   This program is distributed in the hope that it will be useful,
#   but WITHOUT ANY WARRANTY; without even the implied warranty of
#   MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
#   GNU General Public License for more details.
# ------------------------------------------------------------------------------

"""
Flat-output references, the fixed SE(3) geometric tracking controller and
the thrust / moment to rotor-speed allocation.

The world frame is z-down (see quad_dynamics). The thrust law is the usual
geometric-control expression written in that frame:

    f = (k_x e_x + k_v e_v + m g z_W - m r''_d) . R z_W

i.e. the z-up expression with z_W standing in for the upward unit vector.
"""

import logging
from dataclasses import dataclass, replace

import numpy as np
from numpy.polynomial import polynomial as P

from quadlcd.util.errors import FlatnessSingularity, InvalidOverride, \
    OutOfDomain
from quadlcd.util.quad_dynamics import E3, WrenchCommand, \
    allocation_matrix, apply_overrides, hat, load_preset, vee, GAIN_KEYS

logger = logging.getLogger('quadlcd.flatness_control')

# step for the central difference of the desired body rates
OMEGA_DOT_STEP = 1e-3
SINGULAR_THRUST = 1e-6


@dataclass
class FlatReference:
    t: float
    position: np.ndarray
    velocity: np.ndarray
    acceleration: np.ndarray
    jerk: np.ndarray
    snap: np.ndarray
    yaw: float = 0.0
    yaw_rate: float = 0.0
    yaw_acc: float = 0.0


@dataclass
class ControlGains:
    k_x: float
    k_v: float
    k_R: float
    k_w: float

    def __post_init__(self):
        bad = [n for n in GAIN_KEYS if not getattr(self, n) > 0]
        if bad:
            raise InvalidOverride("gains must be > 0: %s" % ", ".join(bad))


@dataclass
class DesiredAttitude:
    rotation: np.ndarray
    angular_velocity: np.ndarray
    angular_acceleration: np.ndarray


def make_gains(preset="crazyflie-default", overrides=None, path=None):
    """Controller gains from the same preset file as the vehicle."""
    values = apply_overrides(load_preset(preset, path), overrides)
    missing = [k for k in GAIN_KEYS if k not in values]
    if missing:
        raise InvalidOverride("gains missing from preset: %s"
                              % ", ".join(missing))
    return ControlGains(*[values[k][0] for k in GAIN_KEYS])


def eval_reference(traj, t):
    """
    Flat reference of a piecewise trajectory at time t. On a knot the
    segment starting there is used, except at the final time.
    """
    total = traj.total_duration
    if not np.isfinite(t) or t < 0.0 or t > total:
        raise OutOfDomain("t=%s outside [0, %s]" % (t, total))
    starts = traj.segment_starts
    i = int(np.searchsorted(starts, t, side='right')) - 1
    i = min(max(i, 0), traj.segments - 1)
    tau = t - starts[i]
    coeffs = traj.segment_coefficients(i).T      # (n+1, 4)
    d = [P.polyval(tau, P.polyder(coeffs, k, axis=0)) for k in range(5)]
    return FlatReference(
        float(t), d[0][:3], d[1][:3], d[2][:3], d[3][:3], d[4][:3],
        float(d[0][3]), float(d[1][3]), float(d[2][3]))


def hover_reference(position, yaw=0.0, t=0.0):
    z = np.zeros(3)
    return FlatReference(t, np.array(position, dtype=float), z, z, z, z, yaw)


def _frame_and_rates(acceleration, jerk, yaw, yaw_rate, gravity):
    """R_d and omega_d from acceleration, jerk and yaw of the reference."""
    thrust_dir = gravity * E3 - acceleration
    norm = np.linalg.norm(thrust_dir)
    if norm < SINGULAR_THRUST:
        raise FlatnessSingularity(
            "desired acceleration cancels gravity (|g z_W - a| = %g)" % norm)
    b3 = thrust_dir / norm
    heading = np.array([np.cos(yaw), np.sin(yaw), 0.0])
    u = heading - heading.dot(b3) * b3
    u_norm = np.linalg.norm(u)
    if u_norm < SINGULAR_THRUST:
        raise FlatnessSingularity("heading is parallel to the thrust axis")
    b1 = u / u_norm
    b2 = np.cross(b3, b1)
    rotation = np.column_stack([b1, b2, b3])

    # f b3 = m (g z_W - a)  =>  b3' = -(jerk - (jerk.b3) b3) / norm
    w_y = -jerk.dot(b1) / norm
    w_x = jerk.dot(b2) / norm
    heading_dot = yaw_rate * np.array([-np.sin(yaw), np.cos(yaw), 0.0])
    w_z = (b2.dot(heading_dot) + heading.dot(b3) * w_x) / u_norm
    return rotation, np.array([w_x, w_y, w_z])


def _shifted(ref, h):
    a = ref.acceleration + h * ref.jerk + 0.5 * h * h * ref.snap
    j = ref.jerk + h * ref.snap
    yaw = ref.yaw + h * ref.yaw_rate + 0.5 * h * h * ref.yaw_acc
    yaw_rate = ref.yaw_rate + h * ref.yaw_acc
    return a, j, yaw, yaw_rate


def flat_to_attitude(ref, params):
    """
    Desired attitude and body rates from the flat reference. The angular
    acceleration is a central difference of omega_d along the reference,
    propagated from the snap and yaw acceleration.
    """
    g = params.gravity
    rotation, omega = _frame_and_rates(ref.acceleration, ref.jerk,
                                       ref.yaw, ref.yaw_rate, g)
    h = OMEGA_DOT_STEP
    try:
        _, omega_plus = _frame_and_rates(*_shifted(ref, h), g)
        _, omega_minus = _frame_and_rates(*_shifted(ref, -h), g)
        omega_dot = (omega_plus - omega_minus) / (2.0 * h)
    except FlatnessSingularity:
        omega_dot = np.zeros(3)
    return DesiredAttitude(rotation, omega, omega_dot)


def attitude_error(rotation, rotation_des):
    """e_R = 1/2 vee(R_d^T R - R^T R_d)."""
    return 0.5 * vee(rotation_des.T @ rotation - rotation.T @ rotation_des)


def se3_control(state, ref, att, gains, params):
    m = params.mass
    rot = state.rotation
    e_x = state.position - ref.position
    e_v = state.velocity - ref.velocity
    e_r = attitude_error(rot, att.rotation)
    rel = rot.T @ att.rotation
    w = state.angular_velocity
    e_w = w - rel @ att.angular_velocity

    force = gains.k_x * e_x + gains.k_v * e_v \
        + m * params.gravity * E3 - m * ref.acceleration
    thrust = float(force.dot(rot @ E3))

    jw = params.inertia * w
    moment = -gains.k_R * e_r - gains.k_w * e_w + np.cross(w, jw) \
        - params.inertia * (hat(w) @ rel @ att.angular_velocity
                            - rel @ att.angular_acceleration)
    return WrenchCommand(thrust, moment)


def allocate(cmd, params):
    """
    Rotor speeds realising a wrench. Per-rotor thrust below k_f * w_min^2
    is raised to that floor and speeds are clipped to the rotor range.

    :return: (rotor speeds, saturated flag)
    """
    thrusts = np.linalg.solve(allocation_matrix(params), cmd.as_vector())
    floor = params.k_f * params.rotor_speed_min ** 2
    saturated = bool(np.any(thrusts < floor))
    thrusts = np.maximum(thrusts, floor)
    speeds = np.sqrt(thrusts / params.k_f)
    saturated = saturated or bool(np.any(speeds > params.rotor_speed_max))
    speeds = np.clip(speeds, params.rotor_speed_min, params.rotor_speed_max)
    return speeds, saturated


def commanded_reference(state, ref, gains, params):
    """
    Reference whose acceleration includes the position and velocity
    feedback, a_d - (k_x e_x + k_v e_v) / m, so that R_d tilts the thrust
    toward the reference.
    """
    feedback = gains.k_x * (state.position - ref.position) \
        + gains.k_v * (state.velocity - ref.velocity)
    return replace(ref, acceleration=ref.acceleration - feedback / params.mass)


def control_step(state, ref, gains, params):
    """One controller tick: reference -> attitude -> wrench -> rotors."""
    att = flat_to_attitude(commanded_reference(state, ref, gains, params),
                           params)
    cmd = se3_control(state, ref, att, gains, params)
    return allocate(cmd, params)

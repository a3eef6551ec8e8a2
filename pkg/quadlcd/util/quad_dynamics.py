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
Rigid-body quadrotor simulation with parasitic drag, first-order motor
response, motor noise and rotor-speed saturation.

Frame convention: the world z axis z_W points along gravity, so
m * r'' = m * g * z_W - f * R * z_B - R * D * R^T * v. At hover R = I and
the collective thrust f balances m * g. Rotors sit in an "X" at body
(+d, +d), (-d, +d), (-d, -d), (+d, -d) with d = L / sqrt(2) and alternating
spin directions (+, -, +, -).
"""

import logging
import os
from dataclasses import dataclass, field, replace

import numpy as np

from quadlcd.util.errors import InvalidOverride, IoFailure, NonFiniteState, \
    ShapeCorruption, UnknownPreset

logger = logging.getLogger('quadlcd.quad_dynamics')

PRESET_DIR = os.path.join(os.path.dirname(__file__), "presets")
PRESETS = ("crazyflie-default",)

E3 = np.array([0.0, 0.0, 1.0])
SPIN = np.array([1.0, -1.0, 1.0, -1.0])
ROTOR_SIGNS = np.array([[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]])

# override aliases -> (preset key, component index or None)
ALIASES = {
    "d_x": ("drag", 0), "d_y": ("drag", 1), "d_z": ("drag", 2),
    "J_xx": ("inertia", 0), "J_yy": ("inertia", 1), "J_zz": ("inertia", 2),
    "m": ("mass", None), "g": ("gravity", None), "L": ("arm_length", None),
    "tau_m": ("motor_time_constant", None),
    "sigma_m": ("motor_noise_std", None),
    "omega_min": ("rotor_speed_min", None),
    "omega_max": ("rotor_speed_max", None),
}
VECTOR_KEYS = ("inertia", "drag")
GAIN_KEYS = ("k_x", "k_v", "k_R", "k_w")


def hat(w):
    """Skew-symmetric matrix such that hat(w) @ u == cross(w, u)."""
    return np.array([[0.0, -w[2], w[1]],
                     [w[2], 0.0, -w[0]],
                     [-w[1], w[0], 0.0]])


def vee(m):
    """Inverse of hat for a skew-symmetric matrix."""
    return np.array([m[2, 1], m[0, 2], m[1, 0]])


@dataclass
class QuadParams:
    """Vehicle parameters. Units are SI throughout."""

    mass: float
    inertia: np.ndarray
    gravity: float
    arm_length: float
    k_f: float
    k_m: float
    rotor_speed_min: float
    rotor_speed_max: float
    motor_time_constant: float
    motor_noise_std: float
    drag: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        self.inertia = np.asarray(self.inertia, dtype=float).reshape(3)
        self.drag = np.asarray(self.drag, dtype=float).reshape(3)
        self.validate()

    def validate(self):
        problems = []
        if not self.mass > 0:
            problems.append("mass must be > 0")
        if not np.all(self.inertia > 0):
            problems.append("inertia entries must be > 0")
        if not self.rotor_speed_max > self.rotor_speed_min >= 0:
            problems.append("need rotor_speed_max > rotor_speed_min >= 0")
        if not self.motor_time_constant > 0:
            problems.append("motor_time_constant must be > 0")
        if not self.motor_noise_std >= 0:
            problems.append("motor_noise_std must be >= 0")
        if not np.all(self.drag >= 0):
            problems.append("drag entries must be >= 0")
        if not self.k_f > 0:
            problems.append("k_f must be > 0")
        if not self.k_m > 0:
            problems.append("k_m must be > 0")
        if not self.arm_length > 0:
            problems.append("arm_length must be > 0")
        if problems:
            raise InvalidOverride("; ".join(problems))

    @property
    def hover_speed(self):
        return np.sqrt(self.mass * self.gravity / (4.0 * self.k_f))

    @property
    def allocation(self):
        return allocation_matrix(self)


@dataclass
class QuadState:
    position: np.ndarray
    velocity: np.ndarray
    rotation: np.ndarray
    angular_velocity: np.ndarray
    rotor_speeds: np.ndarray

    def as_vector(self):
        return np.concatenate([
            np.asarray(self.position, dtype=float).reshape(3),
            np.asarray(self.velocity, dtype=float).reshape(3),
            np.asarray(self.rotation, dtype=float).reshape(9),
            np.asarray(self.angular_velocity, dtype=float).reshape(3),
            np.asarray(self.rotor_speeds, dtype=float).reshape(4)])

    @classmethod
    def from_vector(cls, x):
        return cls(x[0:3].copy(), x[3:6].copy(), x[6:15].reshape(3, 3).copy(),
                   x[15:18].copy(), x[18:22].copy())

    @property
    def yaw(self):
        return float(np.arctan2(self.rotation[1, 0], self.rotation[0, 0]))


@dataclass
class QuadStateDerivative:
    """Time derivative of each QuadState field except the rotor speeds."""
    position: np.ndarray
    velocity: np.ndarray
    rotation: np.ndarray
    angular_velocity: np.ndarray


@dataclass
class WrenchCommand:
    thrust: float
    moment: np.ndarray

    def __post_init__(self):
        self.moment = np.asarray(self.moment, dtype=float).reshape(3)

    def as_vector(self):
        return np.concatenate([[self.thrust], self.moment])


def hover_state(position, params, yaw=0.0):
    """Rest at `position` with rotors spinning at hover speed."""
    c, s = np.cos(yaw), np.sin(yaw)
    rotation = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    return QuadState(np.array(position, dtype=float), np.zeros(3), rotation,
                     np.zeros(3), np.full(4, params.hover_speed))


def allocation_matrix(params):
    """
    Map per-rotor thrusts F_i to (f, M_x, M_y, M_z).

    Each rotor pushes along -z_B with force F_i from body position p_i and
    adds a reaction torque s_i * (k_m / k_f) * F_i about z_B.
    """
    d = params.arm_length / np.sqrt(2.0)
    px = d * ROTOR_SIGNS[:, 0]
    py = d * ROTOR_SIGNS[:, 1]
    return np.vstack([np.ones(4), -py, px, SPIN * params.k_m / params.k_f])


def rotor_wrench(rotor_speeds, params):
    """Collective thrust and body moment produced by the rotors."""
    thrusts = params.k_f * np.asarray(rotor_speeds, dtype=float) ** 2
    wrench = allocation_matrix(params) @ thrusts
    return WrenchCommand(float(wrench[0]), wrench[1:])


def _rigid_body_rates(x, params, alloc):
    v = x[3:6]
    rot = x[6:15].reshape(3, 3)
    w = x[15:18]
    wrench = alloc @ (params.k_f * x[18:22] ** 2)
    body_v = rot.T @ v
    acc = params.gravity * E3 \
        - (wrench[0] / params.mass) * rot[:, 2] \
        - rot @ (params.drag * body_v) / params.mass
    jw = params.inertia * w
    wdot = (wrench[1:] - np.cross(w, jw)) / params.inertia
    rotdot = rot @ hat(w)
    return v, acc, rotdot, wdot


def derivative(state, params):
    """
    Time derivative of the rigid-body part of the state, with the wrench
    taken from the current rotor speeds. Rotor lag is applied in step().
    """
    x = state.as_vector()
    velocity, acceleration, rotdot, wdot = _rigid_body_rates(
        x, params, allocation_matrix(params))
    return QuadStateDerivative(velocity.copy(), acceleration, rotdot, wdot)


def _rates(x, cmd, params, alloc):
    v, acc, rotdot, wdot = _rigid_body_rates(x, params, alloc)
    lag = (cmd - x[18:22]) / params.motor_time_constant
    return np.concatenate([v, acc, rotdot.reshape(9), wdot, lag])


def orthonormalize(rotation):
    """Nearest rotation matrix in the Frobenius sense."""
    u, _, vt = np.linalg.svd(rotation)
    if np.linalg.det(u @ vt) < 0:
        u[:, -1] = -u[:, -1]
    return u @ vt


def step(state, cmd_rotor_speeds, params, dt, rng, n_substeps=1):
    """
    Advance the vehicle by dt under a held rotor-speed command.

    The command gets one Gaussian noise draw (std motor_noise_std) and is
    clamped to the rotor range, then rotors relax toward it with time
    constant motor_time_constant while RK4 integrates everything over
    `n_substeps` equal substeps.
    """
    if not dt > 0:
        raise ValueError("dt must be positive, got %s" % dt)
    cmd = np.asarray(cmd_rotor_speeds, dtype=float).reshape(4)
    noise = rng.normal(0.0, 1.0, 4) * params.motor_noise_std
    cmd = np.clip(cmd + noise, params.rotor_speed_min,
                  params.rotor_speed_max)

    alloc = allocation_matrix(params)
    x = state.as_vector()
    h = dt / n_substeps
    for _ in range(n_substeps):
        k1 = _rates(x, cmd, params, alloc)
        k2 = _rates(x + 0.5 * h * k1, cmd, params, alloc)
        k3 = _rates(x + 0.5 * h * k2, cmd, params, alloc)
        k4 = _rates(x + h * k3, cmd, params, alloc)
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(x)):
            raise NonFiniteState("state diverged during integration")
        x[6:15] = orthonormalize(x[6:15].reshape(3, 3)).reshape(9)
        x[18:22] = np.clip(x[18:22], params.rotor_speed_min,
                           params.rotor_speed_max)
    return QuadState.from_vector(x)


# preset files

def read_params_file(path):
    """
    Parse a `name = value` file into a dict of strings. Blank lines and
    everything after '#' are ignored.
    """
    entries = {}
    try:
        with open(path) as f:
            lines = f.readlines()
    except OSError as e:
        raise IoFailure("cannot read %s: %s" % (path, e))
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ShapeCorruption("%s:%d: expected 'name = value'" % (path, n))
        key, value = [part.strip() for part in line.split("=", 1)]
        entries[key] = value
    return entries


def load_preset(preset="crazyflie-default", path=None):
    """Raw entries of a built-in preset, or of `path` if given."""
    if path is None:
        if preset not in PRESETS:
            raise UnknownPreset("unknown preset '%s' (known: %s)"
                                % (preset, ", ".join(PRESETS)))
        path = os.path.join(PRESET_DIR, preset + ".params")
    return read_params_file(path)


def _as_floats(value):
    if isinstance(value, str):
        try:
            return [float(v) for v in value.split(",")]
        except ValueError:
            raise InvalidOverride("not a number: '%s'" % value)
    return [float(v) for v in np.atleast_1d(value)]


def parse_overrides(pairs):
    """Turn ['key=value', ...] (as given on the command line) into a dict."""
    overrides = {}
    for pair in pairs or []:
        if "=" not in pair:
            raise InvalidOverride("expected key=value, got '%s'" % pair)
        key, value = pair.split("=", 1)
        overrides[key.strip()] = value.strip()
    return overrides


def apply_overrides(entries, overrides):
    """
    Merge overrides into preset entries, resolving the component aliases
    (d_x, J_zz, tau_m, ...). Returns a dict of floats / float lists.
    """
    values = {k: _as_floats(v) for k, v in entries.items()}
    for key, value in (overrides or {}).items():
        target, index = ALIASES.get(key, (key, None))
        if target not in values:
            raise InvalidOverride("unknown parameter '%s'" % key)
        floats = _as_floats(value)
        if index is not None:
            values[target] = list(values[target])
            values[target][index] = floats[0]
        else:
            values[target] = floats
    return values


def make_params(preset="crazyflie-default", overrides=None, path=None):
    """
    Build validated QuadParams from a preset (or a params file) and
    key-value overrides. Gain entries in the file are ignored here.
    """
    values = apply_overrides(load_preset(preset, path), overrides)
    kwargs = {}
    for name in QuadParams.__dataclass_fields__:
        if name not in values:
            raise ShapeCorruption("parameter '%s' missing from preset" % name)
        v = values[name]
        if name in VECTOR_KEYS:
            if len(v) != 3:
                raise InvalidOverride("%s needs 3 values, got %d"
                                      % (name, len(v)))
            kwargs[name] = np.array(v)
        else:
            kwargs[name] = v[0]
    params = QuadParams(**kwargs)
    logger.debug("params from %s: mass=%s drag=%s noise=%s", path or preset,
                 params.mass, params.drag, params.motor_noise_std)
    return params


def with_drag(params, drag):
    return replace(params, drag=np.asarray(drag, dtype=float))


def without_noise(params):
    return replace(params, motor_noise_std=0.0)

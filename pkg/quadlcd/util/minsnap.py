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
Minimum-snap piecewise polynomial trajectories through waypoints.

Coefficient layout: for segment i and flat output k (x, y, z, yaw) the
n + 1 coefficients of ascending powers of segment-local time sit at
c[((i * 4) + k) * (n + 1):][:n + 1]. Internally every segment is solved in
normalized time t / T_i, coefficients are stored unscaled.
"""

import logging
import warnings
from dataclasses import dataclass
from math import factorial

import numpy as np
from scipy.linalg import LinAlgError, LinAlgWarning, block_diag, \
    lu_factor, lu_solve

from quadlcd.util.errors import DegenerateSegment, IoFailure, \
    RankDeficiency, ShapeCorruption, SingularKkt

logger = logging.getLogger('quadlcd.minsnap')

ORDER = 7
FLAT_OUTPUTS = 4
CONTINUITY_DEPTH = 3     # velocity, acceleration, jerk
RANK_TOL = 1e-10
KKT_COND_LIMIT = 1e14


@dataclass
class WaypointSet:
    positions: np.ndarray
    yaw: np.ndarray = None

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=float)
        if self.positions.ndim != 2 or self.positions.shape[1] != 3:
            raise ShapeCorruption("waypoints must be k x 3")
        if self.yaw is None:
            self.yaw = np.zeros(len(self.positions))
        self.yaw = np.asarray(self.yaw, dtype=float).reshape(-1)
        if len(self.positions) < 2 or len(self.yaw) != len(self.positions):
            raise ShapeCorruption("need >= 2 waypoints with one yaw each")
        if not (np.all(np.isfinite(self.positions))
                and np.all(np.isfinite(self.yaw))):
            raise ShapeCorruption("waypoints must be finite")

    def __len__(self):
        return len(self.positions)

    @property
    def flat(self):
        """(k, 4) array of x, y, z, yaw."""
        return np.column_stack([self.positions, self.yaw])


@dataclass
class PiecewiseTrajectory:
    order: int
    durations: np.ndarray
    coefficients: np.ndarray

    def __post_init__(self):
        self.durations = np.asarray(self.durations, dtype=float).reshape(-1)
        self.coefficients = np.asarray(self.coefficients,
                                       dtype=float).reshape(-1)
        expected = FLAT_OUTPUTS * self.segments * (self.order + 1)
        if self.segments < 1 or len(self.coefficients) != expected:
            raise ShapeCorruption(
                "expected %d coefficients for s=%d n=%d, got %d"
                % (expected, self.segments, self.order,
                   len(self.coefficients)))
        if not np.all(self.durations > 0):
            raise ShapeCorruption("durations must be positive")

    @property
    def segments(self):
        return len(self.durations)

    @property
    def total_duration(self):
        return float(np.sum(self.durations))

    @property
    def segment_starts(self):
        return np.concatenate([[0.0], np.cumsum(self.durations)[:-1]])

    @property
    def knot_times(self):
        return np.concatenate([[0.0], np.cumsum(self.durations)])

    def segment_coefficients(self, i):
        """(4, n + 1) coefficients of segment i."""
        n1 = self.order + 1
        start = i * FLAT_OUTPUTS * n1
        return self.coefficients[start:start + FLAT_OUTPUTS * n1].reshape(
            FLAT_OUTPUTS, n1)


@dataclass
class QpSystem:
    """
    min c^T H c  s.t.  A c = b, with `scale` the per-column factors that
    map normalized-time coefficients back to c (c = scale * c_hat).
    """
    H: np.ndarray
    A: np.ndarray
    b: np.ndarray
    scale: np.ndarray


def coefficient_index(segment, output, power, order=ORDER):
    return ((segment * FLAT_OUTPUTS) + output) * (order + 1) + power


def time_allocation(wps, v_avg):
    """Segment durations from distance / v_avg."""
    if not v_avg > 0:
        raise ValueError("v_avg must be positive, got %s" % v_avg)
    lengths = np.linalg.norm(np.diff(wps.positions, axis=0), axis=1)
    if np.any(lengths <= 0):
        bad = int(np.argmin(lengths))
        raise DegenerateSegment("waypoints %d and %d coincide"
                                % (bad, bad + 1))
    return lengths / v_avg


def _snap_block(duration, n):
    h = np.zeros((n + 1, n + 1))
    for j in range(4, n + 1):
        for k in range(4, n + 1):
            p = j + k - 7
            h[j, k] = (j * (j - 1) * (j - 2) * (j - 3)
                       * k * (k - 1) * (k - 2) * (k - 3)
                       * duration ** p / p)
    return h


def snap_hessian(durations, n=ORDER):
    """
    Block-diagonal H with c^T H c = sum of the integrated squared 4th
    derivative of every flat output over every segment.
    """
    if n < 4:
        raise ValueError("order must be >= 4, got %s" % n)
    blocks = []
    for duration in durations:
        block = _snap_block(duration, n)
        blocks.extend([block] * FLAT_OUTPUTS)
    return block_diag(*blocks)


def column_scale(durations, n=ORDER):
    """Factors T_i^-j taking normalized-time coefficients to c."""
    powers = np.arange(n + 1)
    return np.concatenate([np.tile(d ** -powers, FLAT_OUTPUTS)
                           for d in durations])


def _derivative_row(n, k, tau):
    row = np.zeros(n + 1)
    for j in range(k, n + 1):
        row[j] = factorial(j) / factorial(j - k) * tau ** (j - k)
    return row


def _output_constraints(values, durations, n):
    """Rows and right-hand side for one flat output over all segments."""
    s = len(durations)
    n1 = n + 1
    rows, rhs = [], []

    def put(entries, value):
        row = np.zeros(s * n1)
        for seg, vec in entries:
            row[seg * n1:(seg + 1) * n1] += vec
        rows.append(row)
        rhs.append(value)

    for i, T in enumerate(durations):
        put([(i, _derivative_row(n, 0, 0.0))], values[i])
        put([(i, _derivative_row(n, 0, T))], values[i + 1])
    for k in range(1, CONTINUITY_DEPTH + 1):
        put([(0, _derivative_row(n, k, 0.0))], 0.0)
        put([(s - 1, _derivative_row(n, k, durations[-1]))], 0.0)
    for i in range(s - 1):
        for k in range(1, CONTINUITY_DEPTH + 1):
            put([(i, _derivative_row(n, k, durations[i])),
                 (i + 1, -_derivative_row(n, k, 0.0))], 0.0)
    return np.array(rows), np.array(rhs)


def check_rank(A, scale=None, tol=RANK_TOL):
    """Raise RankDeficiency unless A (column-scaled) has full row rank."""
    m = A if scale is None else A * scale
    if m.shape[0] > m.shape[1]:
        raise RankDeficiency("%d constraints for %d unknowns" % m.shape)
    sv = np.linalg.svd(m, compute_uv=False)
    if sv.size == 0 or sv[-1] <= tol * sv[0]:
        raise RankDeficiency(
            "constraint matrix is rank deficient (sigma_min/sigma_max = %g)"
            % (sv[-1] / sv[0] if sv.size else 0.0))


def constraint_system(wps, durations, n=ORDER):
    """
    Waypoint interpolation, rest boundary conditions and continuity through
    jerk for all four flat outputs. Returns (A, b).
    """
    durations = np.asarray(durations, dtype=float)
    if len(durations) != len(wps) - 1:
        raise ShapeCorruption("%d durations for %d waypoints"
                              % (len(durations), len(wps)))
    s, n1 = len(durations), n + 1
    flat = wps.flat
    blocks, rhs = [], []
    for k in range(FLAT_OUTPUTS):
        a1, b1 = _output_constraints(flat[:, k], durations, n)
        full = np.zeros((a1.shape[0], FLAT_OUTPUTS * s * n1))
        for i in range(s):
            start = coefficient_index(i, k, 0, n)
            full[:, start:start + n1] = a1[:, i * n1:(i + 1) * n1]
        blocks.append(full)
        rhs.append(b1)
    A = np.vstack(blocks)
    b = np.concatenate(rhs)
    check_rank(A, column_scale(durations, n))
    return A, b


def qp_system(wps, durations, n=ORDER):
    A, b = constraint_system(wps, durations, n)
    return QpSystem(snap_hessian(durations, n), A, b,
                    column_scale(durations, n))


def solve_kkt(system):
    """
    Solve [[2H, A^T], [A, 0]] [c; lam] = [0; b] in normalized-time
    coordinates with an LU factorization (partial pivoting).

    :return: (c, lam)
    """
    s = system.scale
    hs = system.H * np.outer(s, s)
    a_s = system.A * s
    weight = np.max(np.abs(hs)) or 1.0
    m, nvar = a_s.shape
    kkt = np.zeros((nvar + m, nvar + m))
    kkt[:nvar, :nvar] = 2.0 * hs / weight
    kkt[:nvar, nvar:] = a_s.T
    kkt[nvar:, :nvar] = a_s
    rhs = np.concatenate([np.zeros(nvar), system.b])
    if np.linalg.cond(kkt) > KKT_COND_LIMIT:
        raise SingularKkt("KKT matrix is singular to working precision")
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("error", LinAlgWarning)
            sol = lu_solve(lu_factor(kkt), rhs)
    except (LinAlgError, LinAlgWarning) as e:
        raise SingularKkt(str(e))
    if not np.all(np.isfinite(sol)):
        raise SingularKkt("non-finite KKT solution")
    c = s * sol[:nvar]
    lam = sol[nvar:] * weight
    return c, lam


def solve_minsnap(wps, v_avg=None, n=ORDER, durations=None):
    """Minimum-snap trajectory through `wps`, timed by v_avg."""
    if durations is None:
        durations = time_allocation(wps, v_avg)
    system = qp_system(wps, durations, n)
    c, _ = solve_kkt(system)
    logger.debug("min-snap: %d segments, T=%.3f s, cost=%.6g",
                 len(durations), np.sum(durations), c @ system.H @ c)
    return PiecewiseTrajectory(n, durations, c)


def snap_cost(traj):
    c = traj.coefficients
    return float(c @ snap_hessian(traj.durations, traj.order) @ c)


# text files

def write_trajectory(traj, path):
    """`n s` header, durations, then one line per segment and output."""
    n1 = traj.order + 1
    lines = ["%d %d" % (traj.order, traj.segments),
             " ".join("%.17g" % d for d in traj.durations)]
    for row in traj.coefficients.reshape(-1, n1):
        lines.append(" ".join("%.17g" % v for v in row))
    try:
        with open(path, "w") as f:
            f.write("\n".join(lines) + "\n")
    except OSError as e:
        raise IoFailure("cannot write %s: %s" % (path, e))


def read_trajectory(path):
    try:
        with open(path) as f:
            tokens = f.read().split()
    except OSError as e:
        raise IoFailure("cannot read %s: %s" % (path, e))
    try:
        n, s = int(tokens[0]), int(tokens[1])
        values = np.array([float(t) for t in tokens[2:]])
    except (IndexError, ValueError):
        raise ShapeCorruption("%s is not a trajectory file" % path)
    expected = s + FLAT_OUTPUTS * s * (n + 1)
    if s < 1 or len(values) != expected:
        raise ShapeCorruption("%s: expected %d values after the header, "
                              "found %d" % (path, expected, len(values)))
    return PiecewiseTrajectory(n, values[:s], values[s:])


def read_waypoints(path):
    """One `x y z [yaw]` line per waypoint, '#' starts a comment."""
    rows = []
    try:
        with open(path) as f:
            for line in f:
                line = line.split("#", 1)[0].split()
                if line:
                    rows.append([float(v) for v in line])
    except OSError as e:
        raise IoFailure("cannot read %s: %s" % (path, e))
    except ValueError:
        raise ShapeCorruption("%s: waypoint values must be numbers" % path)
    if any(len(r) not in (3, 4) for r in rows):
        raise ShapeCorruption("%s: expected 'x y z [yaw]' per line" % path)
    positions = [r[:3] for r in rows]
    yaw = [r[3] if len(r) == 4 else 0.0 for r in rows]
    return WaypointSet(np.array(positions), np.array(yaw))


def write_waypoints(wps, path):
    try:
        with open(path, "w") as f:
            for p, y in zip(wps.positions, wps.yaw):
                f.write("%.17g %.17g %.17g %.17g\n" % (p[0], p[1], p[2], y))
    except OSError as e:
        raise IoFailure("cannot write %s: %s" % (path, e))

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
Training-data generation: waypoint sampling, closed-loop rollouts of the
fixed controller on min-snap references, tracking-cost labels and the
dataset file.

Every task draws its randomness from a seed derived from (master seed,
task index, namespace), so a dataset is a pure function of its
CollectConfig whatever the worker count.
"""

import csv
import hashlib
import logging
import multiprocessing
import re
import struct
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from quadlcd.util.errors import FlatnessSingularity, IoFailure, \
    NonFiniteState, QuadLcdError, SamplingExhausted, ShapeCorruption
from quadlcd.util.flatness_control import control_step, eval_reference, \
    hover_reference, make_gains
from quadlcd.util.minsnap import ORDER, FLAT_OUTPUTS, PiecewiseTrajectory, \
    WaypointSet, solve_minsnap
from quadlcd.util.quad_dynamics import hover_state, make_params, step

logger = logging.getLogger('quadlcd.rollout_utils')

DATASET_HEADER = "QLCD-DATASET v1 n=%d s=%d"
HEADER_RE = re.compile(r"^QLCD-DATASET v1 n=(\d+) s=(\d+)$")
MAX_ATTEMPTS = 1000
COLLECT_NAMESPACE = "collect"
EVAL_NAMESPACE = "eval"


@dataclass
class CollectConfig:
    n_tasks: int = 5000
    seed: int = 0
    domain: tuple = (0.0, 10.0)
    n_waypoints: int = 4
    min_spacing: float = 1.0
    max_spacing: float = 3.0
    v_avg: float = 2.0
    params: object = field(default_factory=make_params)
    gains: object = field(default_factory=make_gains)
    ctrl_rate: int = 100
    sim_rate: int = 500
    crash_threshold: float = 1.5
    settle_time: float = 1.0
    workers: int = 1

    def __post_init__(self):
        if not 0 < self.min_spacing <= self.max_spacing:
            raise ValueError("need 0 < min_spacing <= max_spacing")
        if not (self.ctrl_rate > 0 and self.sim_rate > 0
                and self.sim_rate % self.ctrl_rate == 0):
            raise ValueError("sim_rate must be a positive multiple of "
                             "ctrl_rate")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.n_waypoints < 2 or self.domain[1] <= self.domain[0]:
            raise ValueError("need >= 2 waypoints and a non-empty domain")


@dataclass
class RolloutRecord:
    seed: int
    positions: np.ndarray
    yaw: np.ndarray
    durations: np.ndarray
    coefficients: np.ndarray
    label: float
    max_error: float
    crashed: bool
    drag: np.ndarray

    @property
    def waypoints(self):
        return WaypointSet(self.positions, self.yaw)

    @property
    def trajectory(self):
        return PiecewiseTrajectory(ORDER, self.durations, self.coefficients)


@dataclass
class RolloutResult:
    label: float
    max_error: float
    crashed: bool
    sat_fraction: float
    waypoint_errors: list
    log: dict = None


def task_seed(master_seed, index, namespace=COLLECT_NAMESPACE):
    """64-bit task seed from (master seed, index) within a namespace."""
    mask = 0xFFFFFFFFFFFFFFFF
    digest = hashlib.blake2b(
        struct.pack("<QQ", master_seed & mask, index & mask),
        digest_size=8, person=namespace.encode()[:16]).digest()
    return int.from_bytes(digest, "little")


def task_rngs(seed):
    """Independent generators for waypoint sampling and motor noise."""
    children = np.random.SeedSequence(seed).spawn(2)
    return [np.random.default_rng(c) for c in children]


def sample_waypoints(rng, config):
    """
    First waypoint uniform in the domain cube, each next one uniform in the
    spherical shell [min_spacing, max_spacing] around its predecessor,
    rejected until it lies in the domain. Yaw is 0 everywhere.
    """
    lo, hi = config.domain
    points = [rng.uniform(lo, hi, 3)]
    r3 = (config.min_spacing ** 3, config.max_spacing ** 3)
    for i in range(1, config.n_waypoints):
        for _ in range(MAX_ATTEMPTS):
            direction = rng.normal(size=3)
            direction /= np.linalg.norm(direction)
            radius = np.cbrt(rng.uniform(*r3))
            candidate = points[-1] + radius * direction
            if np.all(candidate >= lo) and np.all(candidate <= hi):
                points.append(candidate)
                break
        else:
            raise SamplingExhausted("no waypoint %d inside the domain after "
                                    "%d attempts" % (i, MAX_ATTEMPTS))
    return WaypointSet(np.array(points), np.zeros(config.n_waypoints))


def wrap_angle(a):
    return (a + np.pi) % (2.0 * np.pi) - np.pi


def run_closed_loop(traj, params, gains, rng, ctrl_rate=100, sim_rate=500,
                    settle_time=1.0, crash_threshold=None, record=False):
    """
    Fly the SE(3) controller along `traj` from rest at its first waypoint,
    then hold the final point for `settle_time`.

    The label accumulates squared position error plus squared wrapped yaw
    error at every controller tick. When the position error exceeds
    `crash_threshold` the run stops and the label is padded with
    threshold^2 for the remaining time.
    """
    dt = 1.0 / ctrl_rate
    substeps = sim_rate // ctrl_rate
    horizon = traj.total_duration
    total = horizon + settle_time
    n_ticks = int(round(total * ctrl_rate))
    knot_ticks = {int(round(t * ctrl_rate)): i
                  for i, t in enumerate(traj.knot_times)}

    start = eval_reference(traj, 0.0)
    state = hover_state(start.position, params, start.yaw)
    speeds = np.full(4, params.hover_speed)
    label, max_error, crashed, sat_ticks = 0.0, 0.0, False, 0
    waypoint_errors = []
    log = {"t": [], "position": [], "yaw": [], "ref_position": [],
           "ref_yaw": [], "saturated": []} if record else None

    k = -1
    for k in range(n_ticks):
        t = k * dt
        if t < horizon:
            ref = eval_reference(traj, t)
        else:
            end = eval_reference(traj, horizon)
            ref = hover_reference(end.position, end.yaw, t)
        error = float(np.linalg.norm(state.position - ref.position))
        yaw_error = wrap_angle(state.yaw - ref.yaw)
        label += (error ** 2 + yaw_error ** 2) * dt
        max_error = max(max_error, error)
        if k in knot_ticks:
            waypoint_errors.append(error)
        if crash_threshold is not None and error > crash_threshold:
            crashed = True
            label += crash_threshold ** 2 * (total - t)
            break

        try:
            speeds, saturated = control_step(state, ref, gains, params)
        except FlatnessSingularity:
            saturated = True
        sat_ticks += saturated
        if record:
            log["t"].append(t)
            log["position"].append(state.position.copy())
            log["yaw"].append(state.yaw)
            log["ref_position"].append(ref.position.copy())
            log["ref_yaw"].append(ref.yaw)
            log["saturated"].append(saturated)
        try:
            state = step(state, speeds, params, dt, rng, substeps)
        except NonFiniteState:
            logger.debug("state diverged at t=%.2f", t)
            crashed = True
            max_error = float("inf")
            if crash_threshold is not None:
                label += crash_threshold ** 2 * (total - t)
            break

    ticks = max(k + 1, 1)
    if record:
        log = {key: np.array(v) for key, v in log.items()}
    return RolloutResult(float(label), float(max_error), crashed,
                         sat_ticks / ticks, waypoint_errors, log)


def rollout_cost(traj, params, gains, config, rng):
    """(label, max position error, crashed) of one closed-loop rollout."""
    result = run_closed_loop(traj, params, gains, rng, config.ctrl_rate,
                             config.sim_rate, config.settle_time,
                             config.crash_threshold)
    return result.label, result.max_error, result.crashed


def _fmt(values):
    return ",".join("%.17g" % v for v in values)


def format_record(record):
    fields = [str(record.seed), _fmt(record.positions.reshape(-1)),
              _fmt(record.yaw), _fmt(record.durations),
              _fmt(record.coefficients),
              _fmt([record.label, record.max_error]),
              "1" if record.crashed else "0", _fmt(record.drag)]
    return ",".join(fields)


def collect_task(config, index):
    """One dataset line for task `index`: a record or a skipped entry."""
    seed = task_seed(config.seed, index, COLLECT_NAMESPACE)
    wp_rng, noise_rng = task_rngs(seed)
    try:
        wps = sample_waypoints(wp_rng, config)
        traj = solve_minsnap(wps, config.v_avg)
        label, max_error, crashed = rollout_cost(
            traj, config.params, config.gains, config, noise_rng)
    except QuadLcdError as e:
        logger.warning("task %d skipped: %s", index, e)
        return "skip,%d,%s: %s" % (seed, type(e).__name__,
                                   str(e).replace("\n", " "))
    record = RolloutRecord(seed, wps.positions, wps.yaw, traj.durations,
                           traj.coefficients, label, max_error, crashed,
                           config.params.drag)
    return format_record(record)


def collect(config, path):
    """
    Write the labelled dataset for `config` to `path`. Lines come out in
    task order for any worker count.

    :return: (records written, tasks skipped)
    """
    header = DATASET_HEADER % (ORDER, config.n_waypoints - 1)
    work = partial(collect_task, config)
    written = skipped = 0
    try:
        with open(path, "w") as f:
            f.write(header + "\n")
            if config.workers > 1 and config.n_tasks > 1:
                with multiprocessing.Pool(config.workers) as pool:
                    lines = pool.imap(work, range(config.n_tasks),
                                      chunksize=4)
                    for line in lines:
                        f.write(line + "\n")
                        skipped += line.startswith("skip,")
            else:
                for index in range(config.n_tasks):
                    line = work(index)
                    f.write(line + "\n")
                    skipped += line.startswith("skip,")
    except OSError as e:
        raise IoFailure("cannot write %s: %s" % (path, e))
    written = config.n_tasks - skipped
    logger.info("collected %d records (%d skipped) into %s", written,
                skipped, path)
    return written, skipped


def load_dataset(path):
    """
    :return: (records, skipped) where skipped is a list of (seed, reason)
    """
    try:
        with open(path) as f:
            lines = f.read().splitlines()
    except OSError as e:
        raise IoFailure("cannot read %s: %s" % (path, e))
    match = HEADER_RE.match(lines[0].strip()) if lines else None
    if match is None:
        raise ShapeCorruption("%s: missing dataset header" % path)
    n, s = int(match.group(1)), int(match.group(2))
    k = s + 1
    width = 1 + 3 * k + k + s + FLAT_OUTPUTS * s * (n + 1) + 2 + 1 + 3
    records, skipped = [], []
    for number, line in enumerate(lines[1:], 2):
        if not line.strip():
            continue
        if line.startswith("skip,"):
            _, seed, reason = line.split(",", 2)
            skipped.append((int(seed), reason))
            continue
        parts = line.split(",")
        if len(parts) != width:
            raise ShapeCorruption("%s:%d: expected %d fields, found %d"
                                  % (path, number, width, len(parts)))
        try:
            seed = int(parts[0])
            v = np.array([float(p) for p in parts[1:]])
        except ValueError:
            raise ShapeCorruption("%s:%d: bad number" % (path, number))
        pos = 0

        def take(count):
            nonlocal pos
            chunk = v[pos:pos + count]
            pos += count
            return chunk

        positions = take(3 * k).reshape(k, 3)
        yaw = take(k)
        durations = take(s)
        coefficients = take(FLAT_OUTPUTS * s * (n + 1))
        label, max_error, crashed = take(3)
        records.append(RolloutRecord(seed, positions, yaw, durations,
                                     coefficients, float(label),
                                     float(max_error), bool(crashed),
                                     take(3)))
    return records, skipped


LOG_COLUMNS = ("t", "x", "y", "z", "yaw", "x_ref", "y_ref", "z_ref",
               "yaw_ref", "saturated")


def write_rollout_log(log, path):
    """Per-tick CSV of executed and reference position and yaw."""
    try:
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(LOG_COLUMNS)
            for i, t in enumerate(log["t"]):
                writer.writerow(
                    ["%.6f" % t]
                    + ["%.9g" % v for v in log["position"][i]]
                    + ["%.9g" % log["yaw"][i]]
                    + ["%.9g" % v for v in log["ref_position"][i]]
                    + ["%.9g" % log["ref_yaw"][i],
                       int(bool(log["saturated"][i]))])
    except OSError as e:
        raise IoFailure("cannot write %s: %s" % (path, e))


def read_rollout_log(path):
    try:
        with open(path, newline="") as f:
            rows = list(csv.reader(f))
    except OSError as e:
        raise IoFailure("cannot read %s: %s" % (path, e))
    if not rows or tuple(rows[0]) != LOG_COLUMNS:
        raise ShapeCorruption("%s: not a rollout log" % path)
    try:
        data = np.array([[float(v) for v in row] for row in rows[1:]],
                        dtype=float).reshape(-1, len(LOG_COLUMNS))
    except ValueError:
        raise ShapeCorruption("%s: malformed rollout log" % path)
    return {"t": data[:, 0], "position": data[:, 1:4], "yaw": data[:, 4],
            "ref_position": data[:, 5:8], "ref_yaw": data[:, 8],
            "saturated": data[:, 9].astype(bool)}

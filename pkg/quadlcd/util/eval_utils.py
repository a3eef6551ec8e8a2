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
Crash-rate evaluation of the planners on held-out waypoint tasks and the
drag sweep built on top of it.
"""

import csv
import logging
import multiprocessing
import os
import tempfile
from dataclasses import dataclass, field, replace
from functools import partial

import numpy as np

from quadlcd.util.errors import IoFailure, QuadLcdError, ShapeCorruption
from quadlcd.util.lcd_plan import PlanOptions, plan
from quadlcd.util.minsnap import snap_cost, solve_minsnap
from quadlcd.util.quad_dynamics import with_drag
from quadlcd.util.rollout_utils import COLLECT_NAMESPACE, EVAL_NAMESPACE, \
    CollectConfig, collect, load_dataset, run_closed_loop, \
    sample_waypoints, task_rngs, task_seed
from quadlcd.util.track_net import TrainConfig, forward, train

logger = logging.getLogger('quadlcd.eval_utils')

EVAL_COLUMNS = ("task_seed", "planner", "max_error_m", "crashed",
                "label_pred", "snap_cost", "sat_fraction")
SUMMARY_COLUMNS = ("planner", "tasks", "crashes", "crash_rate",
                   "mean_error_m", "max_error_m", "mean_sat_fraction",
                   "mean_waypoint_error_m")
SWEEP_COLUMNS = ("d_x", "d_y", "d_z") + SUMMARY_COLUMNS
DRAG_XY_RANGE = (0.002, 0.008)
DRAG_Z_RANGE = (0.007, 0.013)


def classify_crash(max_error, threshold=1.5):
    """A run crashed when its largest position error is above threshold."""
    return bool(max_error > threshold)


@dataclass
class MinSnapPlanner:
    name: str = "minsnap"

    def plan(self, wps, v_avg):
        return solve_minsnap(wps, v_avg)


@dataclass
class LcdPlanner:
    model: object
    options: PlanOptions = field(default_factory=PlanOptions)
    name: str = "lcd"

    def plan(self, wps, v_avg):
        traj, _ = plan(wps, v_avg, self.model, self.options)
        return traj


@dataclass
class EvalRow:
    task_seed: int
    planner: str
    max_error_m: float
    crashed: bool
    label_pred: float
    snap_cost: float
    sat_fraction: float
    waypoint_error_m: float = float("nan")

    def as_csv(self):
        return [str(self.task_seed), self.planner, "%.9g" % self.max_error_m,
                int(self.crashed), "%.9g" % self.label_pred,
                "%.9g" % self.snap_cost, "%.6f" % self.sat_fraction]


@dataclass
class EvalResult:
    planner: str
    tasks: int
    crashes: int
    crash_rate: float
    mean_error: float
    max_error: float
    mean_sat_fraction: float
    mean_waypoint_error: float = float("nan")


@dataclass
class SweepRow:
    drag: np.ndarray
    results: list


@dataclass
class SweepConfig:
    points: int = 5
    xy_range: tuple = DRAG_XY_RANGE
    z_range: tuple = DRAG_Z_RANGE
    retrain: bool = True
    collect: CollectConfig = field(default_factory=CollectConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    plan: PlanOptions = field(default_factory=PlanOptions)
    model: object = None
    eval_tasks: int = 50
    eval_seed: int = 1
    data_dir: str = None

    def __post_init__(self):
        if self.points < 2:
            raise ValueError("a drag sweep needs at least 2 points")
        if not self.retrain and self.model is None:
            raise ValueError("a sweep without retraining needs a model")


def drag_settings(points, xy_range=DRAG_XY_RANGE, z_range=DRAG_Z_RANGE):
    """Evenly spaced (d_x, d_y, d_z), scaled together across both ranges."""
    xy = np.linspace(xy_range[0], xy_range[1], points)
    z = np.linspace(z_range[0], z_range[1], points)
    return np.column_stack([xy, xy, z])


def shared_task_seeds(master_seed, eval_seed, n_collect, n_eval):
    """Task seeds that collection and evaluation would both draw."""
    train = {task_seed(master_seed, i, COLLECT_NAMESPACE)
             for i in range(n_collect)}
    held_out = {task_seed(eval_seed, i, EVAL_NAMESPACE)
                for i in range(n_eval)}
    return train & held_out


def _failed_row(seed, planner, reason):
    logger.warning("task %d (%s) counted as crash: %s", seed, planner,
                   reason)
    return EvalRow(seed, planner, float("inf"), True, float("nan"),
                   float("nan"), 0.0)


def evaluate_task(planner, params, gains, config, eval_seed, scorer, index):
    """Plan and fly evaluation task `index`; failures count as crashes."""
    seed = task_seed(eval_seed, index, EVAL_NAMESPACE)
    wp_rng, noise_rng = task_rngs(seed)
    try:
        wps = sample_waypoints(wp_rng, config)
        traj = planner.plan(wps, config.v_avg)
        result = run_closed_loop(traj, params, gains, noise_rng,
                                 config.ctrl_rate, config.sim_rate,
                                 config.settle_time, config.crash_threshold)
    except QuadLcdError as e:
        return _failed_row(seed, planner.name,
                           "%s: %s" % (type(e).__name__, e))

    label_pred = float("nan")
    if scorer is not None and scorer.input_dim == traj.coefficients.size:
        label_pred = forward(scorer, traj.coefficients)
    errors = result.waypoint_errors
    return EvalRow(seed, planner.name, result.max_error,
                   classify_crash(result.max_error, config.crash_threshold),
                   label_pred, snap_cost(traj), result.sat_fraction,
                   float(np.mean(errors)) if errors else float("nan"))


def summarize(name, rows):
    """EvalResult from per-task rows of one planner."""
    tasks = len(rows)
    crashes = sum(1 for r in rows if r.crashed)
    flying = [r for r in rows if not r.crashed]
    errors = np.array([r.max_error_m for r in flying])
    wp_errors = np.array([r.waypoint_error_m for r in flying
                          if np.isfinite(r.waypoint_error_m)])
    nan = float("nan")
    return EvalResult(
        name, tasks, crashes, 100.0 * crashes / tasks if tasks else 0.0,
        float(errors.mean()) if len(errors) else nan,
        float(errors.max()) if len(errors) else nan,
        float(np.mean([r.sat_fraction for r in rows])) if rows else nan,
        float(wp_errors.mean()) if len(wp_errors) else nan)


def evaluate(planner, n_tasks, eval_seed, params, gains, config,
             scorer=None):
    """
    Crash-rate evaluation of one planner on `n_tasks` held-out tasks. The
    task list depends only on `eval_seed`, so every planner evaluated with
    the same seed flies the same tasks.

    :param scorer: model whose prediction is reported as label_pred;
                   defaults to the planner's own model, if any
    :return: (EvalResult, list of EvalRow in task order)
    """
    if scorer is None:
        scorer = getattr(planner, "model", None)
    work = partial(evaluate_task, planner, params, gains, config, eval_seed,
                   scorer)
    if config.workers > 1 and n_tasks > 1:
        with multiprocessing.Pool(config.workers) as pool:
            rows = list(pool.imap(work, range(n_tasks), chunksize=2))
    else:
        rows = [work(i) for i in range(n_tasks)]
    result = summarize(planner.name, rows)
    logger.info("%s: %d/%d crashes (%.1f%%)", result.planner,
                result.crashes, result.tasks, result.crash_rate)
    return result, rows


def write_eval_rows(rows, path):
    try:
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(EVAL_COLUMNS)
            for row in rows:
                writer.writerow(row.as_csv())
    except OSError as e:
        raise IoFailure("cannot write %s: %s" % (path, e))


def write_eval_summary(results, path):
    """One row per EvalResult."""
    try:
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(SUMMARY_COLUMNS)
            for r in results:
                writer.writerow(_summary_line(r))
    except OSError as e:
        raise IoFailure("cannot write %s: %s" % (path, e))


def read_eval_rows(path):
    try:
        with open(path, newline="") as f:
            rows = list(csv.reader(f))
    except OSError as e:
        raise IoFailure("cannot read %s: %s" % (path, e))
    if not rows or tuple(c.strip() for c in rows[0]) != EVAL_COLUMNS:
        raise ShapeCorruption("%s: not an evaluation CSV" % path)
    try:
        return [EvalRow(int(r[0]), r[1], float(r[2]), r[3] == "1",
                        float(r[4]), float(r[5]), float(r[6]))
                for r in rows[1:] if r]
    except (ValueError, IndexError):
        raise ShapeCorruption("%s: malformed evaluation row" % path)


def crash_rates(rows):
    """Crash rate (%) per planner, in order of first appearance."""
    rates = {}
    for name in dict.fromkeys(r.planner for r in rows):
        mine = [r for r in rows if r.planner == name]
        rates[name] = 100.0 * sum(r.crashed for r in mine) / len(mine)
    return rates


def _summary_line(result):
    return [result.planner, result.tasks, result.crashes,
            "%.2f" % result.crash_rate, "%.6g" % result.mean_error,
            "%.6g" % result.max_error, "%.6f" % result.mean_sat_fraction,
            "%.6g" % result.mean_waypoint_error]


def _sweep_line(drag, result):
    return ["%.6g" % d for d in drag] + _summary_line(result)


def _train_for_drag(sweep, collect_config, work_dir, index):
    path = os.path.join(work_dir, "sweep_%02d.csv" % index)
    collect(collect_config, path)
    records, _ = load_dataset(path)
    rng = np.random.default_rng(sweep.train.seed)
    model, report = train(records, sweep.train, rng)
    logger.info("drag setting %d: validation spearman %.3f", index,
                report.spearman)
    return model


def drag_sweep(sweep, path):
    """
    Evaluate both planners at each drag setting and write one CSV row per
    (setting, planner), flushed as soon as it is known.

    :return: list of SweepRow
    """
    settings = drag_settings(sweep.points, sweep.xy_range, sweep.z_range)
    base = sweep.collect
    rows = []
    with tempfile.TemporaryDirectory() as scratch:
        work_dir = sweep.data_dir or scratch
        try:
            f = open(path, "w", newline="")
        except OSError as e:
            raise IoFailure("cannot write %s: %s" % (path, e))
        with f:
            writer = csv.writer(f)
            writer.writerow(SWEEP_COLUMNS)
            f.flush()
            for i, drag in enumerate(settings):
                params = with_drag(base.params, drag)
                config = replace(base, params=params)
                logger.info("drag setting %d/%d: %s", i + 1, len(settings),
                            drag)
                model = sweep.model
                if sweep.retrain:
                    model = _train_for_drag(sweep, config, work_dir, i)
                results = []
                for planner in (MinSnapPlanner(),
                                LcdPlanner(model, sweep.plan)):
                    result, _ = evaluate(planner, sweep.eval_tasks,
                                         sweep.eval_seed, params,
                                         base.gains, config, scorer=model)
                    writer.writerow(_sweep_line(drag, result))
                    f.flush()
                    results.append(result)
                rows.append(SweepRow(drag, results))
    return rows

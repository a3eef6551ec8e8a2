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

"""SVG figures of trajectories, rollouts and evaluation results."""

import logging

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.gridspec import GridSpec  # noqa: E402
import numpy as np  # noqa: E402

from quadlcd.util.errors import IoFailure  # noqa: E402
from quadlcd.util.flatness_control import eval_reference  # noqa: E402

logger = logging.getLogger('quadlcd.figure_utils')

SAMPLES = 400
AXIS_LABELS = ("x [m]", "y [m]", "z [m]", "yaw [rad]")
REFERENCE_STYLE = dict(color="tab:blue", linestyle=":", linewidth=1.5)
EXECUTED_STYLE = dict(color="tab:orange", linestyle="-", linewidth=1.2)
MARKER_STYLE = dict(color="black", marker="o", markersize=4, linestyle="")


def sample_reference(traj, samples=SAMPLES):
    """
    Times, positions and yaw of the reference; the knot times are always
    among the samples.
    """
    t = np.union1d(np.linspace(0.0, traj.total_duration, samples),
                   traj.knot_times)
    t = t[t <= traj.total_duration]
    refs = [eval_reference(traj, ti) for ti in t]
    return (t, np.array([r.position for r in refs]),
            np.array([r.yaw for r in refs]))


def _save(fig, path):
    try:
        fig.savefig(path, format="svg")
    except OSError as e:
        raise IoFailure("cannot write %s: %s" % (path, e))
    finally:
        plt.close(fig)
    logger.info("figure written to %s", path)


def trajectory_figure(traj, path, log=None, title=None):
    """
    3D path on the left, x, y, z and yaw against time on the right.
    Reference dotted, executed solid, waypoints marked at their knot times.
    """
    t, pos, yaw = sample_reference(traj)
    knots = traj.knot_times
    marks = [eval_reference(traj, tk) for tk in knots]
    mark_pos = np.array([m.position for m in marks])
    mark_yaw = np.array([m.yaw for m in marks])

    fig = plt.figure(figsize=(11, 6))
    grid = GridSpec(4, 2, figure=fig, width_ratios=(1.2, 1.0))
    ax3d = fig.add_subplot(grid[:, 0], projection="3d")
    ax3d.plot(pos[:, 0], pos[:, 1], pos[:, 2], label="reference",
              **REFERENCE_STYLE)
    ax3d.plot(mark_pos[:, 0], mark_pos[:, 1], mark_pos[:, 2],
              label="waypoints", **MARKER_STYLE)
    if log is not None:
        ax3d.plot(log["position"][:, 0], log["position"][:, 1],
                  log["position"][:, 2], label="executed", **EXECUTED_STYLE)
    # z points down
    ax3d.invert_zaxis()
    ax3d.set_xlabel(AXIS_LABELS[0])
    ax3d.set_ylabel(AXIS_LABELS[1])
    ax3d.set_zlabel(AXIS_LABELS[2])
    ax3d.legend(loc="upper left", fontsize=8)

    series = [pos[:, 0], pos[:, 1], pos[:, 2], yaw]
    mark_series = [mark_pos[:, 0], mark_pos[:, 1], mark_pos[:, 2], mark_yaw]
    for i, label in enumerate(AXIS_LABELS):
        ax = fig.add_subplot(grid[i, 1])
        ax.plot(t, series[i], gid="reference-%d" % i, **REFERENCE_STYLE)
        ax.plot(knots, mark_series[i], gid="waypoints-%d" % i,
                **MARKER_STYLE)
        if log is not None:
            executed = log["yaw"] if i == 3 else log["position"][:, i]
            ax.plot(log["t"], executed, **EXECUTED_STYLE)
        ax.set_ylabel(label)
        if i < 3:
            ax.tick_params(labelbottom=False)
    ax.set_xlabel("t [s]")
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    _save(fig, path)


def crash_rate_figure(rates, path, title=None):
    """Bar chart of crash rate (%) per planner."""
    names = list(rates)
    fig, ax = plt.subplots(figsize=(4 + 0.6 * len(names), 4))
    bars = ax.bar(names, [rates[n] for n in names], color="tab:gray")
    for bar, name in zip(bars, names):
        ax.annotate("%.0f%%" % rates[name],
                    (bar.get_x() + bar.get_width() / 2, bar.get_height()),
                    ha="center", va="bottom", fontsize=9)
    ax.set_ylim(0, 100)
    ax.set_ylabel("crash rate [%]")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    _save(fig, path)

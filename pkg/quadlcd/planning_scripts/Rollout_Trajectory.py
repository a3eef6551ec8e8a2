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
This script flies a planned trajectory once in closed loop and logs the
executed and reference states at every controller tick.
"""

import logging
import sys

import numpy as np

from quadlcd.util import script_utils
from quadlcd.util.minsnap import read_trajectory
from quadlcd.util.rollout_utils import run_closed_loop, write_rollout_log

logger = logging.getLogger('rollout_trajectory')

NAME = "rollout"
DESCRIPTION = """Simulate the SE(3) controller tracking a trajectory file \
and write a per-tick CSV log for plot."""


def add_arguments(parser):
    parser.add_argument("--traj", required=True, metavar="FILE",
                        help="Trajectory file from plan.")
    parser.add_argument("--out", required=True, metavar="FILE",
                        help="Rollout log (CSV) to write.")
    parser.add_argument("--seed", type=int, default=0,
                        help="Seed of the motor noise.")
    parser.add_argument("--drag", type=script_utils.parse_drag,
                        default=None,
                        help="Drag coefficients dx,dy,dz overriding the "
                        "preset.")
    parser.add_argument("--settle", type=float, default=1.0,
                        help="Hover time after the last waypoint, s.")
    parser.add_argument(
        "--crash-threshold", type=float, default=None,
        help="Stop when the position error exceeds this many metres "
        "(default: fly to the end).")
    script_utils.add_vehicle_arguments(parser)


def rollout_trajectory(args):
    params, gains = script_utils.vehicle_from_args(args, args.drag)
    traj = read_trajectory(args.traj)
    result = run_closed_loop(traj, params, gains,
                             np.random.default_rng(args.seed),
                             settle_time=max(args.settle, 0.0),
                             crash_threshold=args.crash_threshold,
                             record=True)
    write_rollout_log(result.log, args.out)

    message = "Tracking cost %.6g, max position error %.4f m, " \
        "saturated on %.1f%% of ticks" % (
            result.label, result.max_error, 100.0 * result.sat_fraction)
    if result.waypoint_errors:
        message += ", mean waypoint error %.4f m" % np.mean(
            result.waypoint_errors)
    if result.crashed:
        message += " (crashed)"
    return result, "%s. Log saved to %s" % (message, args.out)


def run_script(argv=None):
    """
    The main entry point of the script, when run on its own.
    """
    return script_utils.run_standalone(
        "Rollout_Trajectory.py", DESCRIPTION, add_arguments,
        rollout_trajectory, argv)


if __name__ == "__main__":
    sys.exit(run_script())

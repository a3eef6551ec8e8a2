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
This script plans a trajectory through a waypoint file, either the plain
min-snap solution or, given a trained model, the controller-aware one.
"""

import logging
import sys

from quadlcd.util import script_utils
from quadlcd.util.errors import UsageError
from quadlcd.util.lcd_plan import PlanOptions, plan
from quadlcd.util.minsnap import read_waypoints, snap_cost, solve_minsnap, \
    write_trajectory
from quadlcd.util.track_net import load_model

logger = logging.getLogger('plan_trajectory')

NAME = "plan"
DESCRIPTION = """Plan a trajectory through waypoints ('x y z [yaw]' per \
line). With --model the learned tracking penalty is added to the snap \
cost; without it the min-snap trajectory is written."""


def add_arguments(parser):
    parser.add_argument("--waypoints", required=True, metavar="FILE",
                        help="Waypoint file.")
    parser.add_argument("--model", metavar="FILE", default=None,
                        help="Tracking-cost model from train.")
    parser.add_argument(
        "--lambda", dest="weight", type=float, default=1.0,
        help="Weight of the tracking penalty (default 1). The snap term "
        "is divided by the min-snap cost unless --absolute-snap is given, "
        "so 1 weighs one unit of tracking cost against the min-snap "
        "optimum.")
    parser.add_argument("--vavg", type=float, default=2.0,
                        help="Average speed per segment in m/s (default 2).")
    parser.add_argument("--out", required=True, metavar="FILE",
                        help="Trajectory file to write.")
    parser.add_argument("--max-iter", type=int, default=200,
                        help="Descent iterations (default 200).")
    parser.add_argument(
        "--multistart", type=script_utils.nonnegative_int, default=0,
        help="Extra descents from perturbed starts (e.g. 5).")
    parser.add_argument(
        "--no-fallback", action="store_true",
        help="Fail instead of returning min-snap when the penalty blows "
        "up.")
    parser.add_argument(
        "--absolute-snap", action="store_true",
        help="Use the raw snap cost instead of snap relative to the "
        "min-snap optimum.")
    parser.add_argument(
        "--check-feasibility", action="store_true",
        help="Assert the waypoint constraints at every iterate.")


def plan_options(args):
    try:
        return PlanOptions(
            weight=args.weight, max_iterations=args.max_iter,
            fallback=not args.no_fallback,
            normalize_snap=not args.absolute_snap,
            multistart=args.multistart, debug=args.check_feasibility)
    except ValueError as e:
        raise UsageError(str(e))


def plan_trajectory(args):
    if args.vavg <= 0:
        raise UsageError("--vavg must be > 0")
    wps = read_waypoints(args.waypoints)
    if args.model is None:
        traj = solve_minsnap(wps, args.vavg)
        message = "Min-snap trajectory through %d waypoints, snap cost " \
            "%.6g" % (len(wps), snap_cost(traj))
    else:
        model = load_model(args.model)
        traj, report = plan(wps, args.vavg, model, plan_options(args))
        if report.fallback:
            message = "Penalty not finite, wrote the min-snap trajectory"
        else:
            message = "Planned in %d iterations: snap %.6g -> %.6g, " \
                "predicted tracking cost %.6g -> %.6g" % (
                    report.iterations, report.initial_snap,
                    report.final_snap, report.initial_penalty,
                    report.final_penalty)
    write_trajectory(traj, args.out)
    return traj, "%s. Saved to %s" % (message, args.out)


def run_script(argv=None):
    """
    The main entry point of the script, when run on its own.
    """
    return script_utils.run_standalone(
        "Plan_Trajectory.py", DESCRIPTION, add_arguments, plan_trajectory,
        argv)


if __name__ == "__main__":
    sys.exit(run_script())

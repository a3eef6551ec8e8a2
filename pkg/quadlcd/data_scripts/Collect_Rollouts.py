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
This script samples random waypoint tasks, flies the SE(3) controller along
their min-snap trajectories in simulation and writes one labelled record
per task to a dataset file.
"""

import logging
import sys

from quadlcd.util import script_utils
from quadlcd.util.errors import UsageError
from quadlcd.util.rollout_utils import CollectConfig, collect

logger = logging.getLogger('collect_rollouts')

NAME = "collect"
DESCRIPTION = """Roll out the tracking controller on random min-snap \
trajectories and record the tracking cost of each one."""


def add_arguments(parser):
    parser.add_argument(
        "--tasks", type=script_utils.nonnegative_int, default=5000,
        help="Number of waypoint tasks (default 5000).")
    parser.add_argument(
        "--seed", type=int, default=0,
        help="Master seed; task i uses a seed derived from (seed, i).")
    parser.add_argument(
        "--vavg", type=float, default=2.0,
        help="Average speed per segment in m/s (default 2).")
    parser.add_argument(
        "--drag", type=script_utils.parse_drag, default=None,
        help="Drag coefficients dx,dy,dz overriding the preset.")
    parser.add_argument(
        "--waypoints", type=int, default=4,
        help="Waypoints per task (default 4).")
    parser.add_argument(
        "--crash-threshold", type=float, default=1.5,
        help="Position error in m above which a run counts as crashed.")
    parser.add_argument(
        "--out", required=True, metavar="FILE",
        help="Dataset file to write.")
    script_utils.add_workers_argument(parser)
    script_utils.add_vehicle_arguments(parser)


def collect_rollouts(args):
    params, gains = script_utils.vehicle_from_args(args, args.drag)
    try:
        config = CollectConfig(
            n_tasks=args.tasks, seed=args.seed, n_waypoints=args.waypoints,
            v_avg=args.vavg, params=params, gains=gains,
            crash_threshold=args.crash_threshold, workers=args.workers)
    except ValueError as e:
        raise UsageError(str(e))
    if args.vavg <= 0:
        raise UsageError("--vavg must be > 0")

    logger.info("collecting %d tasks with %d worker(s)", config.n_tasks,
                config.workers)
    written, skipped = collect(config, args.out)
    message = "Wrote %d records to %s" % (written, args.out)
    if skipped:
        message += " (%d tasks skipped, see the skip lines)" % skipped
    return (written, skipped), message


def run_script(argv=None):
    """
    The main entry point of the script, when run on its own.
    """
    return script_utils.run_standalone(
        "Collect_Rollouts.py", DESCRIPTION, add_arguments, collect_rollouts,
        argv)


if __name__ == "__main__":
    sys.exit(run_script())

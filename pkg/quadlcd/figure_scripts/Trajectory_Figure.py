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
This script renders a trajectory, optionally with a rollout log on top, or
the crash rates of an evaluation CSV, to SVG.
"""

import logging
import sys

from quadlcd.util import script_utils
from quadlcd.util.errors import UsageError
from quadlcd.util.eval_utils import crash_rates, read_eval_rows
from quadlcd.util.figure_utils import crash_rate_figure, trajectory_figure
from quadlcd.util.minsnap import read_trajectory
from quadlcd.util.rollout_utils import read_rollout_log

logger = logging.getLogger('trajectory_figure')

NAME = "plot"
DESCRIPTION = """Plot a trajectory file (3D path plus x, y, z and yaw \
against time, reference dotted and executed solid) or the crash rates of \
an evaluation CSV."""


def add_arguments(parser):
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--traj", metavar="FILE",
                        help="Trajectory file from plan.")
    source.add_argument("--eval-csv", metavar="FILE",
                        help="Per-task CSV from eval.")
    parser.add_argument("--rollout", metavar="FILE", default=None,
                        help="Rollout log to overlay on --traj.")
    parser.add_argument("--svg", required=True, metavar="FILE",
                        help="SVG file to write.")
    parser.add_argument("--title", default=None, help="Figure title.")


def make_figure(args):
    if args.eval_csv:
        if args.rollout:
            raise UsageError("--rollout only applies to --traj")
        rows = read_eval_rows(args.eval_csv)
        if not rows:
            raise UsageError("%s has no rows" % args.eval_csv)
        rates = crash_rates(rows)
        crash_rate_figure(rates, args.svg, args.title)
        return rates, "Crash rates of %s saved to %s" % (
            ", ".join(rates), args.svg)

    traj = read_trajectory(args.traj)
    log = read_rollout_log(args.rollout) if args.rollout else None
    trajectory_figure(traj, args.svg, log, args.title)
    return traj, "Trajectory figure saved to %s" % args.svg


def run_script(argv=None):
    """
    The main entry point of the script, when run on its own.
    """
    return script_utils.run_standalone(
        "Trajectory_Figure.py", DESCRIPTION, add_arguments, make_figure,
        argv)


if __name__ == "__main__":
    sys.exit(run_script())

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
The `quadlcd` command: one subcommand per script.

Exit codes: 0 success, 1 usage error, 2 runtime failure.
"""

import sys

from quadlcd.analysis_scripts import Drag_Sweep, Evaluate_Planner
from quadlcd.data_scripts import Collect_Rollouts, Train_Track_Net
from quadlcd.figure_scripts import Trajectory_Figure
from quadlcd.planning_scripts import Plan_Trajectory, Rollout_Trajectory
from quadlcd.util import script_utils

SCRIPTS = (
    (Collect_Rollouts, Collect_Rollouts.collect_rollouts),
    (Train_Track_Net, Train_Track_Net.train_track_net),
    (Plan_Trajectory, Plan_Trajectory.plan_trajectory),
    (Rollout_Trajectory, Rollout_Trajectory.rollout_trajectory),
    (Evaluate_Planner, Evaluate_Planner.evaluate_planner),
    (Drag_Sweep, Drag_Sweep.run_drag_sweep),
    (Trajectory_Figure, Trajectory_Figure.make_figure),
)


def build_parser():
    parser = script_utils.ScriptParser(
        prog="quadlcd",
        description="Quadrotor trajectory planning with a learned "
        "tracking-cost penalty.")
    commands = parser.add_subparsers(dest="command", metavar="COMMAND")
    commands.required = True
    for module, process in SCRIPTS:
        sub = commands.add_parser(module.NAME, help=module.DESCRIPTION,
                                  description=module.DESCRIPTION)
        script_utils.add_logging_arguments(sub)
        module.add_arguments(sub)
        sub.set_defaults(process=process)
    return parser


def cli_main(argv=None):
    if argv is None:
        argv = sys.argv[1:]
    return script_utils.execute(build_parser(), list(argv))


if __name__ == "__main__":
    sys.exit(cli_main())

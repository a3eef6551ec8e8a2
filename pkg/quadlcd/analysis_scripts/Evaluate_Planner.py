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
This script measures crash rates of the min-snap and controller-aware
planners on the same held-out waypoint tasks.
"""

import logging
import sys

from quadlcd.util import script_utils
from quadlcd.util.errors import UsageError
from quadlcd.util.eval_utils import LcdPlanner, MinSnapPlanner, evaluate, \
    write_eval_rows, write_eval_summary
from quadlcd.util.lcd_plan import PlanOptions
from quadlcd.util.rollout_utils import CollectConfig
from quadlcd.util.track_net import load_model

logger = logging.getLogger('evaluate_planner')

NAME = "eval"
DESCRIPTION = """Evaluate planners on held-out waypoint tasks and write one \
CSV row per task and planner. Both planners fly the identical task list."""
PLANNERS = ("minsnap", "lcd", "both")


def add_arguments(parser):
    parser.add_argument(
        "--planner", choices=PLANNERS, default="minsnap",
        help="Planner(s) to evaluate (default minsnap).")
    parser.add_argument(
        "--model", metavar="FILE", default=None,
        help="Tracking-cost model; required for lcd. Also used to fill "
        "label_pred for min-snap rows.")
    parser.add_argument("--lambda", dest="weight", type=float, default=1.0,
                        help="Penalty weight of the lcd planner. The snap "
                        "term is divided by the min-snap cost, so 1 weighs "
                        "one unit of tracking cost against the min-snap "
                        "optimum.")
    parser.add_argument("--tasks", type=script_utils.nonnegative_int,
                        default=50,
                        help="Held-out tasks per planner (default 50).")
    parser.add_argument(
        "--seed", type=int, default=1,
        help="Evaluation seed, drawn from its own namespace so tasks never "
        "coincide with training tasks.")
    parser.add_argument("--vavg", type=float, default=2.0,
                        help="Average speed per segment in m/s (default 2).")
    parser.add_argument("--drag", type=script_utils.parse_drag,
                        default=None,
                        help="Drag coefficients dx,dy,dz overriding the "
                        "preset.")
    parser.add_argument(
        "--crash-threshold", type=float, default=1.5,
        help="Position error in m above which a run counts as crashed.")
    parser.add_argument("--out", metavar="FILE", default="eval.csv",
                        help="Per-task CSV (default eval.csv).")
    parser.add_argument("--summary", metavar="FILE", default=None,
                        help="Optional CSV with one summary row per "
                        "planner.")
    script_utils.add_workers_argument(parser)
    script_utils.add_vehicle_arguments(parser)


def planners_from_args(args):
    model = load_model(args.model) if args.model else None
    names = ("minsnap", "lcd") if args.planner == "both" else (args.planner,)
    if "lcd" in names and model is None:
        raise UsageError("--planner %s needs --model" % args.planner)
    planners = []
    for name in names:
        if name == "minsnap":
            planners.append(MinSnapPlanner())
        else:
            try:
                options = PlanOptions(weight=args.weight)
            except ValueError as e:
                raise UsageError(str(e))
            planners.append(LcdPlanner(model, options))
    return planners, model


def evaluate_planner(args):
    if args.vavg <= 0:
        raise UsageError("--vavg must be > 0")
    params, gains = script_utils.vehicle_from_args(args, args.drag)
    try:
        config = CollectConfig(v_avg=args.vavg, params=params, gains=gains,
                               crash_threshold=args.crash_threshold,
                               workers=args.workers)
    except ValueError as e:
        raise UsageError(str(e))
    planners, model = planners_from_args(args)

    results, rows = [], []
    for planner in planners:
        result, planner_rows = evaluate(planner, args.tasks, args.seed,
                                        params, gains, config, scorer=model)
        results.append(result)
        rows.extend(planner_rows)
    write_eval_rows(rows, args.out)
    if args.summary:
        write_eval_summary(results, args.summary)

    message = "; ".join(
        "%s: %d/%d crashed (%.1f%%)" % (r.planner, r.crashes, r.tasks,
                                        r.crash_rate) for r in results)
    return results, "%s. Rows saved to %s" % (message, args.out)


def run_script(argv=None):
    """
    The main entry point of the script, when run on its own.
    """
    return script_utils.run_standalone(
        "Evaluate_Planner.py", DESCRIPTION, add_arguments, evaluate_planner,
        argv)


if __name__ == "__main__":
    sys.exit(run_script())

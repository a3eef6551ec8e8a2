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
This script repeats the paired planner evaluation over a range of drag
coefficients, by default training a fresh tracking-cost model per setting.
"""

import logging
import sys

from quadlcd.util import script_utils
from quadlcd.util.errors import UsageError
from quadlcd.util.eval_utils import SweepConfig, drag_sweep
from quadlcd.util.lcd_plan import PlanOptions
from quadlcd.util.rollout_utils import CollectConfig
from quadlcd.util.track_net import TrainConfig, load_model

logger = logging.getLogger('drag_sweep')

NAME = "sweep"
DESCRIPTION = """Sweep drag from (0.002, 0.002, 0.007) to (0.008, 0.008, \
0.013) and evaluate both planners at every setting. One CSV row per \
(setting, planner) is written as soon as it is known."""


def add_arguments(parser):
    parser.add_argument("--points", type=int, default=5,
                        help="Evenly spaced drag settings, >= 2 "
                        "(default 5).")
    parser.add_argument(
        "--no-retrain", action="store_true",
        help="Reuse --model at every setting instead of collecting and "
        "training per setting.")
    parser.add_argument("--model", metavar="FILE", default=None,
                        help="Shared model for --no-retrain.")
    parser.add_argument("--train-tasks", type=int, default=5000,
                        help="Rollouts collected per setting (default "
                        "5000).")
    parser.add_argument("--epochs", type=int, default=200,
                        help="Training epochs per setting (default 200).")
    parser.add_argument("--seed", type=int, default=0,
                        help="Master seed of collection and training.")
    parser.add_argument("--eval-tasks", type=int, default=50,
                        help="Held-out tasks per planner and setting.")
    parser.add_argument("--eval-seed", type=int, default=1,
                        help="Evaluation seed.")
    parser.add_argument("--vavg", type=float, default=2.0,
                        help="Average speed per segment in m/s (default 2).")
    parser.add_argument("--lambda", dest="weight", type=float, default=1.0,
                        help="Penalty weight of the lcd planner. The snap "
                        "term is divided by the min-snap cost, so 1 weighs "
                        "one unit of tracking cost against the min-snap "
                        "optimum.")
    parser.add_argument("--data-dir", metavar="DIR", default=None,
                        help="Keep the per-setting datasets here.")
    parser.add_argument("--out", required=True, metavar="FILE",
                        help="Sweep CSV to write.")
    script_utils.add_workers_argument(parser)
    script_utils.add_vehicle_arguments(parser)


def sweep_config(args):
    if args.no_retrain and args.model is None:
        raise UsageError("--no-retrain needs --model")
    if args.vavg <= 0:
        raise UsageError("--vavg must be > 0")
    params, gains = script_utils.vehicle_from_args(args)
    model = load_model(args.model) if args.model else None
    try:
        return SweepConfig(
            points=args.points, retrain=not args.no_retrain,
            collect=CollectConfig(n_tasks=args.train_tasks, seed=args.seed,
                                  v_avg=args.vavg, params=params,
                                  gains=gains, workers=args.workers),
            train=TrainConfig(epochs=args.epochs, seed=args.seed),
            plan=PlanOptions(weight=args.weight), model=model,
            eval_tasks=args.eval_tasks, eval_seed=args.eval_seed,
            data_dir=args.data_dir)
    except ValueError as e:
        raise UsageError(str(e))


def run_drag_sweep(args):
    rows = drag_sweep(sweep_config(args), args.out)
    lines = []
    for row in rows:
        rates = ", ".join("%s %.1f%%" % (r.planner, r.crash_rate)
                          for r in row.results)
        lines.append("drag (%.4g, %.4g, %.4g): %s" % (tuple(row.drag)
                                                      + (rates,)))
    lines.append("Sweep saved to %s" % args.out)
    return rows, "\n".join(lines)


def run_script(argv=None):
    """
    The main entry point of the script, when run on its own.
    """
    return script_utils.run_standalone(
        "Drag_Sweep.py", DESCRIPTION, add_arguments, run_drag_sweep, argv)


if __name__ == "__main__":
    sys.exit(run_script())

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
This script fits the tracking-cost network to a collected dataset and saves
it in the binary model format used by the planner.
"""

import csv
import logging
import sys

import numpy as np

from quadlcd.util import script_utils
from quadlcd.util.errors import IoFailure, UsageError
from quadlcd.util.rollout_utils import load_dataset
from quadlcd.util.track_net import TRANSFORMS, TrainConfig, save_model, \
    train

logger = logging.getLogger('train_track_net')

NAME = "train"
DESCRIPTION = """Train the tracking-cost network on a rollout dataset \
(80/20 train/validation split by default)."""


def add_arguments(parser):
    parser.add_argument(
        "--data", required=True, metavar="FILE",
        help="Dataset written by collect.")
    parser.add_argument(
        "--out", required=True, metavar="FILE",
        help="Model file to write.")
    parser.add_argument("--epochs", type=int, default=200,
                        help="Training epochs (default 200).")
    parser.add_argument("--batch-size", type=int, default=256,
                        help="Minibatch size (default 256).")
    parser.add_argument("--lr", type=float, default=1e-3,
                        help="SGD learning rate (default 1e-3).")
    parser.add_argument("--momentum", type=float, default=0.9,
                        help="SGD momentum (default 0.9).")
    parser.add_argument("--val-fraction", type=float, default=0.2,
                        help="Validation fraction (default 0.2).")
    parser.add_argument("--seed", type=int, default=0,
                        help="Seed for initialization, split and batches.")
    parser.add_argument(
        "--label-transform", choices=TRANSFORMS, default="log1p",
        help="Target transform; predictions are mapped back to cost units.")
    parser.add_argument(
        "--loss-csv", metavar="FILE", default=None,
        help="Optional CSV of the per-epoch train and validation losses.")


def write_losses(report, path):
    try:
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["epoch", "train_loss", "val_loss"])
            for epoch, (tl, vl) in enumerate(zip(report.train_losses,
                                                 report.val_losses)):
                writer.writerow([epoch, "%.9g" % tl, "%.9g" % vl])
    except OSError as e:
        raise IoFailure("cannot write %s: %s" % (path, e))


def train_track_net(args):
    try:
        config = TrainConfig(
            batch_size=args.batch_size, learning_rate=args.lr,
            momentum=args.momentum, epochs=args.epochs,
            validation_fraction=args.val_fraction, seed=args.seed,
            label_transform=args.label_transform)
    except ValueError as e:
        raise UsageError(str(e))

    records, skipped = load_dataset(args.data)
    if skipped:
        logger.info("%d skipped tasks in %s are not used", len(skipped),
                    args.data)
    model, report = train(records, config,
                          np.random.default_rng(config.seed))
    save_model(model, args.out)
    if args.loss_csv:
        write_losses(report, args.loss_csv)

    message = "Trained on %d records: validation loss %.4g -> %.4g, " \
        "spearman %.3f. Model saved to %s" % (
            len(report.train_indices), report.val_losses[0],
            report.val_losses[-1], report.spearman, args.out)
    return model, message


def run_script(argv=None):
    """
    The main entry point of the script, when run on its own.
    """
    return script_utils.run_standalone(
        "Train_Track_Net.py", DESCRIPTION, add_arguments, train_track_net,
        argv)


if __name__ == "__main__":
    sys.exit(run_script())

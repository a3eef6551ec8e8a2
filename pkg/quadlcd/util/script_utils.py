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
Helpers shared by the scripts: argument parsing with quadlcd's exit codes,
vehicle options and logging setup.
"""

import argparse
import logging
import sys

from quadlcd.util.errors import QuadLcdError, UsageError
from quadlcd.util.flatness_control import make_gains
from quadlcd.util.quad_dynamics import make_params, parse_overrides, \
    without_noise

logger = logging.getLogger('quadlcd.script_utils')

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILURE = 2


class ScriptParser(argparse.ArgumentParser):
    """ArgumentParser that raises UsageError instead of exiting."""

    def error(self, message):
        error = UsageError("%s: error: %s" % (self.prog, message))
        error.usage = self.format_usage()
        raise error


def add_logging_arguments(parser):
    group = parser.add_mutually_exclusive_group()
    group.add_argument("-v", "--verbose", action="store_true",
                       help="Log debug detail.")
    group.add_argument("-q", "--quiet", action="store_true",
                       help="Only log warnings and errors.")


def add_vehicle_arguments(parser, noise=True):
    parser.add_argument(
        "--params", metavar="FILE", default=None,
        help="Vehicle and gain file replacing the built-in "
        "crazyflie-default preset.")
    parser.add_argument(
        "--set", metavar="KEY=VALUE", action="append", default=[],
        dest="overrides",
        help="Override one preset entry, e.g. d_x=0.004 or k_x=0.2. "
        "Repeatable.")
    if noise:
        parser.add_argument(
            "--no-motor-noise", action="store_true",
            help="Fly with noise-free rotor commands (sigma_m = 0).")


def add_workers_argument(parser):
    parser.add_argument("--workers", type=int, default=1,
                        help="Worker processes (default 1).")


def parse_drag(text):
    """'dx,dy,dz' to three floats."""
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError("drag must be dx,dy,dz")
    if len(values) != 3 or min(values) < 0:
        raise argparse.ArgumentTypeError(
            "drag must be three nonnegative numbers dx,dy,dz")
    return values


def nonnegative_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("not an integer: '%s'" % text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be >= 0: %d" % value)
    return value


def vehicle_from_args(args, drag=None):
    """(QuadParams, ControlGains) from --params, --set and --drag."""
    overrides = parse_overrides(getattr(args, "overrides", None))
    if drag is not None:
        overrides.update({"d_x": drag[0], "d_y": drag[1], "d_z": drag[2]})
    params = make_params(overrides=overrides, path=args.params)
    gains = make_gains(overrides=overrides, path=args.params)
    if getattr(args, "no_motor_noise", False):
        params = without_noise(params)
    return params, gains


def configure_logging(args):
    level = logging.INFO
    if getattr(args, "verbose", False):
        level = logging.DEBUG
    elif getattr(args, "quiet", False):
        level = logging.WARNING
    logging.basicConfig(
        level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    logging.getLogger().setLevel(level)


def execute(parser, argv, process=None):
    """
    Parse `argv`, run `process(args)` (or args.process) and map the outcome
    to an exit code. `process` returns (result, message); the message is
    printed to standard output.
    """
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        sys.stderr.write(getattr(e, "usage", parser.format_usage()))
        sys.stderr.write("%s\n" % e)
        return EXIT_USAGE
    except SystemExit as e:
        # --help
        return e.code or EXIT_OK
    configure_logging(args)
    process = process or args.process
    try:
        _, message = process(args)
    except UsageError as e:
        sys.stderr.write(parser.format_usage())
        sys.stderr.write("%s\n" % e)
        return EXIT_USAGE
    except (QuadLcdError, OSError) as e:
        logger.error("%s: %s", type(e).__name__, e)
        return EXIT_FAILURE
    if message:
        print(message)
    return EXIT_OK


def run_standalone(name, description, add_arguments, process, argv=None):
    """Entry point of a script module run on its own."""
    parser = ScriptParser(prog=name, description=description)
    add_logging_arguments(parser)
    add_arguments(parser)
    return execute(parser, argv, process)

#!/usr/bin/env python
# -*- coding: utf-8 -*-

#
# Copyright (C) 2024 The quadlcd developers. All rights reserved.
#
# This program is free software; you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation; either version 2 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License along
# with this program; if not, write to the Free Software Foundation, Inc.,
# 51 Franklin Street, Fifth Floor, Boston, MA 02110-1301 USA.

import csv
import logging
import os

import numpy as np
import pytest

from quadlcd.cli import cli_main
from quadlcd.util.minsnap import WaypointSet, write_waypoints
from quadlcd.util.track_net import init_model, save_model


class ScriptTest(object):

    @pytest.fixture(autouse=True)
    def workdir(self, tmp_path):
        self.dir = tmp_path

    def path(self, name):
        return str(self.dir / name)

    def gentle_waypoints(self, name="task.txt"):
        wps = WaypointSet(np.array([[1.0, 1.0, -1.0], [1.8, 1.0, -1.0],
                                    [1.8, 1.7, -1.3], [1.2, 2.1, -1.5]]))
        path = self.path(name)
        write_waypoints(wps, path)
        return path

    def zero_model(self, name="zero.bin", dim=96):
        path = self.path(name)
        save_model(init_model(dim, np.random.default_rng(0)), path)
        return path


def run_script(args):
    """Run `quadlcd <args>` in process and return its exit code."""
    args = [str(a) for a in args]
    logging.debug("quadlcd %s", " ".join(args))
    return cli_main(args)


def check_output_file(path, contains=None):
    assert os.path.isfile(path), "%s was not written" % path
    assert os.path.getsize(path) > 0, "%s is empty" % path
    if contains is not None:
        with open(path) as f:
            assert contains in f.read()


def read_csv_rows(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))

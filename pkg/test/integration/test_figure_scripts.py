#!/usr/bin/env python
# -*- coding: utf-8 -*-

#
# Copyright (C) 2024 The quadlcd developers.
# All rights reserved. Use is subject to license terms supplied in LICENSE.txt
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

"""
   Integration test for figure scripts.
"""

from script import ScriptTest
from script import check_output_file, run_script


class TestFigureScripts(ScriptTest):

    def plan_and_fly(self):
        traj, log = self.path("task.traj"), self.path("run.csv")
        assert run_script(["plan", "--waypoints", self.gentle_waypoints(),
                           "--vavg", 0.5, "--out", traj]) == 0
        assert run_script(["rollout", "--traj", traj, "--out", log,
                           "--settle", 0.2]) == 0
        return traj, log

    def test_trajectory_figure(self):
        traj, log = self.plan_and_fly()
        svg = self.path("fig.svg")
        assert run_script(["plot", "--traj", traj, "--rollout", log,
                           "--svg", svg, "--title", "gentle task"]) == 0
        check_output_file(svg, "<svg")

    def test_reference_only(self):
        traj, _ = self.plan_and_fly()
        svg = self.path("ref.svg")
        assert run_script(["plot", "--traj", traj, "--svg", svg]) == 0
        check_output_file(svg, "<svg")

    def test_crash_rate_figure(self):
        out = self.path("eval.csv")
        assert run_script(["eval", "--tasks", 1, "--vavg", 0.5,
                           "--out", out]) == 0
        svg = self.path("rates.svg")
        assert run_script(["plot", "--eval-csv", out, "--svg", svg]) == 0
        check_output_file(svg, "<svg")

    def test_one_source_only(self):
        traj, _ = self.plan_and_fly()
        assert run_script(["plot", "--traj", traj, "--eval-csv", traj,
                           "--svg", self.path("fig.svg")]) == 1

    def test_rollout_needs_trajectory(self):
        out = self.path("eval.csv")
        assert run_script(["eval", "--tasks", 1, "--vavg", 0.5,
                           "--out", out]) == 0
        assert run_script(["plot", "--eval-csv", out, "--rollout", out,
                           "--svg", self.path("fig.svg")]) == 1

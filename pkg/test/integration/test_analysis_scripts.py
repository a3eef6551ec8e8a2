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
   Integration test for analysis scripts.
"""

from script import ScriptTest
from script import check_output_file, read_csv_rows, run_script
from quadlcd.util.eval_utils import EVAL_COLUMNS, SUMMARY_COLUMNS, \
    SWEEP_COLUMNS


class TestAnalysisScripts(ScriptTest):

    def test_evaluate_minsnap(self):
        out, summary = self.path("eval.csv"), self.path("summary.csv")
        assert run_script(["eval", "--planner", "minsnap", "--tasks", 2,
                           "--seed", 7, "--vavg", 0.5, "--out", out,
                           "--summary", summary]) == 0
        rows = read_csv_rows(out)
        assert tuple(rows[0]) == EVAL_COLUMNS
        assert [r["planner"] for r in rows] == ["minsnap", "minsnap"]
        totals = read_csv_rows(summary)
        assert tuple(totals[0]) == SUMMARY_COLUMNS
        assert totals[0]["tasks"] == "2"
        assert float(totals[0]["crash_rate"]) == 0.0

    def test_evaluate_both_planners(self):
        out = self.path("eval.csv")
        assert run_script(["eval", "--planner", "both", "--model",
                           self.zero_model(), "--tasks", 1, "--vavg", 0.5,
                           "--out", out]) == 0
        rows = read_csv_rows(out)
        assert [r["planner"] for r in rows] == ["minsnap", "lcd"]
        assert rows[0]["task_seed"] == rows[1]["task_seed"]

    def test_lcd_needs_a_model(self):
        assert run_script(["eval", "--planner", "lcd", "--tasks", 1,
                           "--out", self.path("eval.csv")]) == 1

    def test_drag_sweep_without_retraining(self):
        out = self.path("sweep.csv")
        assert run_script(["sweep", "--points", 2, "--no-retrain",
                           "--model", self.zero_model(), "--eval-tasks", 1,
                           "--vavg", 0.5, "--out", out]) == 0
        check_output_file(out)
        rows = read_csv_rows(out)
        assert tuple(rows[0]) == SWEEP_COLUMNS
        assert [(r["d_x"], r["d_z"], r["planner"]) for r in rows] == [
            ("0.002", "0.007", "minsnap"), ("0.002", "0.007", "lcd"),
            ("0.008", "0.013", "minsnap"), ("0.008", "0.013", "lcd")]

    def test_sweep_no_retrain_needs_model(self):
        assert run_script(["sweep", "--no-retrain",
                           "--out", self.path("sweep.csv")]) == 1

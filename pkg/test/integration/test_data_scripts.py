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
   Integration test for data scripts.
"""

import numpy as np

from script import ScriptTest
from script import check_output_file, read_csv_rows, run_script
from quadlcd.util.rollout_utils import DATASET_HEADER, RolloutRecord, \
    format_record, load_dataset
from quadlcd.util.track_net import load_model


def synthetic_dataset(path, n=120):
    """Records with random coefficients and a label that depends on them."""
    rng = np.random.default_rng(3)
    lines = [DATASET_HEADER % (7, 3)]
    for i in range(n):
        c = rng.normal(size=96)
        label = float(np.log1p(np.abs(c[:8]).sum()))
        record = RolloutRecord(i, rng.uniform(0, 10, (4, 3)), np.zeros(4),
                               np.ones(3), c, label, 0.1, False,
                               np.array([0.005, 0.005, 0.01]))
        lines.append(format_record(record))
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


class TestDataScripts(ScriptTest):

    def test_collect(self):
        out = self.path("data.csv")
        assert run_script(["collect", "--tasks", 2, "--seed", 1,
                           "--vavg", 1.0, "--no-motor-noise",
                           "--out", out]) == 0
        check_output_file(out, "QLCD-DATASET v1 n=7 s=3")
        records, skipped = load_dataset(out)
        assert len(records) == 2 and not skipped
        assert np.all(records[0].drag == [0.005, 0.005, 0.010])

    def test_collect_drag_override(self):
        out = self.path("data.csv")
        assert run_script(["collect", "--tasks", 1, "--drag",
                           "0.002,0.002,0.007", "--out", out]) == 0
        records, _ = load_dataset(out)
        assert list(records[0].drag) == [0.002, 0.002, 0.007]

    def test_collect_bad_drag(self):
        assert run_script(["collect", "--tasks", 1, "--drag", "0.1,0.1",
                           "--out", self.path("data.csv")]) == 1

    def test_train(self):
        data = self.path("data.csv")
        synthetic_dataset(data)
        out, losses = self.path("net.bin"), self.path("loss.csv")
        assert run_script(["train", "--data", data, "--out", out,
                           "--epochs", 3, "--batch-size", 32,
                           "--loss-csv", losses]) == 0
        model = load_model(out)
        assert model.dims == [96, 100, 100, 20, 1]
        rows = read_csv_rows(losses)
        assert [r["epoch"] for r in rows] == ["0", "1", "2", "3"]

    def test_train_needs_enough_records(self):
        data = self.path("data.csv")
        synthetic_dataset(data, n=50)
        assert run_script(["train", "--data", data,
                           "--out", self.path("net.bin")]) == 2

    def test_train_missing_dataset(self):
        assert run_script(["train", "--data", self.path("none.csv"),
                           "--out", self.path("net.bin")]) == 2

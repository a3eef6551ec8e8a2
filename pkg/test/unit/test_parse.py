#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
   Test that every script builds its parser and answers --help
   Copyright 2024 The quadlcd developers. All rights reserved.
   Use is subject to license terms supplied in LICENSE.txt
"""

import importlib
import os

import pytest

from quadlcd.cli import SCRIPTS, build_parser, cli_main

PACKAGE = os.path.join(os.path.dirname(__file__), "..", "..", "quadlcd")


def official_scripts():
    for category in sorted(os.listdir(PACKAGE)):
        if not category.endswith("_scripts"):
            continue
        for name in sorted(os.listdir(os.path.join(PACKAGE, category))):
            if name.endswith(".py") and not name.startswith("_"):
                yield "quadlcd.%s.%s" % (category, name[:-3])


class TestParse(object):

    def test_parse_all_official_scripts(self, capsys):
        names = list(official_scripts())
        assert len(names) == len(SCRIPTS)
        for name in names:
            module = importlib.import_module(name)
            try:
                assert module.run_script(["--help"]) == 0
            except Exception as e:
                assert False, "%s\n%s" % (name, e)
            assert module.NAME in [m.NAME for m, _ in SCRIPTS]
        capsys.readouterr()

    @pytest.mark.parametrize("command", [m.NAME for m, _ in SCRIPTS])
    def test_subcommand_help(self, command, capsys):
        assert cli_main([command, "--help"]) == 0
        assert command in capsys.readouterr().out

    def test_top_level_help(self, capsys):
        assert cli_main(["--help"]) == 0
        out = capsys.readouterr().out
        for module, _ in SCRIPTS:
            assert module.NAME in out

    @pytest.mark.parametrize("argv", [[], ["fly"], ["plan"],
                                      ["collect", "--tasks", "-3"]])
    def test_usage_errors(self, argv, capsys):
        assert cli_main(argv) == 1
        assert "usage:" in capsys.readouterr().err

    def test_every_command_is_registered(self):
        parser = build_parser()
        args = parser.parse_args(["plan", "--waypoints", "w.txt",
                                  "--out", "p.traj"])
        assert args.process.__name__ == "plan_trajectory"

    @pytest.mark.parametrize("command", ["plan", "eval", "sweep"])
    def test_lambda_help_names_the_snap_scale(self, command, capsys):
        assert cli_main([command, "--help"]) == 0
        text = "".join(capsys.readouterr().out.split())
        assert "dividedbythemin-snapcost" in text

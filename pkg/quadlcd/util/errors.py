#!/usr/bin/env python
# -*- coding: utf-8 -*-

# -----------------------------------------------------------------------------
#   Copyright (C) 2024 The quadlcd developers. All rights reserved.

#   This program is free software; you can redistribute it and/or modify
#   it under the terms of the GNU General Public License as published by
#   the Free Software Foundation; either version 2 of the License, or
#   (at your option) any later version.
# ------------------------------------------------------------------------------

"""
Exceptions raised by the quadlcd utilities and scripts.

Scripts catch QuadLcdError at the top level and turn it into exit code 2,
UsageError into exit code 1.
"""


class QuadLcdError(Exception):
    """Base class of every error raised by quadlcd."""


class UsageError(QuadLcdError):
    """Bad command-line input."""


# quad-dynamics
class NonFiniteState(QuadLcdError):
    """Simulator state blew up (NaN or Inf). The rollout must be aborted."""


class UnknownPreset(QuadLcdError):
    pass


class InvalidOverride(QuadLcdError):
    """A parameter override violates the vehicle or gain invariants."""


# flatness-control
class OutOfDomain(QuadLcdError):
    """Trajectory evaluated outside [0, T_total]."""


class FlatnessSingularity(QuadLcdError):
    """Desired acceleration cancels gravity, thrust direction undefined."""


# minsnap
class DegenerateSegment(QuadLcdError):
    pass


class RankDeficiency(QuadLcdError):
    pass


class SingularKkt(QuadLcdError):
    pass


# track-net / lcd-plan
class DimensionMismatch(QuadLcdError):
    pass


class InsufficientData(QuadLcdError):
    pass


class NonFiniteLoss(QuadLcdError):
    """Training diverged; usually the learning rate is too high."""


class NonFiniteObjective(QuadLcdError):
    pass


# files
class FormatVersionMismatch(QuadLcdError):
    pass


class ShapeCorruption(QuadLcdError):
    """File content does not have the expected structure."""


class IoFailure(QuadLcdError):
    pass


# data-pipeline
class SamplingExhausted(QuadLcdError):
    pass

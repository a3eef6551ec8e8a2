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
Controller-aware planning: snap cost plus the learned tracking penalty,
minimized over the affine set A c = b.

Feasible coefficients are written c = scale * (c_p + N z) with N an
orthonormal null-space basis of the column-scaled constraints. Descent runs
in y, where z = sqrt(J0) L^-T y and L L^T = N^T H N, so the snap term has
Hessian 2 I and the first trial step of 0.5 is the exact minimizer of the
quadratic part.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import LinAlgError, cholesky, qr, solve_triangular

from quadlcd.util.errors import DimensionMismatch, NonFiniteObjective
from quadlcd.util.minsnap import ORDER, PiecewiseTrajectory, check_rank, \
    qp_system, solve_kkt, time_allocation
from quadlcd.util.track_net import forward, input_gradient

logger = logging.getLogger('quadlcd.lcd_plan')

FEASIBILITY_TOL = 1e-8
MAX_BACKTRACKS = 40


@dataclass
class PlanOptions:
    weight: float = 1.0
    max_iterations: int = 200
    step_init: float = 0.5
    backtracking: float = 0.5
    armijo: float = 1e-4
    tolerance: float = 1e-6
    patience: int = 5
    fallback: bool = True
    normalize_snap: bool = True
    multistart: int = 0
    multistart_std: float = 0.1
    seed: int = 0
    debug: bool = False

    def __post_init__(self):
        if not self.weight >= 0:
            raise ValueError("weight must be >= 0")
        if not (self.tolerance > 0 and self.step_init > 0
                and 0 < self.backtracking < 1):
            raise ValueError("tolerance and step_init must be > 0, "
                             "backtracking in (0, 1)")


@dataclass
class NullspaceChart:
    particular: np.ndarray
    basis: np.ndarray


@dataclass
class PlanReport:
    iterations: int = 0
    objective: list = field(default_factory=list)
    initial_snap: float = float("nan")
    initial_penalty: float = float("nan")
    final_snap: float = float("nan")
    final_penalty: float = float("nan")
    snap_scale: float = 1.0
    fallback: bool = False


def nullspace_chart(A, b):
    """
    Least-norm solution of A c = b and an orthonormal basis of null(A),
    from a QR factorization of A^T.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    check_rank(A)
    m = A.shape[0]
    q, r = qr(A.T)
    y = solve_triangular(r[:m, :m].T, np.asarray(b, dtype=float),
                         lower=True)
    return NullspaceChart(q[:, :m] @ y, q[:, m:])


class _Objective(object):
    """phi(y) = snap(c) / J0 + weight * g(c) in the whitened chart."""

    def __init__(self, system, chart, model, opts, snap_scale):
        self.system = system
        self.scale = system.scale
        self.hs = system.H * np.outer(system.scale, system.scale)
        self.chart = chart
        self.model = model
        self.weight = opts.weight
        self.snap_scale = snap_scale
        basis = chart.basis
        k = basis.T @ self.hs @ basis
        try:
            self.chol = cholesky(k, lower=True) if k.size else k
        except LinAlgError:
            logger.warning("snap Hessian on the null space is not positive "
                           "definite; descending without preconditioning")
            self.chol = np.eye(len(k))
        self.root = np.sqrt(snap_scale)

    def z_of(self, y):
        return self.root * solve_triangular(self.chol.T, y, lower=False)

    def y_of(self, c_hat):
        z = self.chart.basis.T @ (c_hat - self.chart.particular)
        return self.chol.T @ z / self.root

    def coefficients(self, y):
        return self.scale * (self.chart.particular
                             + self.chart.basis @ self.z_of(y))

    def terms(self, c):
        c_hat = c / self.scale
        snap = float(c_hat @ self.hs @ c_hat)
        penalty = forward(self.model, c)
        if not (np.isfinite(snap) and np.isfinite(penalty)):
            raise NonFiniteObjective("objective is not finite "
                                     "(snap=%s, penalty=%s)"
                                     % (snap, penalty))
        return snap, penalty

    def value(self, c):
        snap, penalty = self.terms(c)
        return snap / self.snap_scale + self.weight * penalty

    def gradient(self, y):
        c = self.coefficients(y)
        c_hat = c / self.scale
        grad_chat = 2.0 * (self.hs @ c_hat) / self.snap_scale
        if self.weight > 0:
            grad_chat = grad_chat + self.weight * self.scale \
                * input_gradient(self.model, c)
        grad_z = self.chart.basis.T @ grad_chat
        return self.root * solve_triangular(self.chol, grad_z, lower=True)


def _descend(obj, y, opts, check=None):
    """
    Gradient descent with Armijo backtracking from y.

    :return: (best coefficients, best objective, objective history,
              iterations)
    """
    c_best = obj.coefficients(y)
    phi = phi_best = obj.value(c_best)
    history = [phi]
    stall = 0
    iterations = 0
    for iterations in range(1, opts.max_iterations + 1):
        grad = obj.gradient(y)
        g2 = float(grad @ grad)
        if g2 == 0.0:
            break
        t = opts.step_init
        for _ in range(MAX_BACKTRACKS):
            y_new = y - t * grad
            c_new = obj.coefficients(y_new)
            phi_new = obj.value(c_new)
            if phi_new <= phi - opts.armijo * t * g2:
                break
            t *= opts.backtracking
        else:
            logger.debug("line search stalled at iteration %d", iterations)
            break
        if check is not None:
            check(c_new)
        decrease = phi - phi_new
        y, phi = y_new, phi_new
        history.append(phi)
        if phi < phi_best:
            phi_best, c_best = phi, c_new
        stall = stall + 1 if decrease < opts.tolerance * (1 + abs(phi)) \
            else 0
        if stall >= opts.patience:
            break
    return c_best, phi_best, history, iterations


def plan(wps, v_avg, model, opts=None):
    """
    Trajectory through `wps` minimizing snap plus weight times the learned
    tracking penalty, started from the min-snap solution.

    :return: (PiecewiseTrajectory, PlanReport)
    """
    opts = opts or PlanOptions()
    durations = time_allocation(wps, v_avg)
    system = qp_system(wps, durations, ORDER)
    if model.input_dim != system.H.shape[0]:
        raise DimensionMismatch(
            "model takes %d coefficients, %d waypoints need %d"
            % (model.input_dim, len(wps), system.H.shape[0]))
    c_ms, _ = solve_kkt(system)
    minsnap = PiecewiseTrajectory(ORDER, durations, c_ms)
    report = PlanReport()

    snap0 = float(c_ms @ system.H @ c_ms)
    snap_scale = snap0 if opts.normalize_snap and snap0 > 0 else 1.0
    report.snap_scale = snap_scale
    chart = nullspace_chart(system.A * system.scale, system.b)

    def feasible(c):
        residual = np.max(np.abs(system.A @ c - system.b))
        assert residual < FEASIBILITY_TOL, \
            "iterate left the constraint set (%g)" % residual

    try:
        obj = _Objective(system, chart, model, opts, snap_scale)
        report.initial_snap, report.initial_penalty = obj.terms(c_ms)
        if chart.basis.shape[1] == 0:
            report.final_snap = report.initial_snap
            report.final_penalty = report.initial_penalty
            return minsnap, report

        y0 = obj.y_of(c_ms / system.scale)
        c_best = c_ms
        phi_best = obj.value(c_ms)
        report.objective = [phi_best]
        starts = [y0]
        if opts.multistart > 0:
            rng = np.random.default_rng(opts.seed)
            starts += [y0 + opts.multistart_std * rng.normal(size=len(y0))
                       for _ in range(opts.multistart)]
        check = feasible if opts.debug else None
        for n, y_start in enumerate(starts):
            c, phi, history, iterations = _descend(obj, y_start, opts, check)
            report.iterations += iterations
            if n == 0:
                report.objective = history
            if phi < phi_best:
                c_best, phi_best = c, phi
        report.final_snap, report.final_penalty = obj.terms(c_best)
    except NonFiniteObjective as e:
        if not opts.fallback:
            raise
        logger.warning("planner fell back to min-snap: %s", e)
        report.fallback = True
        return minsnap, report

    logger.debug("plan: %d iterations, snap %.4g -> %.4g, penalty "
                 "%.4g -> %.4g", report.iterations, report.initial_snap,
                 report.final_snap, report.initial_penalty,
                 report.final_penalty)
    return PiecewiseTrajectory(ORDER, durations, c_best), report

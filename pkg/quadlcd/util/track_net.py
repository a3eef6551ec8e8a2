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
Small ReLU network mapping trajectory coefficients to the tracking cost of
the fixed controller, with forward, input-gradient and training passes
written directly in numpy.

Inputs are standardized with training-split statistics; labels are fitted
as log1p(cost) and mapped back with expm1 at inference, floored at 0.
"""

import logging
import struct
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import spearmanr

from quadlcd.util.errors import DimensionMismatch, FormatVersionMismatch, \
    InsufficientData, IoFailure, NonFiniteLoss, ShapeCorruption

logger = logging.getLogger('quadlcd.track_net')

HIDDEN = (100, 100, 20)
MAGIC = b"QLCD"
FORMAT_VERSION = 1
MIN_RECORDS = 100
TRANSFORMS = ("log1p", "none")


@dataclass
class TrackNetModel:
    weights: list
    biases: list
    mu: np.ndarray
    sigma: np.ndarray
    log_label: bool = True
    version: int = FORMAT_VERSION

    @property
    def dims(self):
        return [self.weights[0].shape[1]] + [w.shape[0] for w in self.weights]

    @property
    def input_dim(self):
        return self.weights[0].shape[1]


@dataclass
class TrainConfig:
    batch_size: int = 256
    learning_rate: float = 1e-3
    momentum: float = 0.9
    epochs: int = 200
    validation_fraction: float = 0.2
    seed: int = 0
    label_transform: str = "log1p"
    hidden: tuple = HIDDEN

    def __post_init__(self):
        if not 0.0 < self.validation_fraction < 1.0:
            raise ValueError("validation_fraction must be in (0, 1)")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be > 0")
        if self.label_transform not in TRANSFORMS:
            raise ValueError("label_transform must be one of %s"
                             % (TRANSFORMS,))


@dataclass
class TrainReport:
    train_losses: list = field(default_factory=list)
    val_losses: list = field(default_factory=list)
    spearman: float = float("nan")
    train_indices: np.ndarray = None
    val_indices: np.ndarray = None


def init_model(input_dim, rng, hidden=HIDDEN, log_label=True):
    """He-initialised hidden layers, zero output layer."""
    dims = [input_dim] + list(hidden) + [1]
    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        weights.append(rng.normal(0.0, np.sqrt(2.0 / fan_in),
                                  (fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    weights[-1][:] = 0.0
    return TrackNetModel(weights, biases, np.zeros(input_dim),
                         np.ones(input_dim), log_label)


def _check_input(model, x):
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != model.input_dim:
        raise DimensionMismatch("model takes %d inputs, got %d"
                                % (model.input_dim, x.shape[-1]))
    return x


def _pass(model, z):
    """Pre-activations of every layer for a batch of normalized inputs."""
    pre, act = [], z
    last = len(model.weights) - 1
    for l, (w, b) in enumerate(zip(model.weights, model.biases)):
        a = act @ w.T + b
        pre.append(a)
        if l < last:
            act = np.maximum(a, 0.0)
    return pre


def _to_cost(model, out):
    if model.log_label:
        return np.maximum(np.expm1(out), 0.0)
    return np.maximum(out, 0.0)


def predict(model, X):
    """Cost estimates for a batch of raw coefficient vectors."""
    X = _check_input(model, np.atleast_2d(X))
    out = _pass(model, (X - model.mu) / model.sigma)[-1][:, 0]
    return _to_cost(model, out)


def forward(model, raw_coefficients):
    x = _check_input(model, raw_coefficients).reshape(-1)
    return float(predict(model, x[None, :])[0])


def input_gradient(model, raw_coefficients):
    """
    d forward / d raw input by backpropagation. ReLU kinks and the output
    floor take subgradient 0.
    """
    x = _check_input(model, raw_coefficients).reshape(-1)
    pre = _pass(model, ((x - model.mu) / model.sigma)[None, :])
    out = pre[-1][0, 0]
    if out <= 0.0:
        return np.zeros_like(x)
    delta = np.array([[np.exp(out) if model.log_label else 1.0]])
    for l in range(len(model.weights) - 1, -1, -1):
        if l < len(model.weights) - 1:
            delta = delta * (pre[l] > 0.0)
        delta = delta @ model.weights[l]
    return delta[0] / model.sigma


def _batch_gradients(model, z, target):
    """MSE loss and its weight / bias gradients on one mini-batch."""
    pre = _pass(model, z)
    acts = [z] + [np.maximum(a, 0.0) for a in pre[:-1]]
    err = pre[-1][:, 0] - target
    loss = float(np.mean(err ** 2))
    delta = (2.0 / len(target)) * err[:, None]
    gw, gb = [None] * len(pre), [None] * len(pre)
    for l in range(len(pre) - 1, -1, -1):
        gw[l] = delta.T @ acts[l]
        gb[l] = delta.sum(axis=0)
        if l > 0:
            delta = (delta @ model.weights[l]) * (pre[l - 1] > 0.0)
    return loss, gw, gb


def _mse(model, z, target):
    return float(np.mean((_pass(model, z)[-1][:, 0] - target) ** 2))


def split(dataset, fraction, rng):
    """
    Seeded permutation split.

    :param dataset: a sized collection or a record count
    :return: (train indices, validation indices)
    """
    if not 0.0 < fraction < 1.0:
        raise ValueError("fraction must be in (0, 1), got %s" % fraction)
    n = dataset if isinstance(dataset, (int, np.integer)) else len(dataset)
    perm = rng.permutation(n)
    n_val = int(np.floor(fraction * n + 0.5))
    if n >= 2:
        n_val = min(max(n_val, 1), n - 1)
    return perm[n_val:], perm[:n_val]


def train_arrays(X, labels, config, rng, indices=None):
    """
    Fit a model on coefficient rows X and nonnegative cost labels.

    :param indices: optional (train, validation) index split; drawn from
                    `rng` when not given.
    :return: (model, TrainReport)
    """
    X = np.asarray(X, dtype=float)
    labels = np.asarray(labels, dtype=float)
    if len(X) < MIN_RECORDS:
        raise InsufficientData("need at least %d records, got %d"
                               % (MIN_RECORDS, len(X)))
    if not (np.all(np.isfinite(labels)) and np.all(labels >= 0)):
        raise InsufficientData("labels must be finite and >= 0")
    if indices is None:
        indices = split(len(X), config.validation_fraction, rng)
    train_idx, val_idx = indices

    log_label = config.label_transform == "log1p"
    target = np.log1p(labels) if log_label else labels.copy()
    mu = X[train_idx].mean(axis=0)
    sigma = X[train_idx].std(axis=0)
    flat = sigma <= 1e-12
    if np.any(flat):
        logger.debug("%d constant input dimensions, using sigma=1",
                     int(flat.sum()))
    sigma[flat] = 1.0

    model = init_model(X.shape[1], rng, config.hidden, log_label)
    model.mu, model.sigma = mu, sigma
    model.biases[-1][:] = target[train_idx].mean()
    z = (X - mu) / sigma
    z_train, t_train = z[train_idx], target[train_idx]
    z_val, t_val = z[val_idx], target[val_idx]

    report = TrainReport(train_indices=np.asarray(train_idx),
                         val_indices=np.asarray(val_idx))
    report.train_losses.append(_mse(model, z_train, t_train))
    report.val_losses.append(_mse(model, z_val, t_val))
    vw = [np.zeros_like(w) for w in model.weights]
    vb = [np.zeros_like(b) for b in model.biases]
    lr, beta = config.learning_rate, config.momentum
    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(len(z_train))
        for start in range(0, len(order), config.batch_size):
            batch = order[start:start + config.batch_size]
            _, gw, gb = _batch_gradients(model, z_train[batch],
                                         t_train[batch])
            for l in range(len(model.weights)):
                vw[l] = beta * vw[l] - lr * gw[l]
                vb[l] = beta * vb[l] - lr * gb[l]
                model.weights[l] += vw[l]
                model.biases[l] += vb[l]
        train_loss = _mse(model, z_train, t_train)
        val_loss = _mse(model, z_val, t_val)
        if not (np.isfinite(train_loss) and np.isfinite(val_loss)):
            raise NonFiniteLoss("loss diverged at epoch %d; lower the "
                                "learning rate" % epoch)
        report.train_losses.append(train_loss)
        report.val_losses.append(val_loss)
        logger.debug("epoch %d: train %.6g val %.6g", epoch, train_loss,
                     val_loss)

    pred = predict(model, X[val_idx])
    if len(val_idx) > 1 and np.ptp(pred) > 0 and np.ptp(labels[val_idx]) > 0:
        report.spearman = float(spearmanr(pred, labels[val_idx])[0])
    logger.info("trained on %d records: val loss %.4g -> %.4g, "
                "spearman %.3f", len(train_idx), report.val_losses[0],
                report.val_losses[-1], report.spearman)
    return model, report


def train(dataset, config, rng):
    """Fit the tracking-cost model on a list of RolloutRecord."""
    if len(dataset) < MIN_RECORDS:
        raise InsufficientData("need at least %d records, got %d"
                               % (MIN_RECORDS, len(dataset)))
    X = np.array([r.coefficients for r in dataset])
    labels = np.array([r.label for r in dataset])
    return train_arrays(X, labels, config, rng)


# binary model files

def model_to_bytes(model):
    parts = [MAGIC, struct.pack("<II", model.version, len(model.weights))]
    for w, b in zip(model.weights, model.biases):
        parts.append(struct.pack("<II", *w.shape))
        parts.append(np.ascontiguousarray(w, dtype="<f8").tobytes())
        parts.append(np.ascontiguousarray(b, dtype="<f8").tobytes())
    parts.append(np.asarray(model.mu, dtype="<f8").tobytes())
    parts.append(np.asarray(model.sigma, dtype="<f8").tobytes())
    parts.append(struct.pack("<B", 1 if model.log_label else 0))
    return b"".join(parts)


class _Reader(object):

    def __init__(self, data):
        self.data = data
        self.pos = 0

    def take(self, size):
        if self.pos + size > len(self.data):
            raise ShapeCorruption("model file is truncated")
        chunk = self.data[self.pos:self.pos + size]
        self.pos += size
        return chunk

    def unpack(self, fmt):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))

    def floats(self, count):
        return np.frombuffer(self.take(8 * count), dtype="<f8").astype(float)


def model_from_bytes(data):
    reader = _Reader(data)
    if reader.take(4) != MAGIC:
        raise ShapeCorruption("not a model file (bad magic)")
    version, layers = reader.unpack("<II")
    if version != FORMAT_VERSION:
        raise FormatVersionMismatch("model format %d, expected %d"
                                    % (version, FORMAT_VERSION))
    if not 1 <= layers <= 64:
        raise ShapeCorruption("implausible layer count %d" % layers)
    weights, biases = [], []
    for _ in range(layers):
        rows, cols = reader.unpack("<II")
        if weights and cols != weights[-1].shape[0]:
            raise ShapeCorruption("layer shapes do not chain")
        weights.append(reader.floats(rows * cols).reshape(rows, cols))
        biases.append(reader.floats(rows))
    if weights[-1].shape[0] != 1:
        raise ShapeCorruption("output layer must have one unit")
    dim = weights[0].shape[1]
    mu = reader.floats(dim)
    sigma = reader.floats(dim)
    flag = reader.unpack("<B")[0]
    if reader.pos != len(data) or flag not in (0, 1):
        raise ShapeCorruption("trailing or invalid bytes in model file")
    if not np.all(sigma > 0):
        raise ShapeCorruption("normalization std must be positive")
    return TrackNetModel(weights, biases, mu, sigma, bool(flag), version)


def save_model(model, path):
    try:
        with open(path, "wb") as f:
            f.write(model_to_bytes(model))
    except OSError as e:
        raise IoFailure("cannot write %s: %s" % (path, e))


def load_model(path):
    try:
        with open(path, "rb") as f:
            data = f.read()
    except OSError as e:
        raise IoFailure("cannot read %s: %s" % (path, e))
    return model_from_bytes(data)

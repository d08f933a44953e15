#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# Licensed under the GNU LGPL v2.1 - http://www.gnu.org/licenses/lgpl.html

"""Multi-level dilated convolution over word annotations.

A stack of unpadded one-dimensional convolutions with per-layer dilation rates turns n word
annotations into m = n - span + 1 semantic units, unit j covering annotations j .. j + span - 1
with span = 1 + (K - 1) * sum(rates).

Stacked dilations with common factors leave holes in that coverage (gridding). A schedule is
checked through its M-sequence, the maximum distance between two nonzero taps seen from each
layer: M_N = r_N and, going down,

    M_i = max(M_{i+1} - 2 r_i, M_{i+1} - 2 (M_{i+1} - r_i), r_i)

and it is accepted iff M_2 <= K.

Examples
--------
>>> from etikettr.models.mdc import validate_schedule, receptive_span
>>> validate_schedule(3, [1, 2, 3])
([1, 2, 3], True)
>>> validate_schedule(3, [2, 4, 8])
([2, 4, 8], False)
>>> receptive_span(3, [1, 2, 3])
13

"""

import logging

import numpy as np

from etikettr import tensor as T
from etikettr.models.encoder import Memory


logger = logging.getLogger(__name__)


class ScheduleError(ValueError):
    """A dilation schedule rejected for gridding; `m_sequence` holds the offending M-sequence."""

    def __init__(self, kernel_size, rates, m_sequence):
        self.kernel_size = kernel_size
        self.rates = list(rates)
        self.m_sequence = list(m_sequence)
        super(ScheduleError, self).__init__(
            "dilation rates %s with kernel size %d leave coverage holes: M-sequence %s, M_2 = %d > K = %d" % (
                self.rates, kernel_size, self.m_sequence, self.m_sequence[1], kernel_size)
        )


def _check(kernel_size, rates):
    rates = [int(r) for r in rates]
    if kernel_size < 2:
        raise ValueError("kernel size must be >= 2, got %d" % kernel_size)
    if not rates:
        raise ValueError("need at least one dilation rate")
    if min(rates) < 1:
        raise ValueError("dilation rates must be positive, got %s" % rates)
    return rates


def m_sequence(rates):
    """The M-sequence [M_1 .. M_N] of `rates`."""
    M = [0] * len(rates)
    M[-1] = rates[-1]
    for i in range(len(rates) - 2, -1, -1):
        nxt = M[i + 1]
        M[i] = max(nxt - 2 * rates[i], nxt - 2 * (nxt - rates[i]), rates[i])
    return M


def validate_schedule(kernel_size, rates):
    """Compute the M-sequence of a schedule and whether it is free of gridding.

    Returns
    -------
    (list of int, bool)
        The M-sequence, and True iff M_2 <= `kernel_size`. A single layer cannot grid and is
        always accepted.

    Raises
    ------
    ValueError
        If a rate is below 1 or `kernel_size` < 2.

    """
    rates = _check(kernel_size, rates)
    M = m_sequence(rates)
    accepted = len(M) < 2 or M[1] <= kernel_size
    return M, accepted


def receptive_span(kernel_size, rates):
    """Number of consecutive inputs feeding one output of the stack: 1 + (K - 1) * sum(rates)."""
    rates = _check(kernel_size, rates)
    return 1 + (kernel_size - 1) * sum(rates)


class DilationSchedule(object):
    """Kernel size and per-layer dilation rates of the convolution stack."""

    def __init__(self, kernel_size, rates):
        self.rates = _check(kernel_size, rates)
        self.kernel_size = int(kernel_size)

    def __len__(self):
        return len(self.rates)

    def __repr__(self):
        return "DilationSchedule(K=%d, rates=%s)" % (self.kernel_size, self.rates)

    @property
    def m_sequence(self):
        return m_sequence(self.rates)

    @property
    def span(self):
        return receptive_span(self.kernel_size, self.rates)

    def validate(self):
        """Return self, or raise :class:`ScheduleError` if the schedule grids."""
        M, accepted = validate_schedule(self.kernel_size, self.rates)
        if not accepted:
            raise ScheduleError(self.kernel_size, self.rates, M)
        logger.debug("accepted %s with M-sequence %s", self, M)
        return self


class SemanticUnits(Memory):
    """High-level representations g_1 .. g_m of each example.

    Attributes
    ----------
    values : Tensor, shape (B, M, H)
    lengths : numpy.ndarray of int
        Number m of valid units per example, always >= 1.
    source_lengths : numpy.ndarray of int
        Number n of word annotations they were computed from.

    """
    def __init__(self, values, lengths, source_lengths):
        super(SemanticUnits, self).__init__(values, lengths)
        self.source_lengths = np.asarray(source_lengths, dtype=np.int64)


def initialize_mdc(params, prefix, schedule, input_size, hidden_size, random_state, scale, dtype=np.float64):
    """Draw kernels (K, C_in, H) and biases (H,) of every layer into `params`.

    The first layer maps `input_size` channels to `hidden_size`, later ones keep `hidden_size`.

    Returns
    -------
    list of (Tensor, Tensor)

    """
    layers = []
    channels = input_size
    for layer in range(len(schedule)):
        kernel_key, bias_key = '%s.%d.kernel' % (prefix, layer), '%s.%d.bias' % (prefix, layer)
        params[kernel_key] = T.uniform(
            (schedule.kernel_size, channels, hidden_size), random_state, scale, dtype=dtype, name=kernel_key)
        params[bias_key] = T.uniform((hidden_size,), random_state, scale, dtype=dtype, name=bias_key)
        layers.append((params[kernel_key], params[bias_key]))
        channels = hidden_size
    return layers


def mdc_layers(params, prefix, schedule):
    return [(params['%s.%d.kernel' % (prefix, layer)], params['%s.%d.bias' % (prefix, layer)])
            for layer in range(len(schedule))]


def mdc_forward(annotations, schedule, layers):
    """Semantic units of `annotations`.

    Each layer is a dilated convolution plus bias followed by relu. Sequences shorter than the
    receptive span are right-padded with zero vectors to the span first, giving one unit.

    Parameters
    ----------
    annotations : {:class:`~etikettr.models.encoder.Memory`, Tensor}
        Padded batch, or the (n, 2H) annotations of a single example.
    schedule : :class:`DilationSchedule`
    layers : list of (Tensor, Tensor)
        Kernel (K, C_in, H) and bias (H,) of each layer.

    Returns
    -------
    :class:`SemanticUnits`
        m = max(n, span) - span + 1 units per example.

    """
    if isinstance(annotations, Memory):
        values, lengths = annotations.values, annotations.lengths
    else:
        values = annotations
        if values.ndim == 2:
            values = T.reshape(values, (1,) + values.shape)
        lengths = np.full(values.shape[0], values.shape[1], dtype=np.int64)
    if len(layers) != len(schedule):
        raise ValueError("mdc_forward: %d layers for %d dilation rates" % (len(layers), len(schedule)))
    for (kernel, _), rate in zip(layers, schedule.rates):
        if kernel.shape[0] != schedule.kernel_size:
            raise T.ShapeError("mdc_forward(rate=%d)" % rate, kernel.shape, (schedule.kernel_size,))

    span = schedule.span
    B, width, C = values.shape
    if width < span:
        pad = T.constant(np.zeros((B, span - width, C)), like=values)
        values = T.concat([values, pad], axis=1)

    x = values
    for (kernel, bias), rate in zip(layers, schedule.rates):
        x = T.relu(T.add(T.dilated_conv1d(x, kernel, rate), bias))

    units = np.maximum(lengths, span) - span + 1
    if units.max() < x.shape[1]:
        x = T.slice(x, 0, int(units.max()), axis=1)
    mask = np.arange(x.shape[1])[np.newaxis, :] < units[:, np.newaxis]
    if not mask.all():
        zeros = T.constant(np.zeros(x.shape), like=x)
        x = T.where(np.repeat(mask[:, :, np.newaxis], x.shape[2], axis=2), x, zeros)
    return SemanticUnits(x, units, lengths)

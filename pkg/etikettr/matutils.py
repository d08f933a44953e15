#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# Licensed under the GNU LGPL v2.1 - http://www.gnu.org/licenses/lgpl.html

"""
This module contains numpy helper functions shared by the corpus, model and metrics code.
"""

import logging

import numpy as np


logger = logging.getLogger(__name__)


def argsort(x, topn=None, reverse=False):
    """
    Return indices of the `topn` smallest elements in array `x`, in ascending order.

    If reverse is True, return the greatest elements instead, in descending order.
    Equal elements keep their index order.

    """
    x = np.asarray(x)  # unify code path for when `x` is not a np array (list, tuple...)
    if topn is None:
        topn = x.size
    if topn <= 0:
        return np.empty(0, dtype=np.int64)
    if reverse:
        x = -x
    return np.argsort(x, kind='mergesort')[:topn]


def pad_sequences(sequences, fill=0, dtype=np.int64, length=None):
    """Pack variable-length integer sequences into a row-per-sequence matrix.

    Parameters
    ----------
    sequences : list of sequence of int
    fill : int, optional
        Value written past each sequence's end.
    dtype : numpy.dtype, optional
    length : int, optional
        Width of the result; defaults to the longest sequence.

    Returns
    -------
    (numpy.ndarray, numpy.ndarray)
        The (len(sequences), length) matrix and the true lengths.

    """
    lengths = np.array([len(seq) for seq in sequences], dtype=np.int64)
    if length is None:
        length = int(lengths.max()) if len(lengths) else 0
    elif len(lengths) and lengths.max() > length:
        raise ValueError("sequence of length %d does not fit width %d" % (lengths.max(), length))
    out = np.full((len(sequences), length), fill, dtype=dtype)
    for i, seq in enumerate(sequences):
        out[i, :len(seq)] = seq
    return out, lengths


def length_mask(lengths, width):
    """Boolean (len(lengths), width) matrix, True at positions before each length."""
    lengths = np.asarray(lengths, dtype=np.int64)
    return np.arange(width)[np.newaxis, :] < lengths[:, np.newaxis]


def masked_argmax(scores, blocked=None):
    """Row-wise argmax of `scores` ignoring entries where `blocked` is True.

    Ties go to the lowest index. A row with every entry blocked returns -1.

    """
    scores = np.asarray(scores)
    if blocked is not None:
        scores = np.where(blocked, -np.inf, scores)
    best = np.argmax(scores, axis=-1)
    if blocked is not None:
        best = np.where(np.all(blocked, axis=-1), -1, best)
    return best


def ids2binary(id_sets, size):
    """Indicator matrix with one row per id set: out[i, j] == 1 iff j in id_sets[i].

    Raises
    ------
    ValueError
        If an id falls outside [0, size).

    """
    out = np.zeros((len(id_sets), size), dtype=np.int8)
    for i, ids in enumerate(id_sets):
        ids = np.fromiter(ids, dtype=np.int64)
        if ids.size and (ids.min() < 0 or ids.max() >= size):
            raise ValueError("label id outside [0, %d) in set %r" % (size, sorted(ids.tolist())))
        out[i, ids] = 1
    return out

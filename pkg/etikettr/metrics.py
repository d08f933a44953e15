#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# Licensed under the GNU LGPL v2.1 - http://www.gnu.org/licenses/lgpl.html

"""Multi-label evaluation: Hamming loss, micro-averaged precision/recall/F1 and frequency bands.

Predictions and gold labels are binary matrices with one row per document and one column per
label id; column j is label id j of the :class:`~etikettr.corpora.labeldictionary.LabelVocabulary`,
so columns are ordered by descending training frequency.

Examples
--------
>>> import numpy as np
>>> from etikettr.metrics import hamming_loss, micro_prf
>>> gold = np.array([[1, 1, 0, 0], [0, 1, 0, 0]])
>>> pred = np.array([[1, 0, 0, 0], [0, 1, 1, 0]])
>>> hamming_loss(pred, gold)
0.25
>>> micro_prf(pred, gold)
(0.6666666666666666, 0.6666666666666666, 0.6666666666666666)

"""

from collections import OrderedDict
import logging

import numpy as np

from etikettr import matutils


logger = logging.getLogger(__name__)

DEFAULT_BANDS = (10, 20, 30, 40, 50, 60)


def to_binary(ids, num_labels):
    """Indicator row of length `num_labels` with ones exactly at `ids`.

    Raises
    ------
    ValueError
        If an id is outside [0, num_labels) or repeated.

    """
    ids = list(ids)
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate label ids in %s" % ids)
    return matutils.ids2binary([ids], num_labels)[0]


def to_binary_matrix(id_sets, num_labels):
    """Stack :func:`to_binary` rows of several label id sets."""
    return np.vstack([to_binary(ids, num_labels) for ids in id_sets]) if len(id_sets) \
        else np.zeros((0, num_labels), dtype=np.int8)


def _check_shapes(pred, gold):
    pred, gold = np.asarray(pred), np.asarray(gold)
    if pred.shape != gold.shape or pred.ndim != 2:
        raise ValueError("prediction matrix %s and gold matrix %s differ in shape" % (pred.shape, gold.shape))
    return pred.astype(bool), gold.astype(bool)


def hamming_loss(pred, gold):
    """Mean over documents of the fraction of label columns predicted wrongly."""
    pred, gold = _check_shapes(pred, gold)
    if pred.size == 0:
        logger.warning("hamming loss of an empty matrix, returning 0")
        return 0.0
    return float(np.mean(np.mean(pred != gold, axis=1)))


def _ratio(numerator, denominator, what):
    if denominator == 0:
        logger.warning("%s has an empty denominator, returning 0", what)
        return 0.0
    return numerator / denominator


def micro_prf(pred, gold):
    """Micro-averaged precision, recall and F1, pooling true/false positives/negatives over all labels.

    Returns
    -------
    (float, float, float)
        Zero for an empty denominator (with a warning).

    """
    pred, gold = _check_shapes(pred, gold)
    tp = int(np.sum(pred & gold))
    fp = int(np.sum(pred & ~gold))
    fn = int(np.sum(~pred & gold))
    precision = _ratio(tp, tp + fp, "micro precision")
    recall = _ratio(tp, tp + fn, "micro recall")
    f1 = _ratio(2.0 * tp, 2.0 * tp + fp + fn, "micro F1")
    return precision, recall, f1


def band_micro_f1(pred, gold, labelvocab, k):
    """Micro-F1 over the labels left after removing the `k` most frequent ones.

    Parameters
    ----------
    labelvocab : :class:`~etikettr.corpora.labeldictionary.LabelVocabulary`
        Gives the frequency rank of each column (column id == rank).
    k : int

    Raises
    ------
    ValueError
        If `k` is not in [0, number of labels).

    """
    pred, gold = _check_shapes(pred, gold)
    num_labels = len(labelvocab)
    if pred.shape[1] != num_labels:
        raise ValueError("matrices have %d columns, label vocabulary %d labels" % (pred.shape[1], num_labels))
    if not 0 <= k < num_labels:
        raise ValueError("band cut k=%d must lie in [0, %d)" % (k, num_labels))
    return micro_prf(pred[:, k:], gold[:, k:])[2]


class EvalReport(object):
    """Hamming loss, micro precision/recall/F1, and micro-F1 per frequency band.

    Attributes
    ----------
    hl, p, r, f1 : float
    band_f1 : OrderedDict of (int, float)
        Excluded-top-k -> micro-F1 of the remaining labels.

    """
    def __init__(self, hl, p, r, f1, band_f1=None):
        self.hl, self.p, self.r, self.f1 = hl, p, r, f1
        self.band_f1 = OrderedDict(band_f1 or ())

    def as_record(self):
        """Flat record with keys hl, p, r, f1, band_f1_k<k>..."""
        record = OrderedDict([('hl', self.hl), ('p', self.p), ('r', self.r), ('f1', self.f1)])
        for k, value in self.band_f1.items():
            record['band_f1_k%d' % k] = value
        return record

    def to_text(self):
        """``key = value`` lines of :meth:`as_record`."""
        return "".join("%s = %.6f\n" % item for item in self.as_record().items())

    def __eq__(self, other):
        return isinstance(other, EvalReport) and self.as_record() == other.as_record()

    def __ne__(self, other):
        return not self == other

    def __repr__(self):
        return "EvalReport(%s)" % ", ".join("%s=%.4f" % item for item in self.as_record().items())


def default_bands(num_labels):
    """The cuts 10, 20, ..., 60 that leave at least one label."""
    return [k for k in DEFAULT_BANDS if k < num_labels]


def evaluate_sets(pred_sets, gold_sets, labelvocab, bands=()):
    """Score predicted label id sets against gold ones.

    Parameters
    ----------
    pred_sets, gold_sets : list of iterable of int
        Label ids per document, EOS excluded.
    labelvocab : :class:`~etikettr.corpora.labeldictionary.LabelVocabulary`
    bands : iterable of int, optional
        Cuts for :func:`band_micro_f1`.

    Returns
    -------
    :class:`EvalReport`

    """
    if len(pred_sets) != len(gold_sets):
        raise ValueError("%d predictions for %d gold label sets" % (len(pred_sets), len(gold_sets)))
    L = len(labelvocab)
    pred = to_binary_matrix(pred_sets, L)
    gold = to_binary_matrix(gold_sets, L)
    p, r, f1 = micro_prf(pred, gold)
    band_f1 = OrderedDict((k, band_micro_f1(pred, gold, labelvocab, k)) for k in bands)
    return EvalReport(hamming_loss(pred, gold), p, r, f1, band_f1)

#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# Licensed under the GNU LGPL v2.1 - http://www.gnu.org/licenses/lgpl.html

"""
This module implements LabelVocabulary -- the mapping between label names and output ids.

Ids follow descending training-set frequency, so sorting a label set by id puts its most
frequent label first. The end-of-sequence label takes the id right after the last real label.

Examples
--------
>>> from etikettr.corpora.labeldictionary import permute_labels
>>> labelvocab = permute_labels({'sports': 9, 'youth': 5, 'art': 5})
>>> labelvocab.id2label
['sports', 'art', 'youth']
>>> labelvocab.encode(['youth', 'sports'])
[0, 2, 3]

"""

from collections.abc import Mapping
import logging

from etikettr import utils


logger = logging.getLogger(__name__)

EOS_LABEL = '</s>'


class LabelVocabulary(utils.SaveLoad, Mapping):
    """Frequency-ordered label ids with the EOS label appended last.

    Behaves as a read-only mapping id -> label name over the real labels (EOS excluded).

    Attributes
    ----------
    id2label : list of str
    label2id : dict of (str, int)
    counts : list of int
        Exact training-set frequency of each label, aligned with `id2label`.
    eos_id : int
        Equals the number of real labels.

    """
    def __init__(self, labels, counts):
        if len(labels) != len(counts):
            raise ValueError("got %d labels but %d counts" % (len(labels), len(counts)))
        self.id2label = list(labels)
        self.counts = [int(c) for c in counts]
        self.label2id = {label: labelid for labelid, label in enumerate(self.id2label)}
        if len(self.label2id) != len(self.id2label):
            raise ValueError("duplicate label names")

    @property
    def eos_id(self):
        return len(self.id2label)

    @property
    def bos_id(self):
        """Input-only id fed to the decoder before the first label."""
        return len(self.id2label) + 1

    @property
    def num_outputs(self):
        """Size of the output distribution: real labels plus EOS."""
        return len(self.id2label) + 1

    def __getitem__(self, labelid):
        return self.id2label[labelid]

    def __iter__(self):
        return iter(range(len(self.id2label)))

    def __len__(self):
        return len(self.id2label)

    def __str__(self):
        return "LabelVocabulary(%i labels: %s%s)" % (
            len(self), self.id2label[:5], '...' if len(self) > 5 else ''
        )

    def frequency(self, labelid):
        return self.counts[labelid]

    def known(self, labels):
        """Ids of the known labels among `labels`, deduplicated and ascending."""
        return sorted({self.label2id[label] for label in labels if label in self.label2id})

    def encode(self, labels):
        """Gold label sequence for a label set: known ids ascending, then EOS."""
        return self.known(labels) + [self.eos_id]

    def decode(self, ids):
        """Label names of `ids`, stopping at EOS."""
        names = []
        for labelid in ids:
            if labelid == self.eos_id:
                break
            names.append(self.id2label[labelid])
        return names


def permute_labels(label_counts):
    """Order labels by descending training-set frequency.

    Parameters
    ----------
    label_counts : dict of (str, int)
        Training-set count of every label.

    Returns
    -------
    :class:`LabelVocabulary`
        Ties broken ascending-lexicographic.

    Raises
    ------
    ValueError
        If there are no labels or a count is below 1.

    """
    if not label_counts:
        raise ValueError("cannot order an empty label set")
    for label, count in label_counts.items():
        if count < 1:
            raise ValueError("label %r has count %d, expected >= 1" % (label, count))
    ranked = sorted(label_counts.items(), key=lambda item: (-item[1], item[0]))
    labelvocab = LabelVocabulary([label for label, _ in ranked], [count for _, count in ranked])
    logger.info("ordered %s by frequency", labelvocab)
    return labelvocab

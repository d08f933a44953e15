#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# Licensed under the GNU LGPL v2.1 - http://www.gnu.org/licenses/lgpl.html

"""
This module contains basic interfaces used throughout the whole etikettr package.

The interfaces are realized as abstract base classes (ie., some optional functionality
is provided in the interface itself, so that the interfaces can be subclassed).
"""

import logging

from etikettr import utils


logger = logging.getLogger(__name__)


class CorpusABC(utils.SaveLoad):
    """
    Interface (abstract base class) for labeled corpora. A *corpus* is simply an iterable,
    where each iteration step yields one document:

    >>> for text, labels in corpus:
    >>>     # do something with the doc...

    A document is a `(text, labels)` 2-tuple: the raw whitespace-tokenizable text and
    the list of its label names.

    Saving the corpus with the `save` method (inherited from `utils.SaveLoad`) will
    only store the *in-memory* (binary, pickled) object representation, and **not**
    necessarily the documents in their file format. See the `save_corpus` static method
    for serializing the actual stream content.
    """

    def __iter__(self):
        """
        Iterate over the corpus, yielding one document at a time.
        """
        raise NotImplementedError('cannot instantiate abstract base class')

    def __len__(self):
        """
        Return the number of documents in the corpus.
        """
        raise NotImplementedError("must override __len__() before calling len(corpus)")

    @staticmethod
    def save_corpus(fname, corpus):
        """
        Save an existing `corpus` (any iterable of `(text, labels)`) to disk.
        """
        raise NotImplementedError('cannot instantiate abstract base class')

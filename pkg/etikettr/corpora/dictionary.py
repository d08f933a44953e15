#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# Licensed under the GNU LGPL v2.1 - http://www.gnu.org/licenses/lgpl.html


"""
This module implements the concept of Vocabulary -- a mapping between normalized tokens and
their integer ids, capped to the most frequent training tokens.

The first five ids are reserved and never reassigned:

======  =========  ==================================
id      surface    meaning
======  =========  ==================================
0       ``<pad>``  padding past a sequence's end
1       ``UNK``    any token outside the vocabulary
2       ``#``      any token made only of digits
3       ``<s>``    begin of sequence
4       ``</s>``   end of sequence
======  =========  ==================================

Examples
--------
>>> from etikettr.corpora.dictionary import build_vocab
>>> vocab = build_vocab(["a b a", "b c"], cap=7)
>>> vocab.doc2idx(["a", "b", "c", "zebra", "#"])
[5, 6, 1, 1, 2]

"""

from collections import Counter
from collections.abc import Mapping
import itertools
import logging

from etikettr import utils
from etikettr.parsing.preprocessing import preprocess_string, NUM_TOKEN, UNK_TOKEN


logger = logging.getLogger(__name__)

PAD_ID, UNK_ID, NUM_ID, BOS_ID, EOS_ID = 0, 1, 2, 3, 4
RESERVED_TOKENS = ('<pad>', UNK_TOKEN, NUM_TOKEN, '<s>', '</s>')
MIN_CAP = len(RESERVED_TOKENS) + 1


class Vocabulary(utils.SaveLoad, Mapping):
    """
    Vocabulary encapsulates the mapping between normalized tokens and their integer ids.

    Behaves as a read-only mapping id -> token. The main functions are `doc2idx`, which converts
    tokens to ids (out-of-vocabulary tokens map to :const:`UNK_ID`), and its inverse `idx2doc`.

    Attributes
    ----------
    token2id : dict of (str, int)
    id2token : list of str
    cfs : dict of (int, int)
        Training-set collection frequency of every non-reserved id.

    """
    def __init__(self, tokens=(), cfs=None):
        """Create a vocabulary holding the reserved tokens followed by `tokens`, in id order."""
        self.id2token = list(RESERVED_TOKENS)
        self.token2id = {token: tokenid for tokenid, token in enumerate(self.id2token)}
        self.cfs = {}
        for token in tokens:
            if token in self.token2id:
                raise ValueError("token %r appears twice or clashes with a reserved token" % token)
            self.token2id[token] = len(self.id2token)
            self.id2token.append(token)
        if cfs is not None:
            self.cfs = {self.token2id[token]: int(freq) for token, freq in cfs.items() if token in self.token2id}

    def __getitem__(self, tokenid):
        return self.id2token[tokenid]

    def __iter__(self):
        return iter(range(len(self.id2token)))

    def __len__(self):
        """Number of ids, reserved ones included."""
        return len(self.id2token)

    def __str__(self):
        some_keys = list(itertools.islice(self.id2token[len(RESERVED_TOKENS):], 5))
        return "Vocabulary(%i unique tokens: %s%s)" % (len(self), some_keys, '...' if len(self) > 10 else '')

    def doc2idx(self, document):
        """Convert `document` (a list of normalized tokens) into a list of ids.

        Raises
        ------
        TypeError
            If `document` is a single string.

        """
        if isinstance(document, str):
            raise TypeError("doc2idx expects an array of unicode tokens on input, not a single string")
        token2id = self.token2id
        return [token2id.get(token, UNK_ID) for token in document]

    def idx2doc(self, ids):
        """Inverse of :meth:`doc2idx`; substituted tokens come back as ``UNK`` and ``#``."""
        return [self.id2token[tokenid] for tokenid in ids]

    def encode(self, text):
        """Tokenize raw `text` and convert it to ids."""
        return self.doc2idx(preprocess_string(text))

    def decode(self, ids):
        """Space-joined surface form of `ids`."""
        return " ".join(self.idx2doc(ids))


def build_vocab(texts, cap):
    """Build a :class:`Vocabulary` from training texts.

    Parameters
    ----------
    texts : iterable of {str, list of str}
        Raw texts, or texts already run through :func:`~etikettr.parsing.preprocessing.preprocess_string`.
    cap : int
        Maximum vocabulary size, reserved ids included.

    Returns
    -------
    :class:`Vocabulary`
        The reserved ids followed by the `cap - 5` most frequent tokens. Ties in frequency are
        broken ascending-lexicographic.

    Raises
    ------
    ValueError
        If `cap` < 6 or `texts` is empty.

    """
    if cap < MIN_CAP:
        raise ValueError("vocabulary cap must be >= %d, got %d" % (MIN_CAP, cap))
    counts = Counter()
    num_docs = 0
    for docno, text in enumerate(texts):
        if isinstance(text, str):
            text = preprocess_string(text)
        counts.update(text)
        num_docs += 1
        if docno % 10000 == 0:
            logger.debug("counting tokens in document #%i", docno)
    if not num_docs:
        raise ValueError("cannot build a vocabulary from an empty set of texts")
    for token in RESERVED_TOKENS:
        counts.pop(token, None)

    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    kept = ranked[:cap - len(RESERVED_TOKENS)]
    vocab = Vocabulary([token for token, _ in kept], cfs=dict(kept))
    logger.info(
        "built %s from %i documents, keeping %i of %i distinct tokens",
        vocab, num_docs, len(kept), len(counts)
    )
    return vocab

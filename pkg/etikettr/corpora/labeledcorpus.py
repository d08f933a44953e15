#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# Licensed under the GNU LGPL v2.1 - http://www.gnu.org/licenses/lgpl.html

"""
Corpus in the line-delimited JSON format, and its conversion into padded training batches.

Every line of a corpus file is one object with the fields ``text`` (whitespace-tokenizable
string) and ``labels`` (list of label names)::

    {"text": "bovo ka lirema tofu", "labels": ["topic_03", "topic_07"]}

Examples
--------
>>> from etikettr.corpora.labeledcorpus import LabeledCorpus, encode_corpus, make_batches
>>> corpus = LabeledCorpus('train.jsonl')
>>> vocab, labelvocab = corpus.build_vocabularies(cap=2000)
>>> examples = encode_corpus(corpus, vocab, labelvocab)
>>> batches = make_batches(examples, batch_size=64, shuffle_seed=1)

"""

from collections import Counter, OrderedDict
import json
import logging

import numpy as np

from etikettr import interfaces, matutils, utils
from etikettr.corpora.dictionary import build_vocab, PAD_ID
from etikettr.corpora.labeldictionary import permute_labels
from etikettr.parsing.preprocessing import preprocess_string


logger = logging.getLogger(__name__)

MAX_LEN = 500


class LabeledCorpus(interfaces.CorpusABC):
    """Corpus of `(text, labels)` documents, read from a JSON lines file or held in memory.

    Parameters
    ----------
    fname : str, optional
        Path to a corpus file (may be compressed, see `smart_open`).
    records : iterable of (str, list of str), optional
        In-memory documents, used when `fname` is None.

    """
    def __init__(self, fname=None, records=None):
        if fname is None and records is None:
            raise ValueError("either fname or records must be given")
        self.fname = fname
        if fname is None:
            self.records = [(text, list(labels)) for text, labels in records]
        else:
            self.records = list(self._read(fname))
            logger.info("loaded %i documents from %s", len(self.records), fname)

    @staticmethod
    def _read(fname):
        with utils.file_or_filename(fname, mode='rb') as fin:
            for lineno, line in enumerate(fin, start=1):
                line = utils.to_unicode(line).strip()
                if not line:
                    continue
                try:
                    record = json.loads(line)
                    text, labels = record['text'], record['labels']
                except (ValueError, KeyError, TypeError) as err:
                    raise ValueError("%s:%d: malformed corpus record: %s" % (fname, lineno, err))
                if not isinstance(text, str) or not isinstance(labels, list):
                    raise ValueError("%s:%d: expected a string text and a list of labels" % (fname, lineno))
                yield text, [str(label) for label in labels]

    def __iter__(self):
        return iter(self.records)

    def __len__(self):
        return len(self.records)

    def __getitem__(self, docno):
        return self.records[docno]

    @staticmethod
    def save_corpus(fname, corpus):
        """Write `(text, labels)` documents to `fname`, one JSON object per line.

        Identical input gives byte-identical output.

        """
        logger.info("storing corpus in JSON lines format to %s", fname)
        num_docs = 0
        with utils.file_or_filename(fname, mode='wb') as fout:
            for text, labels in corpus:
                record = OrderedDict([('text', text), ('labels', list(labels))])
                fout.write(utils.to_utf8(json.dumps(record, ensure_ascii=False, sort_keys=False) + "\n"))
                num_docs += 1
        return num_docs

    def label_counts(self):
        """Number of documents carrying each label."""
        counts = Counter()
        for _, labels in self.records:
            counts.update(set(labels))
        return counts

    def build_vocabularies(self, cap):
        """Token vocabulary (capped at `cap`) and frequency-ordered label vocabulary of this corpus."""
        vocab = build_vocab((text for text, _ in self.records), cap)
        labelvocab = permute_labels(self.label_counts())
        return vocab, labelvocab

    def statistics(self):
        """Summary of the corpus.

        Returns
        -------
        OrderedDict
            `documents`, `mean_tokens`, `label_cardinality` (mean labels per document) and
            `label_frequencies` (label -> document count, most frequent first).

        """
        lengths = [len(preprocess_string(text)) for text, _ in self.records]
        cardinality = [len(set(labels)) for _, labels in self.records]
        counts = self.label_counts()
        return OrderedDict([
            ('documents', len(self.records)),
            ('mean_tokens', float(np.mean(lengths)) if lengths else 0.0),
            ('label_cardinality', float(np.mean(cardinality)) if cardinality else 0.0),
            ('label_frequencies', OrderedDict(sorted(counts.items(), key=lambda item: (-item[1], item[0])))),
        ])


class Example(object):
    """One encoded document.

    Attributes
    ----------
    token_ids : numpy.ndarray of int
        Length n >= 1.
    label_ids : numpy.ndarray of int
        Gold label ids in ascending id order (descending frequency), terminated by the EOS label.

    """
    __slots__ = ('token_ids', 'label_ids')

    def __init__(self, token_ids, label_ids):
        self.token_ids = np.asarray(token_ids, dtype=np.int64)
        self.label_ids = np.asarray(label_ids, dtype=np.int64)

    def __len__(self):
        return len(self.token_ids)

    @property
    def labels(self):
        """Gold label ids without the EOS terminator."""
        return self.label_ids[:-1]

    def __repr__(self):
        return "Example(%i tokens, labels %s)" % (len(self.token_ids), self.labels.tolist())


def encode_example(text, labels, vocab, labelvocab, max_len=MAX_LEN, truncate=False):
    """Convert one document to an :class:`Example`.

    Parameters
    ----------
    text : str
    labels : list of str
        Unknown label names are ignored.
    vocab : :class:`~etikettr.corpora.dictionary.Vocabulary`
    labelvocab : :class:`~etikettr.corpora.labeldictionary.LabelVocabulary`
    max_len : int, optional
        Documents with more tokens are skipped.
    truncate : bool, optional
        Cut overlong documents to `max_len` tokens instead of skipping them.

    Returns
    -------
    :class:`Example` or None
        None (the skip marker) for an overlong document or one with no known label.

    Raises
    ------
    ValueError
        If `text` has no tokens.

    """
    tokens = preprocess_string(text)
    if not tokens:
        raise ValueError("document has no tokens: %r" % text)
    if len(tokens) > max_len:
        if not truncate:
            logger.debug("skipping document of %i > %i tokens", len(tokens), max_len)
            return None
        tokens = tokens[:max_len]
    label_ids = labelvocab.encode(labels)
    if len(label_ids) == 1:
        logger.warning("skipping document without known labels: %r", labels)
        return None
    return Example(vocab.doc2idx(tokens), label_ids)


def encode_corpus(corpus, vocab, labelvocab, max_len=MAX_LEN):
    """Encode every document of `corpus`, dropping skipped ones.

    Returns
    -------
    list of :class:`Example`

    """
    examples = []
    skipped = 0
    for text, labels in corpus:
        example = encode_example(text, labels, vocab, labelvocab, max_len=max_len)
        if example is None:
            skipped += 1
        else:
            examples.append(example)
    if skipped:
        logger.warning("skipped %i of %i documents (too long or without known labels)", skipped, skipped + len(examples))
    logger.info("encoded %i documents", len(examples))
    return examples


class Batch(object):
    """Padded examples.

    Attributes
    ----------
    tokens : numpy.ndarray of int, shape (B, T)
        Token ids, :const:`~etikettr.corpora.dictionary.PAD_ID` past each true length.
    lengths : numpy.ndarray of int, shape (B,)
    labels : numpy.ndarray of int, shape (B, S)
        Gold label sequences including EOS, padded with EOS.
    label_lengths : numpy.ndarray of int, shape (B,)
        Gold sequence lengths including EOS.

    """
    def __init__(self, examples, eos_id=None):
        if not examples:
            raise ValueError("cannot build an empty batch")
        self.examples = list(examples)
        self.tokens, self.lengths = matutils.pad_sequences([ex.token_ids for ex in self.examples], fill=PAD_ID)
        if eos_id is None:
            eos_id = int(self.examples[0].label_ids[-1])
        self.labels, self.label_lengths = matutils.pad_sequences([ex.label_ids for ex in self.examples], fill=eos_id)

    def __len__(self):
        return len(self.examples)

    @property
    def label_mask(self):
        return matutils.length_mask(self.label_lengths, self.labels.shape[1])

    def __repr__(self):
        return "Batch(%i examples, %i x %i tokens)" % (len(self), self.tokens.shape[0], self.tokens.shape[1])


def make_batches(examples, batch_size, shuffle_seed):
    """Split `examples` into length-bucketed batches.

    Examples are shuffled, stably sorted by length (ties keep the shuffled order) and cut into
    consecutive batches of `batch_size`; the order of the batches is then shuffled again.

    Parameters
    ----------
    examples : list of :class:`Example`
    batch_size : int
    shuffle_seed : {int, tuple of int}
        Seed of the `batching` random stream, e.g. `(seed, epoch)`.

    Returns
    -------
    list of :class:`Batch`
        Every example appears in exactly one batch.

    """
    if not examples:
        raise ValueError("cannot batch an empty list of examples")
    if batch_size < 1:
        raise ValueError("batch_size must be positive, got %d" % batch_size)
    rng = utils.get_random_state(shuffle_seed, 'batching')
    order = rng.permutation(len(examples))
    lengths = np.array([len(examples[i]) for i in order])
    order = order[matutils.argsort(lengths)]
    chunks = [order[start:start + batch_size] for start in range(0, len(order), batch_size)]
    return [Batch([examples[i] for i in chunks[c]]) for c in rng.permutation(len(chunks))]

#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# Licensed under the GNU LGPL v2.1 - http://www.gnu.org/licenses/lgpl.html

"""Synthetic multi-label corpus with planted phrases.

Every topic owns a private sub-vocabulary of pseudo-words and a few signature phrases drawn from
it. A document's label set is a small set of topics; each of them contributes one complete
signature phrase, embedded at a random position among noise tokens. Noise tokens come from a
shared filler vocabulary, or with probability `noise_rate` from a random topic's private
vocabulary, so single words are weak evidence and only contiguous phrases identify a topic.

Topic frequencies decay geometrically (weight `decay` ** k for the k-th topic), giving the long
tail the frequency-band evaluation needs. Topics in the same block of four attract each other
(`cooccurrence` times more likely to be drawn together), so label sets have structure a sequence
decoder can exploit.

Examples
--------
>>> from etikettr.corpora.synthetic import SyntheticConfig, generate_synthetic
>>> texts, label_sets = generate_synthetic(SyntheticConfig(topics=5, corpus_size=10), seed=1)
>>> len(texts)
10

"""

from collections import OrderedDict
import json
import logging
import os

import numpy as np

from etikettr import utils
from etikettr.config import KeyValueConfig
from etikettr.corpora.labeledcorpus import LabeledCorpus


logger = logging.getLogger(__name__)

CONSONANTS = 'bdfgklmnprstvz'
VOWELS = 'aeiou'
BLOCK_SIZE = 4
SPLITS = (('train', 0.8), ('dev', 0.1), ('test', 0.1))


class SyntheticConfig(KeyValueConfig):
    """Settings of the synthetic corpus generator."""
    schema = (
        ('topics', 'int', 20),
        ('phrases_per_topic', 'int', 3),
        ('phrase_len_min', 'int', 3),
        ('phrase_len_max', 'int', 5),
        ('noise_rate', 'float', 0.1),
        ('doc_len_min', 'int', 20),
        ('doc_len_max', 'int', 60),
        ('corpus_size', 'int', 2000),
        ('decay', 'float', 0.8),
        ('max_labels', 'int', 4),
        ('cooccurrence', 'float', 3.0),
        ('topic_vocab_size', 'int', 30),
        ('filler_vocab_size', 'int', 300),
    )

    def validate(self):
        """Raise ValueError for settings that cannot produce a corpus."""
        if self.topics < 2:
            raise ValueError("need at least 2 topics, got %d" % self.topics)
        if not 1 <= self.phrase_len_min <= self.phrase_len_max:
            raise ValueError("need 1 <= phrase_len_min <= phrase_len_max, got %d and %d" % (
                self.phrase_len_min, self.phrase_len_max))
        if self.doc_len_min < self.phrase_len_max:
            raise ValueError("doc_len_min %d is shorter than the longest signature phrase (%d)" % (
                self.doc_len_min, self.phrase_len_max))
        if self.doc_len_max < self.doc_len_min:
            raise ValueError("doc_len_max %d < doc_len_min %d" % (self.doc_len_max, self.doc_len_min))
        if not 0.0 <= self.noise_rate <= 1.0:
            raise ValueError("noise_rate must lie in [0, 1], got %g" % self.noise_rate)
        if not 0.0 < self.decay <= 1.0:
            raise ValueError("decay must lie in (0, 1], got %g" % self.decay)
        if not 1 <= self.max_labels <= self.topics:
            raise ValueError("max_labels must lie in [1, topics], got %d" % self.max_labels)
        if self.cooccurrence < 1.0:
            raise ValueError("cooccurrence must be >= 1, got %g" % self.cooccurrence)
        for name in ('phrases_per_topic', 'corpus_size', 'topic_vocab_size', 'filler_vocab_size'):
            if getattr(self, name) < 1:
                raise ValueError("%s must be positive, got %d" % (name, getattr(self, name)))
        return self


def topic_name(topic):
    return "topic_%02d" % topic


def pseudo_words(count, random_state, exclude=()):
    """`count` distinct pronounceable pseudo-words of two or three consonant-vowel syllables."""
    words, seen = [], set(exclude)
    while len(words) < count:
        syllables = random_state.randint(2, 4)
        word = "".join(
            CONSONANTS[random_state.randint(len(CONSONANTS))] + VOWELS[random_state.randint(len(VOWELS))]
            for _ in range(syllables)
        )
        if word not in seen:
            seen.add(word)
            words.append(word)
    return words


class SyntheticGenerator(object):
    """Planted-phrase corpus generator.

    Parameters
    ----------
    config : :class:`SyntheticConfig`
    seed : int
        Root seed; everything is drawn from its `generation` stream.

    Attributes
    ----------
    topic_vocab : list of list of str
        Private sub-vocabulary of each topic.
    filler_vocab : list of str
    signatures : list of list of list of str
        Signature phrases (token lists) of each topic.
    weights : numpy.ndarray
        Marginal topic weights, `decay` ** k.

    """
    def __init__(self, config, seed):
        self.config = config.validate()
        self.seed = seed
        self.random_state = utils.get_random_state(seed, 'generation')
        rng = self.random_state

        words = pseudo_words(config.topics * config.topic_vocab_size + config.filler_vocab_size, rng)
        size = config.topic_vocab_size
        self.topic_vocab = [words[t * size:(t + 1) * size] for t in range(config.topics)]
        self.filler_vocab = words[config.topics * size:]
        self.signatures = [self._draw_phrases(vocab) for vocab in self.topic_vocab]
        self.weights = config.decay ** np.arange(config.topics, dtype=np.float64)

        blocks = np.arange(config.topics) // BLOCK_SIZE
        self.affinity = np.where(blocks[:, None] == blocks[None, :], config.cooccurrence, 1.0)

    def _draw_phrases(self, vocab):
        config, rng = self.config, self.random_state
        phrases = []
        attempts = 0
        while len(phrases) < config.phrases_per_topic:
            length = rng.randint(config.phrase_len_min, config.phrase_len_max + 1)
            phrase = [vocab[i] for i in rng.randint(len(vocab), size=length)]
            attempts += 1
            if phrase not in phrases or attempts > 100 * config.phrases_per_topic:
                phrases.append(phrase)
        return phrases

    def draw_topics(self):
        """A label set: 1 to `max_labels` distinct topics, ascending."""
        config, rng = self.config, self.random_state
        count = rng.randint(1, config.max_labels + 1)
        weights = self.weights.copy()
        chosen = []
        for _ in range(count):
            p = weights / weights.sum()
            topic = int(rng.choice(config.topics, p=p))
            chosen.append(topic)
            weights[topic] = 0.0
            weights *= self.affinity[topic]
        return sorted(chosen)

    def noise_token(self):
        config, rng = self.config, self.random_state
        if rng.random_sample() < config.noise_rate:
            vocab = self.topic_vocab[rng.randint(config.topics)]
        else:
            vocab = self.filler_vocab
        return vocab[rng.randint(len(vocab))]

    def document(self, topics):
        """Tokens of one document planting one signature phrase of each of `topics`."""
        config, rng = self.config, self.random_state
        phrases = [self.signatures[t][rng.randint(config.phrases_per_topic)] for t in topics]
        phrases = [phrases[i] for i in rng.permutation(len(phrases))]
        length = rng.randint(config.doc_len_min, config.doc_len_max + 1)
        planted = sum(len(phrase) for phrase in phrases)
        noise = [self.noise_token() for _ in range(max(length - planted, 0))]
        slots = np.sort(rng.randint(0, len(noise) + 1, size=len(phrases)))

        tokens, start = [], 0
        for slot, phrase in zip(slots, phrases):
            tokens.extend(noise[start:slot])
            tokens.extend(phrase)
            start = slot
        tokens.extend(noise[start:])
        return tokens

    def generate(self):
        """Draw `corpus_size` documents.

        Returns
        -------
        (list of str, list of list of str)
            Texts and their label sets.

        """
        texts, label_sets = [], []
        for docno in range(self.config.corpus_size):
            topics = self.draw_topics()
            texts.append(" ".join(self.document(topics)))
            label_sets.append([topic_name(t) for t in topics])
        logger.info("generated %i synthetic documents over %i topics", len(texts), self.config.topics)
        return texts, label_sets

    def manifest(self):
        return OrderedDict([
            ('seed', self.seed),
            ('config', self.config.as_dict()),
            ('topics', [
                OrderedDict([
                    ('name', topic_name(t)),
                    ('weight', float(self.weights[t])),
                    ('phrases', [" ".join(phrase) for phrase in self.signatures[t]]),
                ])
                for t in range(self.config.topics)
            ]),
        ])


def generate_synthetic(config, seed):
    """Generate a synthetic corpus, see :class:`SyntheticGenerator`.

    Returns
    -------
    (list of str, list of list of str)
        Texts and label sets; identical for identical `config` and `seed`.

    """
    return SyntheticGenerator(config, seed).generate()


def split_corpus(texts, label_sets, seed, fractions=SPLITS):
    """Shuffle documents into named splits of the given fractions.

    Documents of later splits carrying a label absent from the first split are swapped with a
    first-split document whose labels all remain covered, so every evaluation label is known
    to a model trained on the first split.

    Returns
    -------
    OrderedDict of (str, list of (str, list of str))

    """
    rng = utils.get_random_state(seed, 'split')
    order = list(rng.permutation(len(texts)))
    bounds = np.round(np.cumsum([f for _, f in fractions]) * len(texts)).astype(int)
    parts, start = [], 0
    for stop in bounds:
        parts.append(order[start:stop])
        start = stop

    first = parts[0]
    counts = {}
    for i in first:
        for label in label_sets[i]:
            counts[label] = counts.get(label, 0) + 1
    swaps = 0
    for part in parts[1:]:
        for pos, i in enumerate(part):
            if all(label in counts for label in label_sets[i]):
                continue
            for fpos, j in enumerate(first):
                if all(counts[label] > 1 for label in label_sets[j]):
                    for label in label_sets[j]:
                        counts[label] -= 1
                    for label in label_sets[i]:
                        counts[label] = counts.get(label, 0) + 1
                    first[fpos], part[pos] = i, j
                    swaps += 1
                    break
    if swaps:
        logger.info("moved %i documents with rare labels into the %s split", swaps, fractions[0][0])
    return OrderedDict(
        (name, [(texts[i], label_sets[i]) for i in part]) for (name, _), part in zip(fractions, parts)
    )


def write_synthetic_corpus(config, seed, out_dir):
    """Generate a corpus and write `train.jsonl`, `dev.jsonl`, `test.jsonl` and `manifest.json` to `out_dir`.

    Returns
    -------
    OrderedDict
        The manifest: seed, generator settings, topic signature phrases and per-split statistics.

    Raises
    ------
    IOError
        If `out_dir` cannot be written.

    """
    utils.ensure_dir(out_dir)
    generator = SyntheticGenerator(config, seed)
    texts, label_sets = generator.generate()
    manifest = generator.manifest()
    manifest['splits'] = OrderedDict()
    for name, records in split_corpus(texts, label_sets, seed).items():
        fname = os.path.join(out_dir, '%s.jsonl' % name)
        LabeledCorpus.save_corpus(fname, records)
        manifest['splits'][name] = LabeledCorpus(records=records).statistics()
    with utils.file_or_filename(os.path.join(out_dir, 'manifest.json'), mode='w') as fout:
        json.dump(manifest, fout, indent=2)
        fout.write("\n")
    logger.info("wrote synthetic corpus of %i documents to %s", len(texts), out_dir)
    return manifest

#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# Licensed under the GNU LGPL v2.1 - http://www.gnu.org/licenses/lgpl.html

"""
Automated tests for the planted-phrase corpus generator.
"""

from collections import Counter
import json
import logging
import os
import unittest

from etikettr.corpora.labeledcorpus import LabeledCorpus
from etikettr.corpora.synthetic import (
    SyntheticConfig, SyntheticGenerator, generate_synthetic, split_corpus, topic_name, write_synthetic_corpus
)
from etikettr.test.utils import datapath, temporary_file


def small_config(**kwargs):
    return SyntheticConfig.from_file(datapath('synthetic_small.cfg'), **kwargs)


def contains(tokens, phrase):
    n = len(phrase)
    return any(tokens[i:i + n] == phrase for i in range(len(tokens) - n + 1))


class TestSyntheticCorpus(unittest.TestCase):

    def test_deterministic(self):
        config = small_config()
        self.assertEqual(generate_synthetic(config, seed=7), generate_synthetic(config, seed=7))
        self.assertNotEqual(generate_synthetic(config, seed=7), generate_synthetic(config, seed=8))

    def test_label_sets(self):
        config = small_config()
        texts, label_sets = generate_synthetic(config, seed=1)
        self.assertEqual(len(texts), config.corpus_size)
        names = {topic_name(t) for t in range(config.topics)}
        for labels in label_sets:
            self.assertTrue(1 <= len(labels) <= config.max_labels)
            self.assertEqual(len(set(labels)), len(labels))
            self.assertTrue(set(labels) <= names)

    def test_every_label_has_its_phrase(self):
        config = small_config()
        generator = SyntheticGenerator(config, seed=3)
        texts, label_sets = generator.generate()
        for text, labels in zip(texts, label_sets):
            tokens = text.split()
            for label in labels:
                topic = int(label.split('_')[1])
                self.assertTrue(any(contains(tokens, phrase) for phrase in generator.signatures[topic]))

    def test_signature_phrases_come_from_private_vocabulary(self):
        generator = SyntheticGenerator(small_config(), seed=3)
        for topic, phrases in enumerate(generator.signatures):
            for phrase in phrases:
                self.assertTrue(3 <= len(phrase) <= 4)
                self.assertTrue(set(phrase) <= set(generator.topic_vocab[topic]))
        self.assertFalse(set(generator.filler_vocab) & set(sum(generator.topic_vocab, [])))

    def test_long_tail(self):
        config = SyntheticConfig(topics=20, decay=0.7, corpus_size=2000)
        _, label_sets = generate_synthetic(config, seed=1)
        counts = Counter(label for labels in label_sets for label in labels)
        frequencies = [counts[topic_name(t)] for t in range(20)]
        self.assertGreaterEqual(max(frequencies), 5 * min(frequencies))

    def test_invalid(self):
        with self.assertRaises(ValueError):
            SyntheticGenerator(SyntheticConfig(topics=1), seed=1)
        with self.assertRaises(ValueError):
            SyntheticGenerator(SyntheticConfig(doc_len_min=4, phrase_len_max=5), seed=1)
        with self.assertRaises(ValueError):
            small_config(unknown_key=1)

    def test_split_sizes_and_coverage(self):
        texts, label_sets = generate_synthetic(small_config(), seed=2)
        splits = split_corpus(texts, label_sets, seed=2)
        self.assertEqual([len(records) for records in splits.values()], [80, 10, 10])
        train_labels = {label for _, labels in splits['train'] for label in labels}
        for name in ('dev', 'test'):
            for _, labels in splits[name]:
                self.assertTrue(set(labels) <= train_labels)
        everything = sorted(text for records in splits.values() for text, _ in records)
        self.assertEqual(everything, sorted(texts))

    def test_write(self):
        config = small_config()
        with temporary_file('corpus') as out_dir:
            manifest = write_synthetic_corpus(config, 5, out_dir)
            self.assertEqual(
                sorted(os.listdir(out_dir)), ['dev.jsonl', 'manifest.json', 'test.jsonl', 'train.jsonl'])
            self.assertEqual(len(LabeledCorpus(os.path.join(out_dir, 'train.jsonl'))), 80)
            with open(os.path.join(out_dir, 'manifest.json')) as fin:
                stored = json.load(fin)
        self.assertEqual(stored['seed'], 5)
        self.assertEqual(len(stored['topics']), config.topics)
        self.assertEqual(stored['topics'][0]['name'], 'topic_00')
        self.assertEqual(manifest['splits']['test']['documents'], 10)


if __name__ == '__main__':
    logging.basicConfig(format='%(asctime)s : %(levelname)s : %(message)s', level=logging.DEBUG)
    unittest.main()

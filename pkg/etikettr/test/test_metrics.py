#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# Licensed under the GNU LGPL v2.1 - http://www.gnu.org/licenses/lgpl.html

"""
Automated tests for the evaluation metrics.
"""

import logging
import unittest

import numpy as np

from etikettr import metrics
from etikettr.corpora.labeldictionary import permute_labels


def label_vocabulary(L):
    return permute_labels({'label_%02d' % i: 100 - i for i in range(L)})


def recount(pred, gold, columns=None):
    """Cell-by-cell recount of Hamming loss and micro precision, recall and F1."""
    N, L = len(gold), len(gold[0])
    columns = range(L) if columns is None else columns
    tp = fp = fn = 0
    hl = 0.0
    for i in range(N):
        wrong = 0
        for j in range(L):
            if pred[i][j] != gold[i][j]:
                wrong += 1
        hl += wrong / float(L)
        for j in columns:
            if pred[i][j] and gold[i][j]:
                tp += 1
            elif pred[i][j]:
                fp += 1
            elif gold[i][j]:
                fn += 1
    p = tp / float(tp + fp) if tp + fp else 0.0
    r = tp / float(tp + fn) if tp + fn else 0.0
    f1 = 2.0 * tp / (2.0 * tp + fp + fn) if tp + fp + fn else 0.0
    return hl / N, p, r, f1


class TestBinary(unittest.TestCase):

    def test_to_binary(self):
        np.testing.assert_array_equal(metrics.to_binary([], 4), [0, 0, 0, 0])
        np.testing.assert_array_equal(metrics.to_binary([0, 2], 4), [1, 0, 1, 0])

    def test_invalid(self):
        with self.assertRaises(ValueError):
            metrics.to_binary([4], 4)
        with self.assertRaises(ValueError):
            metrics.to_binary([1, 1], 4)

    def test_matrix(self):
        np.testing.assert_array_equal(metrics.to_binary_matrix([[1], [], [0, 2]], 3), [[0, 1, 0], [0, 0, 0], [1, 0, 1]])
        self.assertEqual(metrics.to_binary_matrix([], 3).shape, (0, 3))


class TestMetrics(unittest.TestCase):

    def test_hamming_examples(self):
        gold = np.array([[1, 1, 0, 0]])
        self.assertEqual(metrics.hamming_loss(gold, gold), 0.0)
        self.assertEqual(metrics.hamming_loss(np.array([[1, 0, 1, 0]]), gold), 0.5)
        self.assertEqual(metrics.hamming_loss(1 - gold, gold), 1.0)

    def test_micro_example(self):
        gold = np.array([[1, 1, 0], [0, 1, 0]])
        pred = np.array([[1, 0, 0], [0, 1, 1]])
        p, r, f1 = metrics.micro_prf(pred, gold)
        self.assertEqual((p, r, f1), (2 / 3.0, 2 / 3.0, 2 / 3.0))
        self.assertEqual(metrics.micro_prf(gold, gold), (1.0, 1.0, 1.0))

    def test_empty_predictions(self):
        gold = np.array([[1, 0, 0], [0, 1, 0]])
        with self.assertLogs('etikettr.metrics', level='WARNING'):
            self.assertEqual(metrics.micro_prf(np.zeros_like(gold), gold), (0.0, 0.0, 0.0))

    def test_shape_mismatch(self):
        with self.assertRaises(ValueError):
            metrics.hamming_loss(np.zeros((2, 3)), np.zeros((2, 4)))
        with self.assertRaises(ValueError):
            metrics.micro_prf(np.zeros((3, 3)), np.zeros((2, 3)))

    def test_against_recount(self):
        for seed in range(100):
            rng = np.random.RandomState(seed)
            N, L = rng.randint(1, 9), rng.randint(1, 11)
            gold = (rng.uniform(size=(N, L)) < 0.3).astype(np.int8)
            pred = (rng.uniform(size=(N, L)) < 0.3).astype(np.int8)
            hl, p, r, f1 = recount(pred.tolist(), gold.tolist())
            self.assertAlmostEqual(metrics.hamming_loss(pred, gold), hl, places=12)
            self.assertEqual(metrics.micro_prf(pred, gold), (p, r, f1))
            if L > 2:
                labelvocab = label_vocabulary(L)
                self.assertEqual(
                    metrics.band_micro_f1(pred, gold, labelvocab, 2), recount(pred, gold, range(2, L))[3])

    def test_f1_from_precision_and_recall(self):
        for seed in range(20):
            rng = np.random.RandomState(seed)
            gold = (rng.uniform(size=(6, 8)) < 0.4).astype(np.int8)
            pred = (rng.uniform(size=(6, 8)) < 0.4).astype(np.int8)
            p, r, f1 = metrics.micro_prf(pred, gold)
            self.assertTrue(0.0 <= f1 <= 1.0)
            if p + r > 0:
                self.assertAlmostEqual(f1, 2 * p * r / (p + r), delta=1e-12)

    def test_permutation_invariance(self):
        rng = np.random.RandomState(3)
        gold = (rng.uniform(size=(7, 9)) < 0.3).astype(np.int8)
        pred = (rng.uniform(size=(7, 9)) < 0.3).astype(np.int8)
        order = rng.permutation(9)
        self.assertAlmostEqual(metrics.hamming_loss(pred, gold), metrics.hamming_loss(pred[:, order], gold[:, order]))
        self.assertEqual(metrics.micro_prf(pred, gold), metrics.micro_prf(pred[:, order], gold[:, order]))


class TestBands(unittest.TestCase):

    def setUp(self):
        rng = np.random.RandomState(0)
        self.gold = (rng.uniform(size=(8, 5)) < 0.5).astype(np.int8)
        self.pred = (rng.uniform(size=(8, 5)) < 0.5).astype(np.int8)
        self.labelvocab = label_vocabulary(5)

    def test_no_exclusion(self):
        self.assertEqual(
            metrics.band_micro_f1(self.pred, self.gold, self.labelvocab, 0), metrics.micro_prf(self.pred, self.gold)[2])

    def test_rarest_label(self):
        expected = metrics.micro_prf(self.pred[:, 4:], self.gold[:, 4:])[2]
        self.assertEqual(metrics.band_micro_f1(self.pred, self.gold, self.labelvocab, 4), expected)

    def test_invalid(self):
        with self.assertRaises(ValueError):
            metrics.band_micro_f1(self.pred, self.gold, self.labelvocab, 5)
        with self.assertRaises(ValueError):
            metrics.band_micro_f1(self.pred, self.gold, self.labelvocab, -1)
        with self.assertRaises(ValueError):
            metrics.band_micro_f1(self.pred[:, :4], self.gold[:, :4], self.labelvocab, 1)

    def test_default_bands(self):
        self.assertEqual(metrics.default_bands(103), [10, 20, 30, 40, 50, 60])
        self.assertEqual(metrics.default_bands(25), [10, 20])
        self.assertEqual(metrics.default_bands(10), [])


class TestEvalReport(unittest.TestCase):

    def test_evaluate_sets(self):
        labelvocab = label_vocabulary(4)
        report = metrics.evaluate_sets([[0], [1, 2]], [[0, 1], [1]], labelvocab, bands=[1])
        self.assertEqual((report.p, report.r, report.f1), (2 / 3.0, 2 / 3.0, 2 / 3.0))
        self.assertEqual(report.hl, 0.25)
        self.assertEqual(list(report.as_record()), ['hl', 'p', 'r', 'f1', 'band_f1_k1'])
        self.assertEqual(report.band_f1[1], 0.5)

    def test_to_text(self):
        report = metrics.EvalReport(0.25, 0.5, 1.0, 2 / 3.0, {10: 0.125})
        self.assertEqual(report.to_text(), "hl = 0.250000\np = 0.500000\nr = 1.000000\nf1 = 0.666667\nband_f1_k10 = 0.125000\n")
        self.assertEqual(report, metrics.EvalReport(0.25, 0.5, 1.0, 2 / 3.0, {10: 0.125}))
        self.assertNotEqual(report, metrics.EvalReport(0.25, 0.5, 1.0, 2 / 3.0))

    def test_mismatched_lengths(self):
        with self.assertRaises(ValueError):
            metrics.evaluate_sets([[0]], [[0], [1]], label_vocabulary(3))


if __name__ == '__main__':
    logging.basicConfig(format='%(asctime)s : %(levelname)s : %(message)s', level=logging.DEBUG)
    unittest.main()

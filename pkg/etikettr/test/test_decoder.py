#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# Licensed under the GNU LGPL v2.1 - http://www.gnu.org/licenses/lgpl.html

"""
Automated tests for attention, the label decoder and greedy decoding.
"""

import logging
import math
import unittest

import numpy as np

from etikettr import tensor as T
from etikettr.config import ModelConfig
from etikettr.corpora.labeledcorpus import Batch, encode_corpus
from etikettr.models.decoder import (
    VARIANTS, AttentionParams, DecoderParams, attend, decode_step, greedy_decode, init_state, teacher_forced
)
from etikettr.models.encoder import Annotations
from etikettr.models.mdc import SemanticUnits
from etikettr.models.seq2seq import Seq2SeqClassifier
from etikettr.models.trainer import sequence_loss
from etikettr.test.utils import analytic_gradient, common_corpus


def build_model(variant, hier=0, seed=1):
    vocab, labelvocab = common_corpus.build_vocabularies(cap=100)
    config = ModelConfig(
        embedding_size=4, hidden_size=4, kernel_size=2, dilation_rates=(1, 2),
        attention_variant=variant, hier=hier, init_scale=0.3,
    )
    return Seq2SeqClassifier(vocab, labelvocab, config, seed=seed)


def common_batch(model, size=3):
    examples = encode_corpus(common_corpus, model.vocab, model.labelvocab)
    return Batch(examples[:size], eos_id=model.labelvocab.eos_id)


def encoded(model, batch):
    with T.no_grad():
        return model.encode(batch.tokens, batch.lengths)


def random_memories(rng, words, units, hidden):
    """Word annotations (2 * hidden wide) and semantic units (hidden wide), zero past each length."""
    B = len(words)
    h = rng.uniform(-1, 1, size=(B, max(words), 2 * hidden))
    g = rng.uniform(0, 1, size=(B, max(units), hidden))
    for b in range(B):
        h[b, words[b]:] = 0.0
        g[b, units[b]:] = 0.0
    final_fwd, final_bwd = rng.uniform(-1, 1, size=(2, B, hidden))
    annotations = Annotations(T.constant(h), words, T.constant(final_fwd), T.constant(final_bwd))
    return annotations, SemanticUnits(T.constant(g), units, words)


def softmax(x):
    e = np.exp(x - x.max(axis=-1, keepdims=True))
    return e / e.sum(axis=-1, keepdims=True)


class TestAttend(unittest.TestCase):

    def test_equal_scores(self):
        memory = T.constant([[1.0, 2.0], [3.0, -1.0], [0.5, 0.5]])
        weights, context = attend(T.constant([0.3, -0.7]), memory, T.constant(np.zeros((2, 2))))
        np.testing.assert_allclose(weights.data, [1 / 3.0] * 3)
        np.testing.assert_allclose(context.data, memory.data.mean(axis=0))

    def test_single_memory(self):
        weights, context = attend(T.constant([0.3, -0.7]), T.constant([[4.0, 5.0]]), T.constant(np.eye(2)))
        np.testing.assert_allclose(weights.data, [1.0])
        np.testing.assert_allclose(context.data, [4.0, 5.0])

    def test_weights(self):
        memory = T.constant([[math.log(2)], [0.0], [0.0]])
        weights, _ = attend(T.constant([1.0]), memory, T.constant([[1.0]]))
        np.testing.assert_allclose(weights.data, [0.5, 0.25, 0.25])

    def test_empty_memory(self):
        with self.assertRaises(ValueError):
            attend(T.constant([1.0, 0.0]), T.constant(np.zeros((0, 2))), T.constant(np.eye(2)))

    def test_mask(self):
        rng = np.random.RandomState(0)
        memory = T.constant(rng.uniform(-1, 1, size=(2, 3, 2)))
        mask = np.array([[True, True, False], [True, False, False]])
        weights, context = attend(T.constant(rng.uniform(-1, 1, size=(2, 2))), memory, T.constant(np.eye(2)), mask)
        self.assertEqual(weights.data[0, 2], 0.0)
        np.testing.assert_allclose(weights.data.sum(axis=1), [1.0, 1.0])
        np.testing.assert_allclose(weights.data[1], [1.0, 0.0, 0.0])
        np.testing.assert_allclose(context.data[1], memory.data[1, 0])

    def test_shape_mismatch(self):
        with self.assertRaises(ValueError):
            attend(T.constant([1.0, 0.0]), T.constant(np.zeros((3, 2))), T.constant(np.eye(3)))


class TestDecoder(unittest.TestCase):

    def test_distributions_are_normalized(self):
        for variant in VARIANTS:
            model = build_model(variant)
            batch = common_batch(model)
            h, g = encoded(model, batch)
            params = DecoderParams.from_params(model.params, variant)
            with T.no_grad():
                distributions = teacher_forced(h, g, batch.labels, variant, params)
            self.assertEqual(len(distributions), batch.labels.shape[1])
            for P in distributions:
                self.assertEqual(P.shape, (3, model.labelvocab.num_outputs))
                self.assertTrue((P.data >= 0).all())
                np.testing.assert_allclose(P.data.sum(axis=1), 1.0, rtol=0, atol=1e-12)

    def test_label_embedding_rows(self):
        model = build_model('hybrid')
        L = len(model.labelvocab)
        params = DecoderParams.from_params(model.params, 'hybrid')
        self.assertEqual(params.embedding.shape[0], L + 2)
        self.assertEqual((params.eos_id, params.bos_id, params.num_outputs), (L, L + 1, L + 1))

    def test_initial_state_from_zero_encoder(self):
        model = build_model('none')
        params = DecoderParams.from_params(model.params, 'none')
        zeros = T.constant(np.zeros((2, 4)))
        annotations = Annotations(T.constant(np.zeros((2, 3, 8))), [3, 2], zeros, zeros)
        state = init_state(annotations, params)
        np.testing.assert_allclose(state.h.data, np.tile(np.tanh(params.bridge_b.data), (2, 1)))
        np.testing.assert_array_equal(state.c.data, 0.0)

    def test_conventional_without_context_is_none(self):
        model = build_model('conventional')
        batch = common_batch(model)
        h, _ = encoded(model, batch)
        params = DecoderParams.from_params(model.params, 'conventional')
        H = model.config.hidden_size
        params.attention.word.W_c.data[H:] = 0.0

        prev = np.full(3, params.bos_id)
        with T.no_grad():
            P, state = decode_step(prev, init_state(h, params), h, None, 'conventional', params)
        s = state.h.data
        expected = softmax(np.dot(np.tanh(np.dot(s, params.attention.word.W_c.data[:H])), params.attention.W_o.data)
                           + params.attention.b_o.data)
        np.testing.assert_allclose(P.data, expected, rtol=0, atol=1e-12)

        # the word annotations no longer matter
        other = Annotations(T.constant(np.random.RandomState(0).uniform(-1, 1, size=h.values.shape)),
                            h.lengths, h.final_fwd, h.final_bwd)
        with T.no_grad():
            P_other, _ = decode_step(prev, init_state(h, params), other, None, 'conventional', params)
        np.testing.assert_allclose(P_other.data, P.data, rtol=0, atol=1e-12)

    def test_hybrid_differs_from_additive(self):
        model = build_model('hybrid')
        batch = common_batch(model)
        h, g = encoded(model, batch)
        hybrid = DecoderParams.from_params(model.params, 'hybrid')
        attention = hybrid.attention
        additive = DecoderParams(
            hybrid.embedding, hybrid.lstm, hybrid.bridge_W, hybrid.bridge_b,
            AttentionParams('additive', attention.W_o, attention.b_o, word=attention.word, unit=attention.unit),
        )
        prev = np.full(3, hybrid.bos_id)
        with T.no_grad():
            P_hybrid, _ = decode_step(prev, init_state(h, hybrid), h, g, 'hybrid', hybrid)
            P_additive, _ = decode_step(prev, init_state(h, additive), h, g, 'additive', additive)
        self.assertGreater(np.abs(P_hybrid.data - P_additive.data).max(), 1e-8)

    def test_variant_mismatch(self):
        model = build_model('hybrid')
        batch = common_batch(model)
        h, g = encoded(model, batch)
        params = DecoderParams.from_params(model.params, 'hybrid')
        with self.assertRaises(ValueError):
            decode_step(np.full(3, params.bos_id), init_state(h, params), h, g, 'additive', params)
        with self.assertRaises(ValueError):
            AttentionParams('mdc_only', params.attention.W_o, params.attention.b_o)

    def test_gradient_through_both_hops(self):
        model = build_model('hybrid', seed=3)
        rng = np.random.RandomState(3)
        for p in model.params.values():
            p.data[...] = rng.uniform(-1, 1, size=p.shape)
        batch = common_batch(model, size=2)
        params = DecoderParams.from_params(model.params, 'hybrid')
        h, g = random_memories(np.random.RandomState(4), words=[6, 4], units=[4, 2], hidden=4)

        def loss(_):
            return sequence_loss(teacher_forced(h, g, batch.labels, 'hybrid', params), batch.labels, batch.label_mask)

        for name in ('attention.unit.W_a', 'attention.unit.W_c', 'attention.word.W_a', 'decoder.lstm.U'):
            self.assertGreater(np.abs(analytic_gradient(loss, model.params[name])).max(), 1e-4, name)
            self.assertLess(T.grad_check(loss, model.params[name], eps=1e-5, floor=1e-6), 1e-4, name)


class TestGreedy(unittest.TestCase):

    def setUp(self):
        self.model = build_model('none')
        self.batch = common_batch(self.model, size=2)
        self.h, _ = encoded(self.model, self.batch)
        self.params = DecoderParams.from_params(self.model.params, 'none')
        self.params.attention.W_o.data[...] = 0.0

    def decode(self, bias, **kwargs):
        self.params.attention.b_o.data[...] = bias
        return greedy_decode(self.h, None, 'none', self.params, **kwargs)

    def test_masked(self):
        self.assertEqual(self.decode([1, 10, 2, 1.5]), [[1, 2], [1, 2]])

    def test_emission_order(self):
        self.assertEqual(self.decode([1, 2, 10, 1.5]), [[2, 1], [2, 1]])

    def test_unmasked_reports_repeats_once(self):
        self.assertEqual(self.decode([1, 10, 2, 1.5], mask_emitted=False), [[1], [1]])

    def test_eos_first(self):
        self.assertEqual(self.decode([1, 1, 1, 5]), [[], []])

    def test_all_labels(self):
        self.assertEqual(self.decode([3, 2, 1, 0]), [[0, 1, 2], [0, 1, 2]])

    def test_max_steps(self):
        self.assertEqual(self.decode([3, 2, 1, 0], max_steps=2), [[0, 1], [0, 1]])

    def test_model_predict(self):
        self.params.attention.b_o.data[...] = [1, 10, 2, 1.5]
        labelvocab = self.model.labelvocab
        predicted = self.model.predict(["the striker scored", "a painting"])
        expected = [labelvocab.id2label[1], labelvocab.id2label[2]]
        self.assertEqual(predicted, [expected, expected])


if __name__ == '__main__':
    logging.basicConfig(format='%(asctime)s : %(levelname)s : %(message)s', level=logging.DEBUG)
    unittest.main()

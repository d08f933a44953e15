#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# Licensed under the GNU LGPL v2.1 - http://www.gnu.org/licenses/lgpl.html

"""LSTM label decoder with pluggable attention.

At step t the decoder LSTM consumes the embedding of the previous label and produces s_t. The
attention variant turns s_t into an output vector o_t, and P = softmax(W_o o_t + b_o) is the
distribution over the label ids plus EOS:

=============  ==============================================================================
variant        o_t
=============  ==============================================================================
none           s_t
conventional   tanh(W_c [s_t ; attend(s_t, h)])
mdc_only       tanh(W_c [s_t ; attend(s_t, g)])
additive       s'_t + s~_t with s'_t = tanh(W_c1 [s_t ; attend(s_t, g)]),
               s~_t = tanh(W_c2 [s_t ; attend(s_t, h)])
hybrid         s'_t + s~_t with s'_t = tanh(W_c1 [s_t ; attend(s_t, g)]),
               s~_t = tanh(W_c2 [s'_t ; attend(s'_t, h)])
=============  ==============================================================================

where h are the word annotations, g the semantic units and attend() bilinear attention with
its own W_a per memory.

"""

import logging

import numpy as np

from etikettr import matutils
from etikettr import tensor as T
from etikettr.models.encoder import LstmParams


logger = logging.getLogger(__name__)

VARIANTS = ('none', 'conventional', 'mdc_only', 'additive', 'hybrid')
WORD_VARIANTS = frozenset(['conventional', 'additive', 'hybrid'])
UNIT_VARIANTS = frozenset(['mdc_only', 'additive', 'hybrid'])


def check_variant(variant):
    if variant not in VARIANTS:
        raise ValueError("unknown attention variant %r, expected one of %s" % (variant, ", ".join(VARIANTS)))
    return variant


def uses_units(variant):
    """Whether `variant` attends to semantic units."""
    return check_variant(variant) in UNIT_VARIANTS


def uses_words(variant):
    """Whether `variant` attends to word annotations."""
    return check_variant(variant) in WORD_VARIANTS


def attend(query, memory, W_a, mask=None):
    """Bilinear attention.

    Parameters
    ----------
    query : Tensor
        (Q,) or a batch (B, Q).
    memory : Tensor
        (M, C) or a batch (B, M, C).
    W_a : Tensor, shape (Q, C)
    mask : numpy.ndarray of bool, optional
        (M,) or (B, M); False marks padding, which gets weight 0.

    Returns
    -------
    (Tensor, Tensor)
        Weights softmax(query^T W_a m_i) of shape (M,) or (B, M), and the context
        sum_i weight_i m_i of shape (C,) or (B, C).

    Raises
    ------
    ValueError
        If the memory is empty.

    """
    single = query.ndim == 1
    if single:
        query = T.reshape(query, (1,) + query.shape)
        memory = T.reshape(memory, (1,) + memory.shape)
        if mask is not None:
            mask = np.asarray(mask, dtype=bool)[np.newaxis]
    B, M, C = memory.shape
    if M == 0:
        raise ValueError("attend: empty memory")
    if W_a.shape != (query.shape[1], C) or query.shape[0] != B:
        raise T.ShapeError("attend", query.shape, W_a.shape, memory.shape)

    keyed = T.reshape(T.matmul(query, W_a), (B, C, 1))
    scores = T.reshape(T.matmul(memory, keyed), (B, M))
    weights = T.softmax(scores, axis=1, mask=mask)
    context = T.reshape(T.matmul(T.reshape(weights, (B, 1, M)), memory), (B, C))
    if single:
        return T.reshape(weights, (M,)), T.reshape(context, (C,))
    return weights, context


class AttentionHop(object):
    """Bilinear scorer W_a (query dim x memory dim) and combination W_c ((query + memory) dim x H)."""

    def __init__(self, W_a, W_c):
        if W_c.shape[0] != W_a.shape[0] + W_a.shape[1]:
            raise T.ShapeError("AttentionHop", W_a.shape, W_c.shape)
        self.W_a, self.W_c = W_a, W_c

    def __call__(self, query, memory):
        """tanh(W_c [query ; context]) for a batch of queries over a :class:`~etikettr.models.encoder.Memory`."""
        _, context = attend(query, memory.values, self.W_a, mask=memory.mask)
        return T.tanh(T.matmul(T.concat([query, context], axis=1), self.W_c))


class AttentionParams(object):
    """Attention weights of one variant plus the output projection.

    Attributes
    ----------
    variant : str
    word : :class:`AttentionHop` or None
        Hop over the word annotations.
    unit : :class:`AttentionHop` or None
        Hop over the semantic units.
    W_o : Tensor, shape (H, L + 1)
    b_o : Tensor, shape (L + 1,)

    """
    def __init__(self, variant, W_o, b_o, word=None, unit=None):
        self.variant = check_variant(variant)
        if uses_words(variant) and word is None or uses_units(variant) and unit is None:
            raise ValueError("attention variant %s is missing a hop" % variant)
        self.W_o, self.b_o = W_o, b_o
        self.word, self.unit = word, unit

    @classmethod
    def from_params(cls, params, variant):
        word = unit = None
        if uses_words(variant):
            word = AttentionHop(params['attention.word.W_a'], params['attention.word.W_c'])
        if uses_units(variant):
            unit = AttentionHop(params['attention.unit.W_a'], params['attention.unit.W_c'])
        return cls(variant, params['output.W'], params['output.b'], word=word, unit=unit)

    @classmethod
    def initialize(cls, params, variant, hidden_size, word_dim, unit_dim, num_outputs,
                   random_state, scale, dtype=np.float64):
        shapes = []
        if uses_words(variant):
            shapes += [('attention.word.W_a', (hidden_size, word_dim)),
                       ('attention.word.W_c', (hidden_size + word_dim, hidden_size))]
        if uses_units(variant):
            shapes += [('attention.unit.W_a', (hidden_size, unit_dim)),
                       ('attention.unit.W_c', (hidden_size + unit_dim, hidden_size))]
        shapes += [('output.W', (hidden_size, num_outputs)), ('output.b', (num_outputs,))]
        for key, shape in shapes:
            params[key] = T.uniform(shape, random_state, scale, dtype=dtype, name=key)
        return cls.from_params(params, variant)

    def output(self, s, h, g):
        """o_t for decoder states `s` (B, H), annotations `h` and semantic units `g`."""
        variant = self.variant
        if variant == 'none':
            return s
        if uses_units(variant) and (g is None or g.values.shape[1] == 0):
            raise ValueError("attention variant %s needs semantic units, got none" % variant)
        if variant == 'conventional':
            return self.word(s, h)
        if variant == 'mdc_only':
            return self.unit(s, g)
        s_unit = self.unit(s, g)
        if variant == 'additive':
            return T.add(s_unit, self.word(s, h))
        return T.add(s_unit, self.word(s_unit, h))

    def distribution(self, s, h, g):
        """Label distribution P (B, L + 1)."""
        o = self.output(s, h, g)
        return T.softmax(T.add(T.matmul(o, self.W_o), self.b_o), axis=1)


class DecoderParams(object):
    """All decoder weights: label embeddings, LSTM, initial-state bridge and attention.

    The label embedding table has L + 2 rows: the L labels, EOS, and BOS (fed at step 1 only).

    """
    def __init__(self, embedding, lstm, bridge_W, bridge_b, attention):
        self.embedding = embedding
        self.lstm = lstm
        self.bridge_W, self.bridge_b = bridge_W, bridge_b
        self.attention = attention
        if embedding.shape[0] != attention.W_o.shape[1] + 1:
            raise T.ShapeError("DecoderParams", embedding.shape, attention.W_o.shape)

    @property
    def eos_id(self):
        return self.attention.W_o.shape[1] - 1

    @property
    def bos_id(self):
        return self.attention.W_o.shape[1]

    @property
    def num_outputs(self):
        return self.attention.W_o.shape[1]

    @classmethod
    def from_params(cls, params, variant):
        return cls(
            params['decoder.embedding'], LstmParams.from_params(params, 'decoder.lstm'),
            params['decoder.bridge.W'], params['decoder.bridge.b'],
            AttentionParams.from_params(params, variant),
        )

    @classmethod
    def initialize(cls, params, variant, embedding_size, hidden_size, word_dim, unit_dim, num_outputs,
                   random_state, scale, dtype=np.float64):
        params['decoder.embedding'] = T.uniform(
            (num_outputs + 1, embedding_size), random_state, scale, dtype=dtype, name='decoder.embedding')
        LstmParams.initialize(params, 'decoder.lstm', embedding_size, hidden_size, random_state, scale, dtype)
        for key, shape in (('decoder.bridge.W', (word_dim, hidden_size)), ('decoder.bridge.b', (hidden_size,))):
            params[key] = T.uniform(shape, random_state, scale, dtype=dtype, name=key)
        AttentionParams.initialize(params, variant, hidden_size, word_dim, unit_dim, num_outputs,
                                   random_state, scale, dtype)
        return cls.from_params(params, variant)


class DecoderState(object):
    """Decoder LSTM hidden `h` and cell `c` (B, H), step index `t`, and emitted label ids (B, L + 1) mask."""

    def __init__(self, h, c, t=0, emitted=None):
        self.h, self.c, self.t = h, c, t
        if emitted is None:
            emitted = np.zeros((h.shape[0], 0), dtype=bool)
        self.emitted = emitted


def init_state(annotations, params):
    """Initial decoder state: s_0 = tanh(W [forward final ; backward final] + b), zero cell."""
    joined = T.concat([annotations.final_fwd, annotations.final_bwd], axis=1)
    h = T.tanh(T.add(T.matmul(joined, params.bridge_W), params.bridge_b))
    c = T.constant(np.zeros(h.shape), like=h)
    return DecoderState(h, c, 0, np.zeros((h.shape[0], params.num_outputs), dtype=bool))


def decode_step(prev_ids, state, h, g, variant, params):
    """Advance the decoder by one label.

    Parameters
    ----------
    prev_ids : numpy.ndarray of int, shape (B,)
        Previous label of each example (BOS at the first step).
    state : :class:`DecoderState`
    h : :class:`~etikettr.models.encoder.Annotations`
    g : :class:`~etikettr.models.mdc.SemanticUnits` or None
    variant : str
        Must match the variant `params` were built for.
    params : :class:`DecoderParams`

    Returns
    -------
    (Tensor, :class:`DecoderState`)
        Distribution (B, L + 1) over label ids and EOS, and the advanced state.

    """
    if check_variant(variant) != params.attention.variant:
        raise ValueError("decode_step: parameters are for variant %s, not %s" % (params.attention.variant, variant))
    x = T.embedding_lookup(params.embedding, np.asarray(prev_ids, dtype=np.int64))
    s, c = params.lstm.step(x, state.h, state.c)
    P = params.attention.distribution(s, h, g)
    return P, DecoderState(s, c, state.t + 1, state.emitted)


def teacher_forced(h, g, gold, variant, params):
    """Distributions of every gold step, feeding the gold previous label.

    Parameters
    ----------
    gold : numpy.ndarray of int, shape (B, S)
        Gold label sequences including EOS (padded rows are fine; the loss masks them).

    Returns
    -------
    list of Tensor
        S distributions of shape (B, L + 1).

    """
    gold = np.asarray(gold, dtype=np.int64)
    state = init_state(h, params)
    prev = np.full(gold.shape[0], params.bos_id, dtype=np.int64)
    distributions = []
    for t in range(gold.shape[1]):
        P, state = decode_step(prev, state, h, g, variant, params)
        distributions.append(P)
        prev = gold[:, t]
    return distributions


def greedy_decode(h, g, variant, params, max_steps=None, mask_emitted=True):
    """Most probable label at each step until EOS.

    Parameters
    ----------
    max_steps : int, optional
        Defaults to the number of labels plus one.
    mask_emitted : bool, optional
        Give already emitted labels probability 0; EOS is never masked. Without masking a
        re-emitted label is still reported once.

    Returns
    -------
    list of list of int
        Emitted label ids of each example, EOS excluded, in emission order.

    """
    B = len(h)
    eos = params.eos_id
    if max_steps is None:
        max_steps = params.num_outputs
    outputs = [[] for _ in range(B)]
    with T.no_grad():
        state = init_state(h, params)
        emitted = state.emitted
        finished = np.zeros(B, dtype=bool)
        prev = np.full(B, params.bos_id, dtype=np.int64)
        for _ in range(max_steps):
            P, state = decode_step(prev, state, h, g, variant, params)
            choice = matutils.masked_argmax(P.data, emitted if mask_emitted else None)
            for b in np.flatnonzero(~finished):
                label = int(choice[b])
                if label == eos or label < 0:
                    finished[b] = True
                elif not emitted[b, label]:
                    emitted[b, label] = True
                    outputs[b].append(label)
            prev = np.where(finished, eos, choice)
            if finished.all():
                break
    return outputs

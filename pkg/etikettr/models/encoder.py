#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# Licensed under the GNU LGPL v2.1 - http://www.gnu.org/licenses/lgpl.html

"""Bidirectional LSTM encoder and the hierarchical baseline encoder.

Both work on padded batches: a (B, T) matrix of token ids with per-example lengths. Padding never
influences the valid positions of an example. States are frozen past each true length, and
annotations at pad positions are exactly zero.

Examples
--------
>>> from collections import OrderedDict
>>> import numpy as np
>>> from etikettr import utils
>>> from etikettr.tensor import uniform
>>> from etikettr.models.encoder import LstmParams, bilstm_encode
>>> rng = utils.get_random_state(1, 'init')
>>> params = OrderedDict(embedding=uniform((20, 8), rng, 0.08))
>>> fwd = LstmParams.initialize(params, 'encoder.fwd', 8, 4, rng, 0.08)
>>> bwd = LstmParams.initialize(params, 'encoder.bwd', 8, 4, rng, 0.08)
>>> annotations = bilstm_encode(np.array([5, 6, 7]), params['embedding'], fwd, bwd)
>>> annotations.values.shape
(1, 3, 8)

"""

import logging

import numpy as np

from etikettr import matutils
from etikettr import tensor as T


logger = logging.getLogger(__name__)


class Memory(object):
    """Padded batch of vector sequences that attention can read.

    Attributes
    ----------
    values : :class:`~etikettr.tensor.Tensor`, shape (B, M, C)
        Exactly zero past each example's length.
    lengths : numpy.ndarray of int, shape (B,)

    """
    def __init__(self, values, lengths):
        self.values = values
        self.lengths = np.asarray(lengths, dtype=np.int64)

    def __len__(self):
        return self.values.shape[0]

    @property
    def dim(self):
        return self.values.shape[2]

    @property
    def mask(self):
        return matutils.length_mask(self.lengths, self.values.shape[1])

    def example(self, b):
        """The valid (lengths[b], C) values of example `b`, as a numpy array."""
        return self.values.data[b, :self.lengths[b]]


class Annotations(Memory):
    """Word-level annotations h_i = [forward h_i ; backward h_i] of dimension 2H.

    Attributes
    ----------
    final_fwd : :class:`~etikettr.tensor.Tensor`, shape (B, H)
        Forward hidden state after each example's last token.
    final_bwd : :class:`~etikettr.tensor.Tensor`, shape (B, H)
        Backward hidden state after each example's first token.

    """
    def __init__(self, values, lengths, final_fwd, final_bwd):
        super(Annotations, self).__init__(values, lengths)
        self.final_fwd = final_fwd
        self.final_bwd = final_bwd


class LstmParams(object):
    """Weights of one LSTM direction, gates fused in the order input, forget, output, candidate.

    Parameters
    ----------
    W : Tensor, shape (D, 4H)
        Input weights.
    U : Tensor, shape (H, 4H)
        Recurrent weights.
    b : Tensor, shape (4H,)
        Gate biases.

    """
    def __init__(self, W, U, b):
        hidden = U.shape[0]
        if W.ndim != 2 or U.shape != (hidden, 4 * hidden) or W.shape[1] != 4 * hidden or b.shape != (4 * hidden,):
            raise T.ShapeError("LstmParams", W.shape, U.shape, b.shape)
        self.W, self.U, self.b = W, U, b

    @property
    def input_size(self):
        return self.W.shape[0]

    @property
    def hidden_size(self):
        return self.U.shape[0]

    @classmethod
    def from_params(cls, params, prefix):
        return cls(params[prefix + '.W'], params[prefix + '.U'], params[prefix + '.b'])

    @classmethod
    def initialize(cls, params, prefix, input_size, hidden_size, random_state, scale, dtype=np.float64):
        """Draw fresh weights into `params` under `prefix` and return a view on them."""
        for name, shape in (('W', (input_size, 4 * hidden_size)),
                            ('U', (hidden_size, 4 * hidden_size)),
                            ('b', (4 * hidden_size,))):
            key = '%s.%s' % (prefix, name)
            params[key] = T.uniform(shape, random_state, scale, dtype=dtype, name=key)
        return cls.from_params(params, prefix)

    def step(self, x, h, c):
        """One LSTM update for a batch: x (B, D), h and c (B, H) -> new (h, c)."""
        H = self.hidden_size
        z = T.add(T.add(T.matmul(x, self.W), T.matmul(h, self.U)), self.b)
        i = T.sigmoid(T.slice(z, 0, H, axis=1))
        f = T.sigmoid(T.slice(z, H, 2 * H, axis=1))
        o = T.sigmoid(T.slice(z, 2 * H, 3 * H, axis=1))
        g = T.tanh(T.slice(z, 3 * H, 4 * H, axis=1))
        c = T.add(T.mul(f, c), T.mul(i, g))
        h = T.mul(o, T.tanh(c))
        return h, c


def run_lstm(lstm, inputs, mask, steps):
    """Run `lstm` over `inputs` in the order given by `steps`, from zero states.

    Parameters
    ----------
    lstm : :class:`LstmParams`
    inputs : list of Tensor
        Input (B, D) of each position.
    mask : numpy.ndarray of bool, shape (B, len(inputs))
        Valid positions; the state is carried unchanged over invalid ones.
    steps : iterable of int
        Visiting order of the positions.

    Returns
    -------
    (list of Tensor, Tensor)
        Hidden state at each position, and the hidden state after the last step.

    """
    B, H = mask.shape[0], lstm.hidden_size
    dtype = lstm.W.dtype
    h = c = T.constant(np.zeros((B, H)), dtype=dtype)
    outputs = [None] * len(inputs)
    for t in steps:
        h_new, c_new = lstm.step(inputs[t], h, c)
        if mask[:, t].all():
            h, c = h_new, c_new
        else:
            keep = np.repeat(mask[:, t:t + 1], H, axis=1)
            h, c = T.where(keep, h_new, h), T.where(keep, c_new, c)
        outputs[t] = h
    return outputs, h


def _stack_masked(outputs, mask):
    """Stack per-position (B, C) outputs to (B, M, C), zeroing invalid positions."""
    B, C = outputs[0].shape
    zeros = T.constant(np.zeros((B, C)), like=outputs[0])
    masked = []
    for t, out in enumerate(outputs):
        if not mask[:, t].all():
            out = T.where(np.repeat(mask[:, t:t + 1], C, axis=1), out, zeros)
        masked.append(out)
    return T.stack(masked, axis=1)


def bilstm_encode(token_ids, embedding, fwd, bwd, lengths=None):
    """Encode token ids from both directions.

    Parameters
    ----------
    token_ids : numpy.ndarray of int
        One example of shape (n,), or a padded batch of shape (B, T).
    embedding : Tensor, shape (V, D)
    fwd, bwd : :class:`LstmParams`
        Left-to-right and right-to-left weights.
    lengths : numpy.ndarray of int, optional
        True lengths of a padded batch; default is the full width.

    Returns
    -------
    :class:`Annotations`

    Raises
    ------
    ValueError
        On an empty sequence, a length outside [1, T] or mismatched dimensions.

    """
    ids = np.asarray(token_ids, dtype=np.int64)
    if ids.ndim == 1:
        ids = ids[np.newaxis, :]
    B, width = ids.shape
    lengths = np.full(B, width, dtype=np.int64) if lengths is None else np.asarray(lengths, dtype=np.int64)
    if width == 0 or lengths.shape != (B,) or lengths.min() < 1 or lengths.max() > width:
        raise ValueError("bilstm_encode: lengths %s invalid for %d positions" % (lengths.tolist(), width))
    if not (embedding.shape[1] == fwd.input_size == bwd.input_size and fwd.hidden_size == bwd.hidden_size):
        raise ValueError(
            "bilstm_encode: embedding dim %d, forward LSTM %dx%d, backward LSTM %dx%d do not match" % (
                embedding.shape[1], fwd.input_size, fwd.hidden_size, bwd.input_size, bwd.hidden_size)
        )
    mask = matutils.length_mask(lengths, width)
    inputs = [T.embedding_lookup(embedding, ids[:, t]) for t in range(width)]
    forward, final_fwd = run_lstm(fwd, inputs, mask, range(width))
    backward, final_bwd = run_lstm(bwd, inputs, mask, reversed(range(width)))
    joined = [T.concat([f, b], axis=1) for f, b in zip(forward, backward)]
    return Annotations(_stack_masked(joined, mask), lengths, final_fwd, final_bwd)


def sentence_ends(length, boundary):
    """0-based positions hier_encode selects: every `boundary`-th token, plus the last one."""
    ends = list(range(boundary - 1, length, boundary))
    if length % boundary:
        ends.append(length - 1)
    return ends


def hier_encode(annotations, boundary, top):
    """Hierarchical baseline: a second LSTM over the annotations at fixed-size sentence ends.

    Positions N, 2N, ... (1-based) are selected, plus position n when n is not a multiple of N,
    and a unidirectional LSTM runs over the selected annotations.

    Parameters
    ----------
    annotations : :class:`Annotations`
    boundary : int
        Sentence size N.
    top : :class:`LstmParams`
        Weights of the top-level LSTM, input size 2H.

    Returns
    -------
    :class:`~etikettr.models.mdc.SemanticUnits`
        ceil(n / N) sentence representations per example, used in place of the convolutional
        semantic units.

    """
    from etikettr.models.mdc import SemanticUnits

    if boundary < 1:
        raise ValueError("hier_encode: boundary must be >= 1, got %d" % boundary)
    values = annotations.values
    B, width, C = values.shape
    if top.input_size != C:
        raise ValueError("hier_encode: top LSTM expects input dim %d, annotations have %d" % (top.input_size, C))
    ends = [sentence_ends(int(n), boundary) for n in annotations.lengths]
    counts = np.array([len(e) for e in ends], dtype=np.int64)
    rows = np.zeros((B, int(counts.max())), dtype=np.int64)
    for b, positions in enumerate(ends):
        rows[b] = b * width
        rows[b, :len(positions)] = b * width + np.asarray(positions)

    flat = T.reshape(values, (B * width, C))
    inputs = [T.embedding_lookup(flat, rows[:, s]) for s in range(rows.shape[1])]
    mask = matutils.length_mask(counts, rows.shape[1])
    outputs, _ = run_lstm(top, inputs, mask, range(rows.shape[1]))
    return SemanticUnits(_stack_masked(outputs, mask), counts, annotations.lengths)

#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# Licensed under the GNU LGPL v2.1 - http://www.gnu.org/licenses/lgpl.html

"""Training of :class:`~etikettr.models.seq2seq.Seq2SeqClassifier`.

Teacher-forced negative log-likelihood of the gold label sequences, gradients clipped
elementwise to [-clip, clip], Adam with bias correction, and a learning rate halved after every
epoch. After each epoch the model is scored on the development set and the parameters with the
best development micro-F1 are kept.

Examples
--------
>>> from etikettr.config import TrainConfig
>>> from etikettr.corpora.labeledcorpus import LabeledCorpus
>>> from etikettr.models.trainer import train
>>> model, history = train(TrainConfig.desk(epochs=3), LabeledCorpus('train.jsonl'), LabeledCorpus('dev.jsonl'))

"""

from collections import Counter, OrderedDict
import logging

import numpy as np

from etikettr import metrics
from etikettr import tensor as T
from etikettr.corpora.labeledcorpus import encode_corpus, make_batches
from etikettr.models.callbacks import EpochLogger
from etikettr.models.seq2seq import Seq2SeqClassifier


logger = logging.getLogger(__name__)

MIN_PROBABILITY = 1e-12

warning_counts = Counter()


class NonFiniteGradientError(ValueError):
    """A gradient holding NaN or infinity; `name` is the parameter."""

    def __init__(self, name):
        self.name = name
        super(NonFiniteGradientError, self).__init__("non-finite gradient for parameter %s" % name)


def sequence_loss(distributions, gold, mask=None):
    """Mean negative log-probability of the gold labels over all valid steps.

    Parameters
    ----------
    distributions : list of Tensor
        One distribution per gold step, each (V,) or (B, V).
    gold : numpy.ndarray of int
        Gold ids, shape (S,) or (B, S) with S == len(distributions).
    mask : numpy.ndarray of bool, optional
        Valid steps, same shape as `gold`; padding steps do not count.

    Returns
    -------
    Tensor
        Scalar loss. Steps, not examples, are weighted equally. Gold probabilities below 1e-12
        are clamped there; such events are logged and counted in `warning_counts`.

    """
    gold = np.asarray(gold, dtype=np.int64)
    if gold.ndim == 1:
        gold = gold[np.newaxis, :]
        distributions = [T.reshape(P, (1,) + P.shape) if P.ndim == 1 else P for P in distributions]
    mask = np.ones(gold.shape, dtype=bool) if mask is None else np.asarray(mask, dtype=bool).reshape(gold.shape)
    if len(distributions) != gold.shape[1]:
        raise ValueError("%d distributions for %d gold steps" % (len(distributions), gold.shape[1]))
    valid = int(mask.sum())
    if valid == 0:
        raise ValueError("sequence_loss: no valid steps")

    terms = []
    clamped = 0
    for t, P in enumerate(distributions):
        p = T.pick(P, gold[:, t])
        clamped += int(np.sum((p.data < MIN_PROBABILITY) & mask[:, t]))
        logp = T.log(T.clamp(p, low=MIN_PROBABILITY))
        if not mask[:, t].all():
            logp = T.where(mask[:, t], logp, T.constant(np.zeros(logp.shape), like=logp))
        terms.append(T.sum(logp))
    if clamped:
        warning_counts['clamped_probability'] += clamped
        logger.warning("clamped %i gold probabilities below %g", clamped, MIN_PROBABILITY)
    return T.scale(T.sum(T.stack(terms)), -1.0 / valid)


def clip_gradients(grads, low=-10.0, high=10.0):
    """Clamp every gradient component into [low, high], in place.

    Parameters
    ----------
    grads : dict of (str, numpy.ndarray)

    Returns
    -------
    dict of (str, numpy.ndarray)
        `grads`.

    """
    for g in grads.values():
        np.clip(g, low, high, out=g)
    return grads


class OptimizerState(object):
    """Adam moments per parameter, step counter and hyperparameters.

    Attributes
    ----------
    m, v : OrderedDict of (str, numpy.ndarray)
        First and second moment estimates, shaped like the parameters.
    step : int
        Number of updates applied so far.
    lr : float
        Learning rate of the next update.

    """
    def __init__(self, params, lr=0.0003, beta1=0.9, beta2=0.999, eps=1e-8):
        self.m = OrderedDict((name, np.zeros_like(p.data)) for name, p in params.items())
        self.v = OrderedDict((name, np.zeros_like(p.data)) for name, p in params.items())
        self.step = 0
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps


def adam_update(params, grads, state):
    """Apply one bias-corrected Adam update to `params` in place.

    Raises
    ------
    NonFiniteGradientError
        If a gradient contains NaN or infinity; no parameter is changed then.

    """
    for name, g in grads.items():
        if not np.isfinite(g).all():
            raise NonFiniteGradientError(name)
    state.step += 1
    b1, b2 = state.beta1, state.beta2
    correction1 = 1.0 - b1 ** state.step
    correction2 = 1.0 - b2 ** state.step
    for name, g in grads.items():
        m, v = state.m[name], state.v[name]
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * g * g
        m_hat = m / correction1
        v_hat = v / correction2
        params[name].data -= state.lr * m_hat / (np.sqrt(v_hat) + state.eps)


def lr_schedule(epoch, base_lr=0.0003, decay=0.5):
    """Learning rate of 0-based `epoch`: base_lr * decay ** epoch."""
    if epoch < 0:
        raise ValueError("epoch must be >= 0, got %d" % epoch)
    return base_lr * decay ** epoch


def train_batch(model, batch, state, clip):
    """One teacher-forced update; returns the batch loss and its number of valid steps."""
    with T.Graph() as graph:
        loss = sequence_loss(model.distributions(batch), batch.labels, batch.label_mask)
        graph.backward(loss)
    grads = OrderedDict()
    for name, p in model.params.items():
        grads[name] = np.array(p.grad) if p.grad is not None else np.zeros_like(p.data)
        p.zero_grad()
    adam_update(model.params, clip_gradients(grads, -clip, clip), state)
    return loss.item(), int(batch.label_lengths.sum())


def evaluate(model, examples, bands=(), batch_size=64):
    """Score greedy predictions of `model` on encoded `examples`.

    Returns
    -------
    :class:`~etikettr.metrics.EvalReport`

    """
    predictions = model.predict_examples(examples, batch_size=batch_size)
    gold = [ex.labels.tolist() for ex in examples]
    return metrics.evaluate_sets(predictions, gold, model.labelvocab, bands)


def train(config, train_corpus, dev_corpus, callbacks=None):
    """Train a model on `train_corpus`, selecting the epoch with the best micro-F1 on `dev_corpus`.

    Parameters
    ----------
    config : :class:`~etikettr.config.TrainConfig`
    train_corpus, dev_corpus : :class:`~etikettr.interfaces.CorpusABC`
        Documents as `(text, labels)`; vocabularies come from the training documents.
    callbacks : list of :class:`~etikettr.models.callbacks.Callback`, optional
        Defaults to an :class:`~etikettr.models.callbacks.EpochLogger`.

    Returns
    -------
    (:class:`~etikettr.models.seq2seq.Seq2SeqClassifier`, list of OrderedDict)
        The model holding the best-dev parameters, and one history record per epoch with keys
        epoch, loss, lr, dev_hl, dev_p, dev_r, dev_f1.

    Raises
    ------
    ValueError
        For an invalid config or an empty (after encoding) training or development set.

    """
    config.validate()
    callbacks = [EpochLogger()] if callbacks is None else list(callbacks)
    if len(dev_corpus) == 0:
        raise ValueError("development set is empty")
    vocab, labelvocab = train_corpus.build_vocabularies(config.vocab_size)
    train_examples = encode_corpus(train_corpus, vocab, labelvocab, config.max_len)
    dev_examples = encode_corpus(dev_corpus, vocab, labelvocab, config.max_len)
    if not train_examples:
        raise ValueError("no usable training documents")
    if not dev_examples:
        raise ValueError("development set is empty after encoding")

    model = Seq2SeqClassifier(vocab, labelvocab, config.model_config(), seed=config.seed)
    state = OptimizerState(model.params, config.learning_rate, config.beta1, config.beta2, config.adam_eps)
    logger.info(
        "training on %i documents (%i dev) for %i epochs, batch size %i",
        len(train_examples), len(dev_examples), config.epochs, config.batch_size
    )
    for callback in callbacks:
        callback.on_train_begin(model)

    history = []
    best_f1, best = None, None
    epoch, finished = 0, False
    try:
        for epoch in range(config.epochs):
            for callback in callbacks:
                callback.on_epoch_begin(epoch)
            state.lr = lr_schedule(epoch, config.learning_rate, config.lr_decay)
            total, steps = 0.0, 0
            for batchno, batch in enumerate(make_batches(train_examples, config.batch_size, (config.seed, epoch))):
                loss, n = train_batch(model, batch, state, config.clip)
                total += loss * n
                steps += n
                logger.debug("epoch %i batch %i: loss %.4f", epoch, batchno, loss)

            report = evaluate(model, dev_examples)
            record = OrderedDict([
                ('epoch', epoch), ('loss', total / steps), ('lr', state.lr),
                ('dev_hl', report.hl), ('dev_p', report.p), ('dev_r', report.r), ('dev_f1', report.f1),
            ])
            history.append(record)
            if best_f1 is None or report.f1 > best_f1:
                best_f1, best = report.f1, model.parameters_snapshot()
            for callback in callbacks:
                callback.on_epoch_end(epoch, record)
        finished = True
    finally:
        if not finished:
            for callback in callbacks:
                callback.on_train_abort(epoch)

    model.restore(best)
    for callback in callbacks:
        callback.on_train_end(history)
    return model, history

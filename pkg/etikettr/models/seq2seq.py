#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# Licensed under the GNU LGPL v2.1 - http://www.gnu.org/licenses/lgpl.html

"""Sequence-to-sequence multi-label classifier.

The model reads a document with a bidirectional LSTM, optionally condenses the annotations into
semantic units (dilated convolutions, or the hierarchical baseline when `hier` > 0), and
generates the document's labels one by one, most frequent first, until EOS.

Examples
--------
>>> from etikettr.config import ModelConfig
>>> from etikettr.corpora.labeledcorpus import LabeledCorpus
>>> from etikettr.models.seq2seq import Seq2SeqClassifier
>>> corpus = LabeledCorpus(records=[("zo ba ke", ["a"]), ("ke ru", ["b", "a"])])
>>> vocab, labelvocab = corpus.build_vocabularies(cap=100)
>>> model = Seq2SeqClassifier(vocab, labelvocab, ModelConfig(embedding_size=8, hidden_size=4), seed=1)
>>> labels = model.predict(["zo ke"])

Save and load the model with :meth:`~etikettr.utils.SaveLoad.save` and
:meth:`~etikettr.utils.SaveLoad.load`; the parameters go to `<fname>.params.npz`.

"""

from collections import OrderedDict
import logging

import numpy as np

from etikettr import tensor as T
from etikettr import utils
from etikettr.config import ModelConfig
from etikettr.corpora.labeledcorpus import Batch, encode_example
from etikettr.models.decoder import DecoderParams, greedy_decode, teacher_forced, uses_units
from etikettr.models.encoder import LstmParams, bilstm_encode, hier_encode
from etikettr.models.mdc import DilationSchedule, initialize_mdc, mdc_forward, mdc_layers


logger = logging.getLogger(__name__)


class Seq2SeqClassifier(utils.SaveLoad):
    """Encoder, semantic-unit layer and attentive label decoder with their parameters.

    Parameters
    ----------
    vocab : :class:`~etikettr.corpora.dictionary.Vocabulary`
    labelvocab : :class:`~etikettr.corpora.labeldictionary.LabelVocabulary`
    config : :class:`~etikettr.config.ModelConfig`, optional
    seed : int, optional
        Root seed; weights come from its `init` stream, uniform in [-init_scale, init_scale].

    Attributes
    ----------
    params : OrderedDict of (str, :class:`~etikettr.tensor.Tensor`)
        Every trainable tensor by name.

    """
    _archived = ('params',)

    def __init__(self, vocab, labelvocab, config=None, seed=1):
        self.vocab = vocab
        self.labelvocab = labelvocab
        self.config = (config if config is not None else ModelConfig()).validate()
        self.seed = seed
        self.params = OrderedDict()
        self._initialize()
        logger.info(
            "initialized %s attention model with %i parameters (%s)",
            self.config.attention_variant, self.num_parameters(), self.units_kind or "no semantic units"
        )

    @property
    def variant(self):
        return self.config.attention_variant

    @property
    def schedule(self):
        return DilationSchedule(self.config.kernel_size, self.config.dilation_rates)

    @property
    def units_kind(self):
        """'hier', 'mdc', or None when the attention variant reads no semantic units."""
        if not uses_units(self.variant):
            return None
        return 'hier' if self.config.hier > 0 else 'mdc'

    @property
    def dtype(self):
        return T.dtype_of(self.config.precision)

    def _initialize(self):
        config = self.config
        rng = utils.get_random_state(self.seed, 'init')
        scale, dtype = config.init_scale, self.dtype
        D, H = config.embedding_size, config.hidden_size
        if config.hier > 0 and not uses_units(self.variant):
            logger.warning("hier=%d has no effect with attention variant %s", config.hier, self.variant)

        self.params['embedding'] = T.uniform((len(self.vocab), D), rng, scale, dtype=dtype, name='embedding')
        LstmParams.initialize(self.params, 'encoder.fwd', D, H, rng, scale, dtype)
        LstmParams.initialize(self.params, 'encoder.bwd', D, H, rng, scale, dtype)
        if self.units_kind == 'hier':
            LstmParams.initialize(self.params, 'hier', 2 * H, H, rng, scale, dtype)
        elif self.units_kind == 'mdc':
            initialize_mdc(self.params, 'mdc', self.schedule.validate(), 2 * H, H, rng, scale, dtype)
        DecoderParams.initialize(
            self.params, self.variant, D, H, 2 * H, H, self.labelvocab.num_outputs, rng, scale, dtype
        )

    def num_parameters(self):
        """Number of learned scalars."""
        return int(sum(t.size for t in self.params.values()))

    def encode(self, tokens, lengths):
        """Word annotations and semantic units (None if the variant reads none) of a padded batch."""
        params = self.params
        h = bilstm_encode(
            tokens, params['embedding'],
            LstmParams.from_params(params, 'encoder.fwd'), LstmParams.from_params(params, 'encoder.bwd'),
            lengths=lengths,
        )
        if self.units_kind == 'hier':
            g = hier_encode(h, self.config.hier, LstmParams.from_params(params, 'hier'))
        elif self.units_kind == 'mdc':
            g = mdc_forward(h, self.schedule, mdc_layers(params, 'mdc', self.schedule))
        else:
            g = None
        return h, g

    def distributions(self, batch):
        """Teacher-forced label distributions, one (B, L + 1) tensor per gold step."""
        h, g = self.encode(batch.tokens, batch.lengths)
        return teacher_forced(h, g, batch.labels, self.variant, DecoderParams.from_params(self.params, self.variant))

    def decode(self, tokens, lengths):
        """Greedy label ids of each example of a padded batch."""
        with T.no_grad():
            h, g = self.encode(tokens, lengths)
            return greedy_decode(
                h, g, self.variant, DecoderParams.from_params(self.params, self.variant),
                mask_emitted=self.config.mask_emitted,
            )

    def predict_examples(self, examples, batch_size=64):
        """Predicted label id sets of `examples`, in input order."""
        predictions = []
        for start in range(0, len(examples), batch_size):
            batch = Batch(examples[start:start + batch_size], eos_id=self.labelvocab.eos_id)
            predictions.extend(self.decode(batch.tokens, batch.lengths))
        return predictions

    def predict(self, texts, batch_size=64):
        """Label names of raw `texts`.

        Texts longer than `max_len` tokens are truncated rather than skipped.

        Returns
        -------
        list of list of str
            Most frequent label first.

        """
        placeholder = [self.labelvocab.id2label[0]]
        examples = [
            encode_example(text, placeholder, self.vocab, self.labelvocab, max_len=self.config.max_len, truncate=True)
            for text in texts
        ]
        return [
            [self.labelvocab.id2label[i] for i in sorted(ids)]
            for ids in self.predict_examples(examples, batch_size)
        ]

    def parameters_snapshot(self):
        """Copy of every parameter's values."""
        return OrderedDict((name, t.data.copy()) for name, t in self.params.items())

    def restore(self, snapshot):
        """Overwrite parameter values from :meth:`parameters_snapshot` output."""
        for name, values in snapshot.items():
            self.params[name].data[...] = values

    def _load_specials(self, fname):
        super(Seq2SeqClassifier, self)._load_specials(fname)
        self.params = OrderedDict(self.params)
        missing = set(self._expected_names()) - set(self.params)
        if missing:
            raise ValueError("checkpoint %s lacks parameters %s" % (fname, sorted(missing)))
        wrong = [name for name, t in self.params.items() if t.dtype != self.dtype]
        if wrong:
            raise ValueError("checkpoint %s stores %s at another precision than %s" % (fname, wrong, self.config.precision))

    def _expected_names(self):
        names = OrderedDict()
        rng = np.random.RandomState(0)
        names['embedding'] = None
        for prefix in ('encoder.fwd', 'encoder.bwd'):
            names.update((prefix + suffix, None) for suffix in ('.W', '.U', '.b'))
        if self.units_kind == 'hier':
            names.update(('hier' + suffix, None) for suffix in ('.W', '.U', '.b'))
        elif self.units_kind == 'mdc':
            for layer in range(len(self.schedule)):
                names.update((('mdc.%d.kernel' % layer, None), ('mdc.%d.bias' % layer, None)))
        decoder = OrderedDict()
        DecoderParams.initialize(decoder, self.variant, 1, 1, 2, 1, self.labelvocab.num_outputs, rng, 0.1)
        names.update((name, None) for name in decoder)
        return list(names)

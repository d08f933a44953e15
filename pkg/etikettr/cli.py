#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# Licensed under the GNU LGPL v2.1 - http://www.gnu.org/licenses/lgpl.html

"""
USAGE: %(program)s COMMAND [OPTIONS]

Commands:

    gencorpus   write a synthetic planted-phrase corpus (train/dev/test + manifest)
    train       train a classifier, keeping the epoch with the best dev micro-F1
    eval        score a checkpoint on a corpus
    ablate      train every attention variant (and optional Hier-N encoders) under one seed
    predict     label the documents of a corpus with a checkpoint

Every command writes its fully resolved configuration to `config.resolved` in its output
directory; passing that file back with --config repeats the run.

Example:
    python -m etikettr gencorpus --seed 1 --out data
    python -m etikettr train --preset desk --data data --variant hybrid --out run
    python -m etikettr eval --checkpoint run/model --data data/test.jsonl --bands 2,4
"""

import argparse
from collections import OrderedDict
import json
import logging
import os
import sys

import numpy as np

from etikettr import config as cfg
from etikettr import utils
from etikettr.corpora.labeledcorpus import LabeledCorpus, encode_corpus
from etikettr.corpora.synthetic import SyntheticConfig, write_synthetic_corpus
from etikettr.metrics import default_bands
from etikettr.models.callbacks import EpochLogger, HistoryWriter
from etikettr.models.decoder import VARIANTS
from etikettr.models.seq2seq import Seq2SeqClassifier
from etikettr.models.trainer import evaluate, train


logger = logging.getLogger(__name__)

RESOLVED = 'config.resolved'
CHECKPOINT = 'model'
HISTORY = 'history.jsonl'
REPORT = 'report.txt'
TABLE = 'ablation.tsv'
PREDICTIONS = 'predictions.jsonl'

EXIT_RUNTIME = 1
EXIT_USAGE = 2


class GenCorpusConfig(SyntheticConfig):
    schema = SyntheticConfig.schema + (('seed', 'int', 1), ('out_dir', 'str', 'data'))


class EvalConfig(cfg.KeyValueConfig):
    schema = (
        ('checkpoint', 'str', ''),
        ('data', 'str', ''),
        ('bands', 'ints', ()),
        ('seed', 'int', 1),
        ('out_dir', 'str', 'out'),
    )


class AblateConfig(cfg.RunConfig):
    schema = cfg.RunConfig.schema + (
        ('bands', 'ints', ()),
        ('seeds', 'ints', ()),
        ('hier_sweep', 'ints', ()),
    )


def _bool(text):
    try:
        return cfg.parse_value('bool', text)
    except ValueError as err:
        raise argparse.ArgumentTypeError(str(err))


def _ints(text):
    try:
        return cfg.parse_value('ints', text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma-separated integers, got %r" % text)


def build_parser():
    parser = argparse.ArgumentParser(
        prog='etikettr', description="Multi-label text classification by label-sequence generation."
    )
    commands = parser.add_subparsers(dest='command', metavar='COMMAND')
    commands.required = True

    def shared(sub):
        sub.add_argument("--config", help="Typed key-value config file")
        sub.add_argument("--seed", type=int, help="Root random seed")
        sub.add_argument("--out", help="Output directory")

    def model_flags(sub, hier_type, hier_help):
        sub.add_argument("--preset", choices=sorted(cfg.RunConfig.PRESETS), help="Base defaults; default full")
        sub.add_argument("--data", help="Directory holding train.jsonl, dev.jsonl and optionally test.jsonl")
        sub.add_argument("--variant", choices=VARIANTS, help="Attention variant")
        sub.add_argument("--dilation-rates", type=_ints, help="Dilation rate of each conv layer, e.g. 1,2,3")
        sub.add_argument("--kernel-size", type=int, help="Convolution kernel size")
        sub.add_argument("--hier", type=hier_type, help=hier_help)
        sub.add_argument("--epochs", type=int, help="Number of training epochs")
        sub.add_argument("--hidden", type=int, help="LSTM and convolution width H")
        sub.add_argument("--mask-emitted", type=_bool, help="Mask already emitted labels when decoding")

    sub = commands.add_parser('gencorpus', help="Write a synthetic corpus")
    shared(sub)

    sub = commands.add_parser('train', help="Train a classifier")
    shared(sub)
    model_flags(sub, int, "Replace the convolutions by the hierarchical encoder with this sentence size")

    sub = commands.add_parser('eval', help="Evaluate a checkpoint")
    shared(sub)
    sub.add_argument("--checkpoint", help="Saved model")
    sub.add_argument("--data", help="Corpus file")
    sub.add_argument("--bands", type=_ints, help="Frequency-band cuts k, e.g. 10,20")

    sub = commands.add_parser('ablate', help="Compare attention variants")
    shared(sub)
    model_flags(sub, _ints, "Also train hybrid models over hierarchical encoders with these sentence sizes")
    sub.add_argument("--bands", type=_ints, help="Frequency-band cuts k; default 10,20,...,60 below the label count")
    sub.add_argument("--seeds", type=_ints, help="Repeat over these seeds and report medians")

    sub = commands.add_parser('predict', help="Label a corpus")
    shared(sub)
    sub.add_argument("--checkpoint", help="Saved model")
    sub.add_argument("--data", help="Corpus file")
    return parser


def _data_paths(data):
    if not data:
        return {}
    paths = {'train_path': os.path.join(data, 'train.jsonl'), 'dev_path': os.path.join(data, 'dev.jsonl')}
    test = os.path.join(data, 'test.jsonl')
    if os.path.exists(test):
        paths['test_path'] = test
    return paths


def resolve_config(args):
    """Merge the config file of `args` with its flags into the command's config object.

    Raises
    ------
    ValueError
        For an invalid setting, a rejected dilation schedule or a missing input path.

    """
    if args.command == 'gencorpus':
        config = GenCorpusConfig.from_file(args.config, seed=args.seed, out_dir=args.out) if args.config \
            else GenCorpusConfig(seed=args.seed, out_dir=args.out)
        config.subset(SyntheticConfig).validate()
        return config

    if args.command in ('eval', 'predict'):
        overrides = dict(checkpoint=args.checkpoint, data=args.data, seed=args.seed, out_dir=args.out)
        if args.command == 'eval':
            overrides['bands'] = args.bands
        config = EvalConfig.from_file(args.config, **overrides) if args.config else EvalConfig(**overrides)
        for path in (config.checkpoint, config.data):
            if not path or not os.path.exists(path):
                raise ValueError("missing input: %r" % path)
        return config

    overrides = dict(
        preset=args.preset, seed=args.seed, out_dir=args.out,
        attention_variant=args.variant, dilation_rates=args.dilation_rates, kernel_size=args.kernel_size,
        epochs=args.epochs, hidden_size=args.hidden, mask_emitted=args.mask_emitted,
    )
    overrides.update(_data_paths(args.data))
    if args.command == 'train':
        overrides['hier'] = args.hier
        config_class = cfg.RunConfig
    else:
        overrides.update(hier_sweep=args.hier, bands=args.bands, seeds=args.seeds)
        config_class = AblateConfig
    config = config_class.from_file(args.config, **overrides)
    config.validate()
    if args.command == 'ablate':
        for boundary in config.hier_sweep:
            if boundary < 1:
                raise ValueError("hier sentence sizes must be >= 1, got %d" % boundary)
        for _, row_config in ablation_rows(config):
            row_config.validate()
    for key in ('train_path', 'dev_path'):
        path = getattr(config, key)
        if not path or not os.path.exists(path):
            raise ValueError("missing %s: %r" % (key, path))
    return config


def cmd_gencorpus(config):
    manifest = write_synthetic_corpus(config.subset(SyntheticConfig), config.seed, config.out_dir)
    config.save(os.path.join(config.out_dir, RESOLVED))
    return manifest


def _corpora(config):
    train_corpus = LabeledCorpus(config.train_path)
    dev_corpus = LabeledCorpus(config.dev_path)
    test_corpus = LabeledCorpus(config.test_path) if config.test_path else None
    return train_corpus, dev_corpus, test_corpus


def _score(model, corpus, bands=()):
    examples = encode_corpus(corpus, model.vocab, model.labelvocab, model.config.max_len)
    if not examples:
        raise ValueError("no document of the corpus can be scored")
    return evaluate(model, examples, bands)


def cmd_train(config):
    utils.ensure_dir(config.out_dir)
    config.save(os.path.join(config.out_dir, RESOLVED))
    train_corpus, dev_corpus, test_corpus = _corpora(config)
    callbacks = [EpochLogger(), HistoryWriter(os.path.join(config.out_dir, HISTORY))]
    model, history = train(config.train_config(), train_corpus, dev_corpus, callbacks=callbacks)
    model.save(os.path.join(config.out_dir, CHECKPOINT))
    if test_corpus is not None:
        report = _score(model, test_corpus, default_bands(len(model.labelvocab)))
        _write_report(report, os.path.join(config.out_dir, REPORT))
        logger.info("test %s", report)
    return model, history


def _write_report(report, fname):
    with utils.file_or_filename(fname, mode='w') as fout:
        fout.write(report.to_text())


def check_labels(model, corpus):
    """Raise ValueError if `corpus` uses labels the model was not trained on."""
    unknown = sorted(set(corpus.label_counts()) - set(model.labelvocab.label2id))
    if unknown:
        raise ValueError("corpus labels unknown to the checkpoint: %s" % ", ".join(unknown))


def cmd_eval(config):
    utils.ensure_dir(config.out_dir)
    config.save(os.path.join(config.out_dir, RESOLVED))
    model = Seq2SeqClassifier.load(config.checkpoint)
    corpus = LabeledCorpus(config.data)
    check_labels(model, corpus)
    report = _score(model, corpus, config.bands)
    _write_report(report, os.path.join(config.out_dir, REPORT))
    sys.stdout.write(report.to_text())
    return report


def cmd_predict(config):
    utils.ensure_dir(config.out_dir)
    config.save(os.path.join(config.out_dir, RESOLVED))
    model = Seq2SeqClassifier.load(config.checkpoint)
    texts = [text for text, _ in LabeledCorpus(config.data)]
    predictions = model.predict(texts)
    fname = os.path.join(config.out_dir, PREDICTIONS)
    LabeledCorpus.save_corpus(fname, zip(texts, predictions))
    logger.info("wrote %i predictions to %s", len(predictions), fname)
    return predictions


def ablation_rows(config):
    """(row name, config) of every model the ablation trains, before seed repetition."""
    base = config.subset(cfg.RunConfig)
    rows = [(variant, base.copy(attention_variant=variant, hier=0)) for variant in VARIANTS]
    rows += [('hier-%d' % n, base.copy(attention_variant='hybrid', hier=n)) for n in config.hier_sweep]
    return rows


def format_table(columns, table):
    lines = ["\t".join(['model'] + columns + ['parameters'])]
    for name, row in table.items():
        lines.append("\t".join([name] + ["%.4f" % row[c] for c in columns] + ["%d" % row['parameters']]))
    return "\n".join(lines) + "\n"


def cmd_ablate(config):
    """Train every row under every seed, evaluate on the test split (dev if absent), report medians.

    The table file is rewritten after every row, so a failure leaves the finished rows behind.

    """
    utils.ensure_dir(config.out_dir)
    config.save(os.path.join(config.out_dir, RESOLVED))
    train_corpus, dev_corpus, test_corpus = _corpora(config)
    target = test_corpus if test_corpus is not None else dev_corpus
    seeds = list(config.seeds) or [config.seed]
    num_labels = len(train_corpus.label_counts())
    bands = list(config.bands) if config.bands else default_bands(num_labels)
    columns = ['hl', 'p', 'r', 'f1'] + ['band_f1_k%d' % k for k in bands]

    table = OrderedDict()
    table_fname = os.path.join(config.out_dir, TABLE)
    for name, row_config in ablation_rows(config):
        records, parameters = [], 0
        for seed in seeds:
            logger.info("ablation row %s, seed %i", name, seed)
            history_fname = os.path.join(config.out_dir, '%s.seed%d.%s' % (name, seed, HISTORY))
            model, _ = train(
                row_config.train_config().update(seed=seed), train_corpus, dev_corpus,
                callbacks=[EpochLogger(), HistoryWriter(history_fname)],
            )
            records.append(_score(model, target, bands).as_record())
            parameters = model.num_parameters()
        table[name] = OrderedDict((c, float(np.median([r[c] for r in records]))) for c in columns)
        table[name]['parameters'] = parameters
        with utils.file_or_filename(table_fname, mode='w') as fout:
            fout.write(format_table(columns, table))
    sys.stdout.write(format_table(columns, table))
    return table


COMMANDS = {
    'gencorpus': cmd_gencorpus,
    'train': cmd_train,
    'eval': cmd_eval,
    'ablate': cmd_ablate,
    'predict': cmd_predict,
}


def main(argv=None):
    """Run the command line `argv` (default sys.argv[1:]); returns the exit status."""
    logging.basicConfig(
        format='%(asctime)s : %(threadName)s : %(levelname)s : %(message)s',
        level=logging.INFO
    )
    argv = sys.argv[1:] if argv is None else list(argv)
    logger.info("running %s", " ".join(['etikettr'] + argv))

    args = build_parser().parse_args(argv)
    try:
        config = resolve_config(args)
    except (ValueError, IOError) as err:
        logger.error("invalid configuration: %s", err)
        sys.stderr.write("etikettr %s: %s\n" % (args.command, err))
        return EXIT_USAGE
    try:
        COMMANDS[args.command](config)
    except (ValueError, IOError) as err:
        logger.error("%s failed: %s", args.command, err)
        sys.stderr.write("etikettr %s: %s\n" % (args.command, err))
        return EXIT_RUNTIME
    logger.info("finished %s", args.command)
    return 0


if __name__ == '__main__':
    sys.exit(main())

#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# Licensed under the GNU LGPL v2.1 - http://www.gnu.org/licenses/lgpl.html

"""
Automated tests for the command line interface.
"""

import contextlib
import io
import json
import logging
import os
import shutil
import tempfile
import unittest

from etikettr import cli
from etikettr.config import RunConfig
from etikettr.corpora.labeledcorpus import LabeledCorpus
from etikettr.test.utils import datapath


def read_bytes(fname):
    with open(fname, 'rb') as fin:
        return fin.read()


def run(*argv):
    out = io.StringIO()
    with contextlib.redirect_stdout(out):
        status = cli.main(list(argv))
    return status, out.getvalue()


class TestCommandLine(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.tmp = tempfile.mkdtemp()
        cls.data = os.path.join(cls.tmp, 'data')
        cls.run_dir = os.path.join(cls.tmp, 'run')
        status, _ = run('gencorpus', '--config', datapath('synthetic_small.cfg'), '--seed', '3', '--out', cls.data)
        assert status == 0
        status, _ = run(
            'train', '--config', datapath('desk_tiny.cfg'), '--data', cls.data, '--seed', '1', '--out', cls.run_dir
        )
        assert status == 0

    @classmethod
    def tearDownClass(cls):
        shutil.rmtree(cls.tmp, ignore_errors=True)

    def path(self, *parts):
        return os.path.join(self.tmp, *parts)

    def test_gencorpus(self):
        self.assertEqual(
            sorted(os.listdir(self.data)), ['config.resolved', 'dev.jsonl', 'manifest.json', 'test.jsonl', 'train.jsonl'])
        sizes = [len(LabeledCorpus(os.path.join(self.data, '%s.jsonl' % name))) for name in ('train', 'dev', 'test')]
        self.assertEqual(sizes, [80, 10, 10])

    def test_gencorpus_is_reproducible(self):
        again = self.path('data_again')
        status, _ = run('gencorpus', '--config', datapath('synthetic_small.cfg'), '--seed', '3', '--out', again)
        self.assertEqual(status, 0)
        for name in ('train.jsonl', 'dev.jsonl', 'test.jsonl', 'manifest.json'):
            self.assertEqual(read_bytes(os.path.join(again, name)), read_bytes(os.path.join(self.data, name)))

    def test_train_outputs(self):
        for name in ('config.resolved', 'history.jsonl', 'model', 'model.params.npz', 'report.txt'):
            self.assertTrue(os.path.exists(os.path.join(self.run_dir, name)), name)
        with open(os.path.join(self.run_dir, 'history.jsonl')) as fin:
            history = [json.loads(line) for line in fin]
        self.assertEqual(len(history), 1)
        self.assertEqual(history[0]['epoch'], 0)
        resolved = RunConfig.from_file(os.path.join(self.run_dir, 'config.resolved'))
        self.assertEqual(resolved.preset, 'desk')
        self.assertEqual(resolved.hidden_size, 8)
        self.assertEqual(resolved.seed, 1)
        self.assertEqual(resolved.train_path, os.path.join(self.data, 'train.jsonl'))

    def test_gridding_schedule_is_a_usage_error(self):
        status, _ = run(
            'train', '--config', datapath('desk_tiny.cfg'), '--data', self.data,
            '--dilation-rates', '2,4,8', '--out', self.path('rejected'),
        )
        self.assertEqual(status, cli.EXIT_USAGE)
        self.assertFalse(os.path.exists(self.path('rejected')))

    def test_ablate_checks_schedule_for_every_row(self):
        status, _ = run(
            'ablate', '--config', datapath('desk_tiny.cfg'), '--data', self.data, '--variant', 'none',
            '--dilation-rates', '2,4,8', '--out', self.path('rejected_ablation'),
        )
        self.assertEqual(status, cli.EXIT_USAGE)
        self.assertFalse(os.path.exists(self.path('rejected_ablation')))

    def test_missing_data_is_a_usage_error(self):
        status, _ = run('train', '--preset', 'desk', '--data', self.path('nowhere'), '--out', self.path('x'))
        self.assertEqual(status, cli.EXIT_USAGE)
        status, _ = run('eval', '--checkpoint', self.path('nowhere'), '--data', os.path.join(self.data, 'test.jsonl'))
        self.assertEqual(status, cli.EXIT_USAGE)

    def test_unknown_flag(self):
        with self.assertRaises(SystemExit) as ctx:
            cli.main(['train', '--learning-rate', '0.1'])
        self.assertEqual(ctx.exception.code, 2)
        with self.assertRaises(SystemExit) as ctx:
            cli.main(['train', '--variant', 'bahdanau'])
        self.assertEqual(ctx.exception.code, 2)

    def test_eval(self):
        argv = ['eval', '--checkpoint', os.path.join(self.run_dir, 'model'),
                '--data', os.path.join(self.data, 'test.jsonl'), '--bands', '1,2']
        status, first = run(*(argv + ['--out', self.path('eval1')]))
        self.assertEqual(status, 0)
        status, second = run(*(argv + ['--out', self.path('eval2')]))
        self.assertEqual(status, 0)
        self.assertEqual(first, second)
        self.assertEqual(read_bytes(self.path('eval1', 'report.txt')).decode('utf8'), first)
        keys = [line.split(' = ')[0] for line in first.splitlines()]
        self.assertEqual(keys, ['hl', 'p', 'r', 'f1', 'band_f1_k1', 'band_f1_k2'])

    def test_eval_unknown_labels(self):
        fname = self.path('foreign.jsonl')
        LabeledCorpus.save_corpus(fname, [("a document about elections", ["politics"])])
        status, _ = run('eval', '--checkpoint', os.path.join(self.run_dir, 'model'), '--data', fname,
                        '--out', self.path('foreign'))
        self.assertEqual(status, cli.EXIT_RUNTIME)

    def test_predict(self):
        test_fname = os.path.join(self.data, 'test.jsonl')
        status, _ = run('predict', '--checkpoint', os.path.join(self.run_dir, 'model'), '--data', test_fname,
                        '--out', self.path('predict'))
        self.assertEqual(status, 0)
        predictions = LabeledCorpus(self.path('predict', 'predictions.jsonl'))
        gold = LabeledCorpus(test_fname)
        self.assertEqual(len(predictions), len(gold))
        known = set(LabeledCorpus(os.path.join(self.data, 'train.jsonl')).label_counts())
        for (text, labels), (gold_text, _) in zip(predictions, gold):
            self.assertEqual(text, gold_text)
            self.assertTrue(set(labels) <= known)

    def test_ablate(self):
        out = self.path('ablate')
        status, printed = run(
            'ablate', '--config', datapath('desk_tiny.cfg'), '--data', self.data, '--hier', '2',
            '--bands', '1', '--out', out,
        )
        self.assertEqual(status, 0)
        table = read_bytes(os.path.join(out, 'ablation.tsv')).decode('utf8')
        self.assertEqual(table, printed)
        rows = [line.split('\t') for line in table.splitlines()]
        self.assertEqual(rows[0], ['model', 'hl', 'p', 'r', 'f1', 'band_f1_k1', 'parameters'])
        self.assertEqual([row[0] for row in rows[1:]],
                         ['none', 'conventional', 'mdc_only', 'additive', 'hybrid', 'hier-2'])
        for row in rows[1:]:
            self.assertTrue(0.0 <= float(row[4]) <= 1.0)
        self.assertTrue(os.path.exists(os.path.join(out, 'hybrid.seed1.history.jsonl')))


if __name__ == '__main__':
    logging.basicConfig(format='%(asctime)s : %(levelname)s : %(message)s', level=logging.DEBUG)
    unittest.main()

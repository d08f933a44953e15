#!/usr/bin/env python
# encoding: utf-8


"""
Common utils for tests
"""
import contextlib
import os
import shutil
import tempfile

import numpy as np

from etikettr import tensor as T
from etikettr.corpora.labeledcorpus import LabeledCorpus

module_path = os.path.dirname(__file__)  # needed because sample data files are located in the same folder


def datapath(fname):
    """Return full path to the pre created file with test data (basically corpus)."""
    return os.path.join(module_path, 'test_data', fname)


def get_tmpfile(suffix):
    """
    Return full path to temporary file with required suffix.

    Function doesn't create file. Double calling with the same suffix can return different paths.
    """
    return os.path.join(tempfile.gettempdir(), suffix)


@contextlib.contextmanager
def temporary_file(name=""):
    """create a temporary directory and return a path to "name" in that directory

    At the end of the context, the directory is removed.

    The function doesn't create the file.
    """
    tmp = tempfile.mkdtemp()
    try:
        yield os.path.join(tmp, name)
    finally:
        shutil.rmtree(tmp, ignore_errors=True)


# tiny labeled corpus: each label has a few telling words
common_records = [
    ("the striker scored twice in the final", ["sports"]),
    ("the museum opened a new painting exhibition", ["art"]),
    ("young players joined the club academy", ["sports", "youth"]),
    ("school children painted a mural", ["art", "youth"]),
    ("the goalkeeper saved a penalty in 1984", ["sports"]),
    ("the orchestra played a concert for students", ["art", "youth"]),
    ("the coach praised the team after the match", ["sports"]),
    ("a sculpture was sold at the auction", ["art"]),
    ("teenagers trained at the summer football camp", ["sports", "youth"]),
    ("the gallery showed young photographers", ["art", "youth"]),
]

common_corpus = LabeledCorpus(records=common_records)


def analytic_gradient(f, x):
    """Gradient of scalar `f(x)` with respect to tensor `x` from one backward pass; `x.grad` is left as it was."""
    saved = x.grad
    x.grad = None
    try:
        with T.Graph() as graph:
            graph.backward(f(x))
        return x.grad if x.grad is not None else np.zeros_like(x.data)
    finally:
        x.grad = saved

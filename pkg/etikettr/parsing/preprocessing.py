#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# Licensed under the GNU LGPL v2.1 - http://www.gnu.org/licenses/lgpl.html

"""This module contains methods for turning raw corpus text into tokens.

The corpus format carries pre-tokenized text, so tokenization is whitespace splitting after
lowercasing. Tokens made only of digits are masked by :const:`NUM_TOKEN` before anything is counted.

Examples:
---------
>>> from etikettr.parsing.preprocessing import preprocess_string
>>> preprocess_string("Sports  results of 1984 ARE in")
['sports', 'results', 'of', '#', 'are', 'in']


Data:
-----

.. data:: NUM_TOKEN - Surface form that replaces digit-only tokens.
.. data:: UNK_TOKEN - Surface form of out-of-vocabulary tokens.
.. data:: RE_NUMERIC - Regexp matching a digit-only token.
.. data:: RE_WHITESPACE - Regexp for search space characters.
.. data:: DEFAULT_FILTERS - List of token filters applied by :func:`preprocess_string`.

"""

import re

from etikettr import utils


NUM_TOKEN = '#'
UNK_TOKEN = 'UNK'

RE_NUMERIC = re.compile(r"^[0-9]+$", re.UNICODE)
RE_WHITESPACE = re.compile(r"(\s)+", re.UNICODE)


def strip_multiple_whitespaces(s):
    """Collapse runs of whitespace in `s` to single spaces.

    Parameters
    ----------
    s : str

    Returns
    -------
    str

    Examples
    --------
    >>> strip_multiple_whitespaces("salut" + '\\r' + " les" + '\\n' + "         loulous!")
    'salut les loulous!'

    """
    s = utils.to_unicode(s)
    return RE_WHITESPACE.sub(" ", s)


def lowercase(token):
    return token.lower()


def mask_numeric(token):
    """Replace a token made only of digits with :const:`NUM_TOKEN`."""
    return NUM_TOKEN if RE_NUMERIC.match(token) else token


DEFAULT_FILTERS = [lowercase, mask_numeric]


def preprocess_string(s, filters=DEFAULT_FILTERS):
    """Split `s` on whitespace and apply each of `filters` to every token, in order.

    Parameters
    ----------
    s : str
    filters : list of callable, optional
        Token -> token functions.

    Returns
    -------
    list of str
        Processed tokens.

    """
    tokens = strip_multiple_whitespaces(s).split()
    for f in filters:
        tokens = [f(token) for token in tokens]
    return tokens

#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# Licensed under the GNU LGPL v2.1 - http://www.gnu.org/licenses/lgpl.html

"""This module contains various general utility functions."""

import logging
import numbers
import os
import pickle as _pickle
import zlib

import numpy as np

from smart_open import open as smart_open


logger = logging.getLogger(__name__)


def stream_code(name):
    """Map a subsystem name to a stable 32-bit integer.

    Parameters
    ----------
    name : str
        Subsystem name, e.g. 'init', 'batching', 'generation'.

    Returns
    -------
    int
        CRC32 of the utf8-encoded name; identical across runs and platforms.

    """
    return zlib.crc32(any2utf8(name)) & 0xffffffff


def get_random_state(seed, stream=None):
    """Generate :class:`numpy.random.RandomState` based on input seed.

    Parameters
    ----------
    seed : {None, int, array_like, :class:`numpy.random.RandomState`}
        Root seed for random state.
    stream : str, optional
        Name of the subsystem drawing from the state. Different streams of the same root seed
        give independent, reproducible generators.

    Returns
    -------
    :class:`numpy.random.RandomState`
        Random state.

    Raises
    ------
    ValueError
        If seed is not {None, int, array_like, RandomState}.

    Notes
    -----
    Method originally from [1]_ and written by @joshloyal.

    References
    ----------
    .. [1] https://github.com/maciejkula/glove-python

    """
    if isinstance(seed, np.random.RandomState):
        return seed
    if seed is None or seed is np.random:
        if stream is None:
            return np.random.mtrand._rand
        seed = 0
    if isinstance(seed, (numbers.Integral, np.integer)):
        if stream is None:
            return np.random.RandomState(int(seed))
        return np.random.RandomState([int(seed) & 0xffffffff, stream_code(stream)])
    if isinstance(seed, (list, tuple)):
        return np.random.RandomState(list(seed) + ([stream_code(stream)] if stream is not None else []))
    raise ValueError('%r cannot be used to seed a np.random.RandomState instance' % seed)


def file_or_filename(input, mode='rb'):
    """Open file with `smart_open`.

    Parameters
    ----------
    input : str or file-like
        Filename or file-like object.
    mode : str, optional
        Mode used when `input` is a filename.

    Returns
    -------
    input : file-like object
        Opened file OR seek out to 0 byte if `input` is already file-like object.

    """
    if isinstance(input, str):
        # input was a filename: open as file
        return smart_open(input, mode)
    else:
        # input already a file-like object; just reset to the beginning
        input.seek(0)
        return input


def any2utf8(text, errors='strict', encoding='utf8'):
    """Convert `text` to bytestring in utf8.

    Parameters
    ----------
    text : str or bytes
        Input text.
    errors : str, optional
        Error handling behaviour when `text` is a bytestring.
    encoding : str, optional
        Encoding of `text` when it is a bytestring.

    Returns
    -------
    bytes
        Bytestring in utf8.

    """
    if isinstance(text, str):
        return text.encode('utf8')
    # do bytestring -> unicode -> utf8 full circle, to ensure valid utf8
    return str(text, encoding, errors=errors).encode('utf8')


to_utf8 = any2utf8


def any2unicode(text, encoding='utf8', errors='strict'):
    """Convert `text` to unicode.

    Parameters
    ----------
    text : str or bytes
        Input text.
    encoding : str, optional
        Encoding of `text` when it is a bytestring.
    errors : str, optional
        Error handling behaviour when `text` is a bytestring.

    Returns
    -------
    str
        Unicode version of `text`.

    """
    if isinstance(text, str):
        return text
    return str(text, encoding, errors=errors)


to_unicode = any2unicode


def ensure_dir(path):
    """Create directory `path` (and parents) if missing, raising IOError when it can't be done."""
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as err:
        raise IOError("cannot create output directory %s: %s" % (path, err))
    if not os.access(path, os.W_OK):
        raise IOError("output directory %s is not writable" % path)
    return path


class SaveLoad(object):
    """Objects which inherit from this class have save/load functions, which un/pickle them to disk.

    Attributes listed in the class-level `_archived` tuple must be mappings of parameter name ->
    :class:`~etikettr.tensor.Tensor`. They are kept out of the pickle and written to a flat
    checkpoint archive `<fname>.params.npz` instead
    (see :func:`~etikettr.tensor.save_checkpoint`).

    Warnings
    --------
    This uses pickle for de/serializing, so objects must not contain unpicklable attributes,
    such as lambda functions etc.

    """
    _archived = ()

    @classmethod
    def load(cls, fname):
        """Load a previously saved object (using :meth:`~etikettr.utils.SaveLoad.save`) from file.

        Parameters
        ----------
        fname : str
            Path to file that contains needed object.

        Returns
        -------
        object
            Object loaded from `fname`.

        Raises
        ------
        IOError
            If `fname` or its parameter archive is missing.

        """
        logger.info("loading %s object from %s", cls.__name__, fname)
        if not os.path.exists(fname):
            raise IOError("no such checkpoint: %s" % fname)
        obj = unpickle(fname)
        obj._load_specials(fname)
        logger.info("loaded %s", fname)
        return obj

    @staticmethod
    def archive_name(fname):
        """Name of the parameter archive accompanying the pickle `fname`."""
        return fname + '.params.npz'

    def _load_specials(self, fname):
        from etikettr.tensor import load_checkpoint

        archived = getattr(self, '__archived', [])
        if not archived:
            return
        arrays, _ = load_checkpoint(self.archive_name(fname))
        for attrib in archived:
            prefix = attrib + '/'
            setattr(self, attrib, {
                name[len(prefix):]: tensor for name, tensor in arrays.items() if name.startswith(prefix)
            })

    def _save_specials(self, fname):
        """Set aside the archived attributes and write them to the parameter archive.

        Returns
        -------
        dict
            {attrib: value} to restore after pickling.

        """
        from etikettr.tensor import save_checkpoint

        asides = {}
        flat = {}
        for attrib in self._archived:
            if not hasattr(self, attrib):
                continue
            asides[attrib] = getattr(self, attrib)
            for name, tensor in asides[attrib].items():
                flat['%s/%s' % (attrib, name)] = tensor
        if flat:
            logger.info("storing %i parameter arrays to %s", len(flat), self.archive_name(fname))
            save_checkpoint(self.archive_name(fname), flat)
        for attrib in asides:
            delattr(self, attrib)
        self.__dict__['__archived'] = list(asides)
        return asides

    def save(self, fname, pickle_protocol=2):
        """Save the object to file.

        Parameters
        ----------
        fname : str
            Path to output file. Parameters go to `fname + '.params.npz'`.
        pickle_protocol : int
            Protocol number for pickle.

        See Also
        --------
        :meth:`~etikettr.utils.SaveLoad.load`

        """
        logger.info("saving %s object under %s", self.__class__.__name__, fname)
        asides = self._save_specials(fname)
        try:
            pickle(self, fname, protocol=pickle_protocol)
        finally:
            # restore attribs handled specially
            for attrib, val in asides.items():
                setattr(self, attrib, val)
        logger.info("saved %s", fname)


def pickle(obj, fname, protocol=2):
    """Pickle object `obj` to file `fname`.

    Parameters
    ----------
    obj : object
        Any python object.
    fname : str
        Path to pickle file.
    protocol : int, optional
        Pickle protocol number.

    """
    with smart_open(fname, 'wb') as fout:  # 'b' for binary, needed on Windows
        _pickle.dump(obj, fout, protocol=protocol)


def unpickle(fname):
    """Load object from `fname`.

    Parameters
    ----------
    fname : str
        Path to pickle file.

    Returns
    -------
    object
        Python object loaded from `fname`.

    """
    with smart_open(fname, 'rb') as f:
        return _pickle.load(f, encoding='latin1')



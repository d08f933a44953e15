#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# Licensed under the GNU LGPL v2.1 - http://www.gnu.org/licenses/lgpl.html

"""Callbacks run by :func:`~etikettr.models.trainer.train` around the training epochs."""

import json
import logging

from etikettr import utils


logger = logging.getLogger(__name__)


class Callback(object):
    """
    Base class of training callbacks. Every hook is a no-op; subclasses override what they need.
    """
    def set_model(self, model):
        """
        Save the model instance being trained.
        """
        self.model = model

    def on_train_begin(self, model):
        self.set_model(model)

    def on_epoch_begin(self, epoch):
        pass

    def on_epoch_end(self, epoch, record):
        """
        Args:
            epoch : 0-based epoch number.
            record : the epoch's history record (loss, lr and dev metrics).
        """
        pass

    def on_train_end(self, history):
        pass

    def on_train_abort(self, epoch):
        """
        Called instead of `on_train_end` when training stops with an exception during `epoch`.
        """
        pass


class EpochLogger(Callback):
    """
    Log each epoch's history record at INFO level.
    """
    def on_epoch_end(self, epoch, record):
        logger.info(
            "epoch %i: loss %.4f, lr %.6f, dev HL %.4f P %.4f R %.4f F1 %.4f",
            epoch, record['loss'], record['lr'], record['dev_hl'], record['dev_p'], record['dev_r'], record['dev_f1']
        )

    def on_train_end(self, history):
        if history:
            best = max(history, key=lambda record: record['dev_f1'])
            logger.info("best dev F1 %.4f at epoch %i", best['dev_f1'], best['epoch'])


class HistoryWriter(Callback):
    """
    Write each epoch's history record as one JSON line to `fname`, flushing after every epoch.
    """
    def __init__(self, fname):
        self.fname = fname
        self.fout = None

    def on_train_begin(self, model):
        super(HistoryWriter, self).on_train_begin(model)
        self.fout = utils.file_or_filename(self.fname, mode='w')

    def on_epoch_end(self, epoch, record):
        self.fout.write(json.dumps(record) + "\n")
        self.fout.flush()

    def on_train_end(self, history):
        if self.fout is not None:
            self.fout.close()
            self.fout = None
            logger.info("wrote %i history records to %s", len(history), self.fname)

    def on_train_abort(self, epoch):
        if self.fout is not None:
            self.fout.close()
            self.fout = None
            logger.warning("training stopped in epoch %i; history in %s is partial", epoch, self.fname)

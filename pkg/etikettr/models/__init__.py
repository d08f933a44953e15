"""
This package contains the classifier: encoders, dilated convolutions, attentive decoder and training.
"""

from .seq2seq import Seq2SeqClassifier  # noqa:F401
from .trainer import train, evaluate  # noqa:F401

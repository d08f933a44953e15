"""
This package contains the labeled corpus format, vocabularies and the synthetic corpus generator.
"""

from .dictionary import Vocabulary, build_vocab  # noqa:F401
from .labeldictionary import LabelVocabulary, permute_labels  # noqa:F401
from .labeledcorpus import LabeledCorpus, Example, Batch, encode_example, encode_corpus, make_batches  # noqa:F401
from .synthetic import SyntheticConfig, generate_synthetic  # noqa:F401

"""This package contains functions to preprocess raw text"""

from .preprocessing import (NUM_TOKEN, UNK_TOKEN, preprocess_string, strip_multiple_whitespaces)  # noqa:F401

"""Multi-label text classification as label-sequence generation, with attention over semantic units."""

import logging

__version__ = '0.1.0'

logger = logging.getLogger('etikettr')
if len(logger.handlers) == 0:  # To ensure reload() doesn't add another one
    logger.addHandler(logging.NullHandler())

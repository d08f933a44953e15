#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# Licensed under the GNU LGPL v2.1 - http://www.gnu.org/licenses/lgpl.html

"""Typed key-value configuration.

A config file holds one setting per line, either ``key = value`` or ``key: type = value``.
``#`` starts a comment at the start of a line or after whitespace. Known types are ``int``, ``float``,
``bool``, ``str``, ``ints`` and ``floats`` (the last two comma-separated). Every config class declares a
schema, and values are coerced by it; unknown keys and disagreeing types are errors, never silently ignored.

Examples
--------
>>> from etikettr.config import RunConfig
>>> cfg = RunConfig(attention_variant='mdc_only', dilation_rates=(1, 2, 3))
>>> print(cfg.to_text().splitlines()[0])
preset: str = full

"""

from collections import OrderedDict
import logging
import re

from etikettr import utils


logger = logging.getLogger(__name__)

TYPES = ('int', 'float', 'bool', 'str', 'ints', 'floats')
TRUE_WORDS = ('true', 'yes', 'on', '1')
FALSE_WORDS = ('false', 'no', 'off', '0')
QUOTES = ('"', "'")

# a '#' opening a comment: at the start of a line or after whitespace
RE_COMMENT = re.compile(r'(?:^|(?<=\s))#')


def parse_value(vtype, text):
    """Parse the textual form `text` of a value of type `vtype`.

    Raises
    ------
    ValueError
        If `text` is not a valid `vtype`.

    """
    text = text.strip()
    if vtype == 'int':
        return int(text)
    if vtype == 'float':
        return float(text)
    if vtype == 'bool':
        if text.lower() in TRUE_WORDS:
            return True
        if text.lower() in FALSE_WORDS:
            return False
        raise ValueError("not a boolean: %r" % text)
    if vtype == 'str':
        if len(text) >= 2 and text[0] == text[-1] and text[0] in QUOTES:
            text = text[1:-1]
        return text
    if vtype == 'ints':
        return tuple(int(part) for part in text.split(',') if part.strip())
    if vtype == 'floats':
        return tuple(float(part) for part in text.split(',') if part.strip())
    raise ValueError("unknown type %r, expected one of %s" % (vtype, ", ".join(TYPES)))


def format_value(vtype, value):
    """Inverse of :func:`parse_value`."""
    if vtype == 'bool':
        return 'true' if value else 'false'
    if vtype in ('ints', 'floats'):
        return ",".join(repr(v) for v in value)
    if vtype == 'float':
        return repr(float(value))
    if vtype == 'str' and value and (value != value.strip() or '#' in value or value[0] in QUOTES):
        quote = "'" if '"' in value else '"'
        return quote + value + quote
    return str(value)


def strip_comment(line):
    """Drop the comment from one config line.

    A comment starts at a `#` that opens the line or follows whitespace. A value that starts with a
    quote is read up to its last matching quote, so a quoted value may contain ``' #'``.

    >>> strip_comment("out_dir = runs/#3  # third run")
    'out_dir = runs/#3  '

    """
    if line.lstrip().startswith('#'):
        return ''
    start = 0
    _, sep, raw = line.partition('=')
    value = raw.lstrip()
    if sep and value[:1] in QUOTES:
        start = line.rfind(value[0]) + 1
    match = RE_COMMENT.search(line, start)
    return line[:match.start()] if match else line


def coerce_value(vtype, value):
    """Check a Python `value` against `vtype`, converting lossless cases (int -> float, str -> any)."""
    if isinstance(value, str) and vtype != 'str':
        return parse_value(vtype, value)
    if vtype == 'int' and isinstance(value, int) and not isinstance(value, bool):
        return value
    if vtype == 'float' and isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if vtype == 'bool' and isinstance(value, bool):
        return value
    if vtype == 'str' and isinstance(value, str):
        return value
    if vtype in ('ints', 'floats') and isinstance(value, (list, tuple)):
        scalar = 'int' if vtype == 'ints' else 'float'
        return tuple(coerce_value(scalar, v) for v in value)
    raise ValueError("expected %s, got %r" % (vtype, value))


def read_config_file(fname):
    """Parse a config file into an ordered mapping key -> (declared type or None, raw text, line number).

    Raises
    ------
    ValueError
        On a line that is neither blank, a comment, nor a setting, on an unknown declared type,
        or on a key set twice.

    """
    entries = OrderedDict()
    with utils.file_or_filename(fname, mode='r') as fin:
        for lineno, line in enumerate(fin, start=1):
            line = strip_comment(line).strip()
            if not line:
                continue
            if '=' not in line:
                raise ValueError("%s:%d: expected 'key = value' or 'key: type = value'" % (fname, lineno))
            head, raw = line.split('=', 1)
            vtype = None
            if ':' in head:
                head, vtype = head.split(':', 1)
                vtype = vtype.strip()
                if vtype not in TYPES:
                    raise ValueError("%s:%d: unknown type %r" % (fname, lineno, vtype))
            key = head.strip()
            if key in entries:
                raise ValueError("%s:%d: key %r set twice" % (fname, lineno, key))
            entries[key] = (vtype, raw.strip(), lineno)
    return entries


class KeyValueConfig(object):
    """Base class of the flat, schema-checked configuration objects.

    Subclasses list their settings in `schema`, a sequence of ``(name, type, default)``.

    """
    schema = ()

    def __init__(self, **kwargs):
        for name, vtype, default in self.schema:
            setattr(self, name, default)
        self.update(**kwargs)

    @classmethod
    def fields(cls):
        return OrderedDict((name, (vtype, default)) for name, vtype, default in cls.schema)

    def update(self, **kwargs):
        """Set several settings at once, coercing each by the schema."""
        fields = self.fields()
        for name, value in kwargs.items():
            if name not in fields:
                raise ValueError("unknown %s key %r" % (self.__class__.__name__, name))
            if value is None:
                continue
            try:
                setattr(self, name, coerce_value(fields[name][0], value))
            except ValueError as err:
                raise ValueError("%s key %r: %s" % (self.__class__.__name__, name, err))
        return self

    def copy(self, **kwargs):
        return self.__class__(**self.as_dict()).update(**kwargs)

    def as_dict(self):
        return OrderedDict((name, getattr(self, name)) for name, _, _ in self.schema)

    def subset(self, config_class):
        """Settings of this config that `config_class` also declares, as a `config_class`."""
        own = self.as_dict()
        return config_class(**{name: own[name] for name in config_class.fields() if name in own})

    @classmethod
    def from_file(cls, fname, **overrides):
        """Load settings from `fname`, then apply `overrides` (None values are ignored).

        Raises
        ------
        ValueError
            Naming file and line, for an unknown key, a declared type disagreeing with the schema,
            or an unparseable value.

        """
        return cls(**cls.read_settings(fname)).update(**overrides)

    @classmethod
    def read_settings(cls, fname):
        """Schema-checked settings of `fname` as a dict, see :meth:`from_file`."""
        fields = cls.fields()
        values = {}
        for key, (vtype, raw, lineno) in read_config_file(fname).items():
            if key not in fields:
                raise ValueError("%s:%d: unknown key %r" % (fname, lineno, key))
            expected = fields[key][0]
            if vtype is not None and vtype != expected:
                raise ValueError("%s:%d: key %r declared %s, expected %s" % (fname, lineno, key, vtype, expected))
            try:
                values[key] = parse_value(expected, raw)
            except ValueError as err:
                raise ValueError("%s:%d: key %r: %s" % (fname, lineno, key, err))
        logger.info("loaded %i settings from %s", len(values), fname)
        return values

    def to_text(self):
        """Typed ``key: type = value`` form, one line per setting in schema order."""
        return "".join(
            "%s: %s = %s\n" % (name, vtype, format_value(vtype, getattr(self, name)))
            for name, vtype, _ in self.schema
        )

    def save(self, fname):
        """Write :meth:`to_text` to `fname`; reading it back with :meth:`from_file` gives an equal config."""
        with utils.file_or_filename(fname, mode='w') as fout:
            fout.write(self.to_text())
        logger.info("wrote resolved configuration to %s", fname)

    def __eq__(self, other):
        return type(self) is type(other) and self.as_dict() == other.as_dict()

    def __ne__(self, other):
        return not self == other

    def __repr__(self):
        return "%s(%s)" % (
            self.__class__.__name__, ", ".join("%s=%r" % item for item in self.as_dict().items())
        )


MODEL_SCHEMA = (
    ('vocab_size', 'int', 50000),
    ('max_len', 'int', 500),
    ('embedding_size', 'int', 512),
    ('hidden_size', 'int', 512),
    ('kernel_size', 'int', 3),
    ('dilation_rates', 'ints', (1, 2, 3)),
    ('attention_variant', 'str', 'hybrid'),
    ('hier', 'int', 0),
    ('mask_emitted', 'bool', True),
    ('precision', 'str', 'float64'),
    ('init_scale', 'float', 0.08),
)

TRAIN_SCHEMA = (
    ('seed', 'int', 1),
    ('batch_size', 'int', 64),
    ('epochs', 'int', 10),
    ('learning_rate', 'float', 0.0003),
    ('lr_decay', 'float', 0.5),
    ('clip', 'float', 10.0),
    ('beta1', 'float', 0.9),
    ('beta2', 'float', 0.999),
    ('adam_eps', 'float', 1e-8),
)


class ModelConfig(KeyValueConfig):
    """Architecture of a :class:`~etikettr.models.seq2seq.Seq2SeqClassifier`.

    `hier` > 0 replaces the dilated convolution stack by the hierarchical encoder with that
    boundary. `vocab_size` counts the reserved token ids.

    """
    schema = MODEL_SCHEMA

    def validate(self):
        """Check ranges and the dilation schedule; raises ValueError (ScheduleError for a rejected schedule)."""
        from etikettr.models.decoder import VARIANTS
        from etikettr.models.mdc import DilationSchedule
        from etikettr import tensor

        for name in ('max_len', 'embedding_size', 'hidden_size'):
            if getattr(self, name) < 1:
                raise ValueError("%s must be positive, got %d" % (name, getattr(self, name)))
        if self.attention_variant not in VARIANTS:
            raise ValueError("unknown attention_variant %r, expected one of %s" % (
                self.attention_variant, ", ".join(VARIANTS)))
        if self.hier < 0:
            raise ValueError("hier must be >= 0, got %d" % self.hier)
        if self.init_scale <= 0:
            raise ValueError("init_scale must be positive, got %g" % self.init_scale)
        tensor.dtype_of(self.precision)
        if self.hier == 0 and self.attention_variant in ('mdc_only', 'additive', 'hybrid'):
            DilationSchedule(self.kernel_size, self.dilation_rates).validate()
        return self


class TrainConfig(KeyValueConfig):
    """Model architecture plus optimization settings, defaulting to the full-size setup.

    See :meth:`desk` for the laptop-sized preset.

    """
    schema = MODEL_SCHEMA + TRAIN_SCHEMA

    @classmethod
    def desk(cls, **kwargs):
        """Preset sized for a laptop CPU: H = embedding = 32 and a 2000-token vocabulary."""
        config = cls(vocab_size=2000, embedding_size=32, hidden_size=32)
        return config.update(**kwargs)

    def model_config(self):
        return self.subset(ModelConfig)

    def validate(self):
        self.model_config().validate()
        for name in ('batch_size', 'epochs'):
            if getattr(self, name) < 1:
                raise ValueError("%s must be positive, got %d" % (name, getattr(self, name)))
        for name in ('learning_rate', 'clip', 'adam_eps'):
            if getattr(self, name) <= 0:
                raise ValueError("%s must be positive, got %g" % (name, getattr(self, name)))
        for name in ('beta1', 'beta2', 'lr_decay'):
            if not 0.0 < getattr(self, name) <= 1.0:
                raise ValueError("%s must lie in (0, 1], got %g" % (name, getattr(self, name)))
        return self


class RunConfig(TrainConfig):
    """Everything a command-line run needs: the training settings plus corpus paths and presets.

    Empty paths mean "not given".

    """
    schema = (
        (('preset', 'str', 'full'),)
        + TRAIN_SCHEMA + MODEL_SCHEMA
        + (
            ('train_path', 'str', ''),
            ('dev_path', 'str', ''),
            ('test_path', 'str', ''),
            ('out_dir', 'str', 'out'),
        )
    )

    PRESETS = {
        'full': {},
        'desk': {'vocab_size': 2000, 'embedding_size': 32, 'hidden_size': 32},
    }

    @classmethod
    def for_preset(cls, preset, **kwargs):
        if preset not in cls.PRESETS:
            raise ValueError("unknown preset %r, expected one of %s" % (preset, ", ".join(sorted(cls.PRESETS))))
        config = cls(preset=preset, **cls.PRESETS[preset])
        return config.update(**kwargs)

    @classmethod
    def from_file(cls, fname=None, **overrides):
        """Preset defaults, then the settings of `fname` (if any), then `overrides`.

        The preset comes from `overrides`, else from the file, else 'full'.

        """
        settings = cls.read_settings(fname) if fname else {}
        preset = overrides.get('preset') or settings.get('preset') or 'full'
        return cls.for_preset(preset).update(**settings).update(**overrides)

    def train_config(self):
        return self.subset(TrainConfig)

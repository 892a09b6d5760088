"""Exception hierarchy shared by every module."""

from __future__ import annotations


class PfpError(Exception):
    """Base class for all errors raised by this package."""


class AlphabetError(PfpError, ValueError):
    """The input contains reserved bytes and remapping was not requested."""


class ConfigError(PfpError, ValueError):
    """Inconsistent or invalid parsing / build parameters."""


class CorruptionError(PfpError):
    """A dictionary/parse pair or an index file failed a consistency check."""


class FormatError(CorruptionError):
    """An index or BigBWT-style file could not be decoded."""


class BoundsError(PfpError, IndexError):
    """A position, rank or count argument is outside its valid range."""


class NotFoundError(PfpError, LookupError):
    """A selection query asked for an element that does not exist."""


class OracleSizeError(PfpError, ValueError):
    """The brute-force oracle refuses inputs beyond desk scale."""

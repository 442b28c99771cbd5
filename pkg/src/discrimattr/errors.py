"""Exception hierarchy shared across the package."""


class DiscrimAttrError(Exception):
    """Base class for all package errors."""


class ConfigError(DiscrimAttrError):
    """Invalid configuration or usage (missing paths, bad flags)."""


class DataFormatError(DiscrimAttrError):
    """Malformed input data. Carries file/line context when available."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        prefix = ""
        if path is not None:
            prefix = f"{path}:"
            if line is not None:
                prefix += f"{line}:"
            prefix += " "
        super().__init__(prefix + message)


class EmptyCorpusError(DataFormatError):
    """Raised when an operation needs at least one document."""


class EvidenceError(DiscrimAttrError):
    """A positive verdict reached rendering without usable evidence."""

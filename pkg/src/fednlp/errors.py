"""Exception types shared across the package.

I/O failures use the builtin OSError family; bad indexes use IndexError.
Everything domain-specific derives from FedNlpError so callers can catch
one base class at the CLI / service boundary.
"""


class FedNlpError(Exception):
    """Base class for all fednlp-specific errors."""


class SchemaError(FedNlpError):
    """A record or file does not match its declared schema."""


class EmptyDocumentError(FedNlpError):
    """An NLP operation received a document with no tokens."""


class EmptyCorpusError(FedNlpError):
    """An operation that needs at least one document received none."""


class InsufficientLabelsError(FedNlpError):
    """Training requires at least two distinct labels."""


class DegenerateCorpusError(FedNlpError):
    """The corpus collapses to nothing usable (e.g. empty vocabulary)."""


class ArtifactVersionError(FedNlpError):
    """A persisted artifact has an unreadable or unsupported format version."""

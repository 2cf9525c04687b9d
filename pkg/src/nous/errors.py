"""Error taxonomy shared by every engine module.

Each error carries a stable ``name`` (its class name) that the CLI and the
HTTP API report verbatim, so callers can match on it without parsing text.
"""


class NousError(Exception):
    """Base class for all engine errors."""

    @property
    def name(self) -> str:
        return type(self).__name__

    @property
    def detail(self) -> str:
        return str(self)


# --- store ---------------------------------------------------------------

class EmptyLabel(NousError):
    """Entity label normalizes to the empty string."""


class UnknownEntity(NousError):
    """Referenced entity id or name is not registered."""


class ConfidenceOutOfRange(NousError):
    """Fact confidence outside [0, 1]."""


# --- ingest --------------------------------------------------------------

class FileNotFound(NousError):
    """Input file does not exist."""


class EmptyFile(NousError):
    """Curated KB file contained no valid line."""


class ParseError(NousError):
    """Malformed raw-triple line; message carries line number and reason."""

    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


# --- predicate mapping ---------------------------------------------------

class EmptyPhrase(NousError):
    """Predicate phrase empty or whitespace-only."""


class UnknownPredicate(NousError):
    """Predicate id not registered or in the wrong namespace."""


# --- entity linking ------------------------------------------------------

class EmptyMention(NousError):
    """Mention string empty after trimming."""


# --- link prediction -----------------------------------------------------

class NoPositives(NousError):
    """No training pairs available for a predicate model."""


# --- mining --------------------------------------------------------------

class Disconnected(NousError):
    """Pattern edge list is not connected."""


class TooLarge(NousError):
    """Pattern exceeds the configured edge budget."""


# --- topics / paths ------------------------------------------------------

class TooFewDocs(NousError):
    """Topic training needs at least two non-empty documents."""


class EmptyVocabulary(NousError):
    """No tokens found across the training documents."""


class DimensionMismatch(NousError):
    """Distributions of different lengths."""


class NoPathFound(NousError):
    """Source or target has no usable edge in the queried snapshot."""


# --- service -------------------------------------------------------------

class ConfigError(NousError):
    """Invalid or unknown configuration key; message names the key."""

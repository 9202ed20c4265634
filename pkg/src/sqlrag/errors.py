"""Exception hierarchy shared across the package."""


class SqlragError(Exception):
    """Base class for all package errors."""


class ParseError(SqlragError):
    """Malformed SQL input.

    Attributes:
        offset: byte offset into the input where parsing failed.
    """

    def __init__(self, message: str, offset: int = 0):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


class UnsupportedConstruct(ParseError):
    """Syntactically valid SQL outside the supported SELECT subset."""


class UnresolvableAlias(SqlragError):
    """An alias is referenced but never defined in any enclosing scope."""


class ModeMismatch(SqlragError):
    """Two normalized trees with different normalization modes were compared."""


class EmbedderUnavailable(SqlragError):
    """No embedder configured, or the configured one cannot embed the input."""


class SchemaRefError(SqlragError):
    """A sample references a database id that is not in the catalog store."""


class InvalidR(SqlragError):
    """Schema splitting requested with a non-positive column budget."""


class MissingColumn(SqlragError):
    """Aggregated split labels do not cover every column of the schema."""


class ApproximatorUnavailable(SqlragError):
    """The configured approximator backend cannot be reached."""


class LookupMiss(SqlragError):
    """A file-backed lookup did not contain the requested id."""


class EndpointError(SqlragError):
    """A remote endpoint failed after exhausting the retry budget."""


class ReplayMiss(EndpointError):
    """The replay cache has no entry for the requested prompt."""


class ExtractionError(SqlragError):
    """No parseable SQL statement could be extracted from an LLM response.

    Attributes:
        raw: the full raw response text, preserved for inspection.
    """

    def __init__(self, message: str, raw: str = ""):
        super().__init__(message)
        self.raw = raw


class InconsistentBundle(SqlragError):
    """Prompt inputs reference different databases."""

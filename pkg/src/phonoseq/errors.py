"""Exception hierarchy shared by the library and the CLI."""


class PhonoseqError(Exception):
    """Base class for all errors raised by this package."""


class CorpusFormatError(PhonoseqError, ValueError):
    """A transcription file could not be parsed.

    ``line`` holds the 1-based line number of the offending line, or None
    when the problem is not tied to a single line (e.g. empty input).
    """

    def __init__(self, message, line=None, source=None):
        self.line = line
        self.source = source
        where = ""
        if source is not None:
            where = f"{source}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class CountingError(PhonoseqError, ValueError):
    pass


class ExtractionError(PhonoseqError, ValueError):
    pass


class ModelError(PhonoseqError, ValueError):
    pass


class NoEvidenceError(PhonoseqError):
    """The test speaker's transcriptions contain no model sequence."""


class EvaluationError(PhonoseqError, ValueError):
    pass


class SpecError(PhonoseqError, ValueError):
    """Invalid synthetic-corpus specification; ``field`` names the bad key."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")

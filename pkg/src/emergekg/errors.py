"""Exception types shared across the pipeline stages."""


class EmergeKGError(Exception):
    """Base class for all package errors."""


class SearchError(EmergeKGError):
    """Search client failure; carries the offending query so it can be retried."""

    def __init__(self, query, message):
        super().__init__(f"{message} (query={query!r})")
        self.query = query


class EmptyResultError(SearchError):
    """The search produced zero snippets."""

    def __init__(self, query):
        super().__init__(query, "search returned no results")


class EmptyDocumentError(EmergeKGError):
    """Preprocessing removed every token of a document."""


class MissingAnnotationError(EmergeKGError):
    """No annotation file exists for a fixture document."""


class LexiconError(EmergeKGError):
    """Lexicon data files are missing or unreadable."""


class ConfigError(EmergeKGError):
    """Invalid pipeline configuration (user error, exit code 1)."""


class StageError(EmergeKGError):
    """A pipeline stage failed; names the stage and keeps the cause."""

    def __init__(self, stage, cause):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause

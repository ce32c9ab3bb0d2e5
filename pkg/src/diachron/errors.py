"""Exception types shared across the toolkit."""


class DiachronError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(DiachronError):
    """Bad user input: malformed config, missing file, inconsistent spec.

    CLI maps this to exit code 2.
    """


class CorpusFormatError(DiachronError):
    """Unrecoverable corpus problem (e.g. invalid UTF-8)."""


class EmptyVocabularyError(DiachronError):
    """A slice produced no tokens above the frequency threshold."""


class LexiconError(DiachronError):
    """Structurally invalid lexicon file."""


class EmbeddingIOError(DiachronError):
    """Corrupt or truncated embedding file."""


class TrainingError(DiachronError):
    """Training diverged (non-finite parameters)."""


class DegenerateVarianceError(DiachronError):
    """Effect size undefined: zero pooled variance with unequal means."""

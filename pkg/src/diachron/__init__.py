"""Diachron: time-sliced word embeddings and social-group association analysis.

Pipeline: ingest a year-tagged corpus, train one skip-gram space per annual or
decade slice, then score group-trait associations, pleasant/unpleasant
contrasts around historical events, and year-to-year drift, emitting TSV
tables and SVG charts.
"""

__version__ = "0.1.0"

from .association import (
    agg_diff_mac,
    decade_valence_series,
    diff_mac,
    group_profile,
    mac,
    top_traits,
)
from .corpus import (
    Document,
    NgramRecord,
    Resolution,
    TimeSlice,
    TrainingPair,
    Vocabulary,
    build_vocabulary,
    generate_pairs,
    read_corpus,
    slice_corpus,
)
from .drift import (
    association_vector,
    correlate,
    correlation_matrix,
    disruption_bands,
)
from .errors import (
    ConfigError,
    CorpusFormatError,
    DegenerateVarianceError,
    DiachronError,
    EmbeddingIOError,
    EmptyVocabularyError,
    LexiconError,
    TrainingError,
)
from .lexicon import (
    AttributeSets,
    SocialGroup,
    TraitEntry,
    load_attributes,
    load_groups,
    load_traits,
)
from .sgns import (
    EmbeddingSpace,
    SkipGramEmbedder,
    load_embeddings,
    save_embeddings,
    train_slices,
)
from .weat import (
    cohens_d,
    event_impact,
    weat_score,
    weat_series,
    welch_t_test,
)

__all__ = [
    "__version__",
    "Document",
    "NgramRecord",
    "Resolution",
    "TimeSlice",
    "TrainingPair",
    "Vocabulary",
    "build_vocabulary",
    "generate_pairs",
    "read_corpus",
    "slice_corpus",
    "SkipGramEmbedder",
    "EmbeddingSpace",
    "train_slices",
    "save_embeddings",
    "load_embeddings",
    "SocialGroup",
    "TraitEntry",
    "AttributeSets",
    "load_groups",
    "load_traits",
    "load_attributes",
    "mac",
    "diff_mac",
    "agg_diff_mac",
    "top_traits",
    "group_profile",
    "decade_valence_series",
    "weat_score",
    "weat_series",
    "event_impact",
    "welch_t_test",
    "cohens_d",
    "association_vector",
    "correlate",
    "correlation_matrix",
    "disruption_bands",
    "DiachronError",
    "ConfigError",
    "CorpusFormatError",
    "EmptyVocabularyError",
    "LexiconError",
    "EmbeddingIOError",
    "TrainingError",
    "DegenerateVarianceError",
]

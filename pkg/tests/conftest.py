import numpy as np
import pytest

from diachron.corpus import TimeSlice, Vocabulary
from diachron.lexicon import SocialGroup
from diachron.sgns import EmbeddingSpace


def space_from_vectors(vectors, ts=None):
    """Build a space whose token indices follow the dict's insertion order."""
    counts = {tok: len(vectors) - i for i, tok in enumerate(vectors)}
    vocab = Vocabulary(counts, min_count=0)
    mat = np.array([vectors[tok] for tok in vocab.tokens], dtype=np.float32)
    return EmbeddingSpace(ts, vocab, mat, np.zeros_like(mat))


def make_group(gid, comparison, labels, category="gender"):
    return SocialGroup(
        id=gid, category=category, comparison_id=comparison, default_labels=list(labels)
    )


def make_pair(labels_g, labels_c, category="gender"):
    g = make_group("g", "c", labels_g, category)
    c = make_group("c", "g", labels_c, category)
    return g, c


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def annual(request):
    return TimeSlice.annual

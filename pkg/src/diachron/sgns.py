"""Skip-gram negative-sampling trainer and embedding-space persistence.

The estimator follows scikit-learn conventions (constructor params only store
arguments; fitted state lives in trailing-underscore attributes; ``get_params``
/ ``set_params`` come from ``BaseEstimator``), so it can be cloned and placed
in pipelines.  The update loop is JIT-compiled with numba; with ``workers=1``
training is sequential and bit-reproducible for a fixed seed, with
``workers>1`` parameter updates are lock-free and may vary across runs and
worker counts.

Within a slice the model keeps two matrices: input (center) vectors, which are
the analysis vectors used downstream, and output (context) vectors, retained
for reproducibility.  For a positive pair the objective is ``log sigmoid(u.v)``
and each sampled negative contributes ``log sigmoid(-u.v')``, negatives drawn
from the unigram distribution raised to ``unigram_power``.  The learning rate
decays linearly from its initial value to a floor of 1e-4 times that value
over the epoch-weighted pair count.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence, Union

import numpy as np
from numba import get_num_threads, njit, prange, set_num_threads
from sklearn.base import BaseEstimator, clone

from .corpus import (
    Document,
    NgramRecord,
    Record,
    Resolution,
    TimeSlice,
    TrainingPair,
    Vocabulary,
    build_vocabulary,
)
from .errors import DiachronError, EmbeddingIOError, EmptyVocabularyError, TrainingError

_MASK64 = np.uint64(0xFFFFFFFFFFFFFFFF)
_LCG_MULT = np.uint64(6364136223846793005)
_LCG_ADD = np.uint64(1442695040888963407)
_INV_2_53 = 1.0 / 9007199254740992.0


def _mix_seed(seed: int, epoch: int, chunk: int) -> np.uint64:
    """Derive a decorrelated 64-bit stream seed (splitmix64 finalizer)."""
    x = (seed & 0xFFFFFFFFFFFFFFFF) ^ ((epoch + 1) * 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    x ^= ((chunk + 1) * 0xD1B54A32D192ED03) & 0xFFFFFFFFFFFFFFFF
    x &= 0xFFFFFFFFFFFFFFFF
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9 & 0xFFFFFFFFFFFFFFFF
    x = (x ^ (x >> 27)) * 0x94D049BB133111EB & 0xFFFFFFFFFFFFFFFF
    return np.uint64(x ^ (x >> 31))


@njit(inline="always")
def _lcg_uniform(state):
    state = state * _LCG_MULT + _LCG_ADD
    return state, np.float64(state >> np.uint64(11)) * _INV_2_53


@njit(cache=True)
def _train_docs_range(
    tokens,
    offsets,
    doc_weights,
    doc_lo,
    doc_hi,
    syn0,
    syn1,
    cum,
    keep,
    use_keep,
    window,
    negatives,
    alpha0,
    alpha_floor,
    schedule_total,
    schedule_base,
    state,
):
    d = syn0.shape[1]
    neu1e = np.empty(d, dtype=np.float32)
    domain = cum[cum.shape[0] - 1]
    progress = schedule_base
    for doc in range(doc_lo, doc_hi):
        lo = offsets[doc]
        hi = offsets[doc + 1]
        w_rec = doc_weights[doc]
        for i in range(lo, hi):
            c = tokens[i]
            jlo = i - window
            if jlo < lo:
                jlo = lo
            jhi = i + window
            if jhi > hi - 1:
                jhi = hi - 1
            for j in range(jlo, jhi + 1):
                if j == i:
                    continue
                alpha = alpha0 * (1.0 - progress / schedule_total)
                if alpha < alpha_floor:
                    alpha = alpha_floor
                progress += w_rec
                o = tokens[j]
                if use_keep:
                    kp = keep[c] * keep[o]
                    if kp < 1.0:
                        state, u = _lcg_uniform(state)
                        if u >= kp:
                            continue
                for k in range(d):
                    neu1e[k] = np.float32(0.0)
                for n in range(negatives + 1):
                    if n == 0:
                        target = np.int64(o)
                        label = 1.0
                    else:
                        state, u = _lcg_uniform(state)
                        target = np.searchsorted(cum, u * domain)
                        if target == o:
                            continue
                        label = 0.0
                    f = np.float32(0.0)
                    for k in range(d):
                        f += syn0[c, k] * syn1[target, k]
                    sigma = 1.0 / (1.0 + np.exp(-np.float64(f)))
                    g = np.float32((label - sigma) * alpha * w_rec)
                    for k in range(d):
                        neu1e[k] += g * syn1[target, k]
                    for k in range(d):
                        syn1[target, k] += g * syn0[c, k]
                for k in range(d):
                    syn0[c, k] += neu1e[k]
    return state


@njit(cache=True, parallel=True)
def _train_docs_hogwild(
    tokens,
    offsets,
    doc_weights,
    chunk_bounds,
    chunk_bases,
    seeds,
    syn0,
    syn1,
    cum,
    keep,
    use_keep,
    window,
    negatives,
    alpha0,
    alpha_floor,
    schedule_total,
):
    nchunks = chunk_bounds.shape[0] - 1
    for c in prange(nchunks):
        _train_docs_range(
            tokens,
            offsets,
            doc_weights,
            chunk_bounds[c],
            chunk_bounds[c + 1],
            syn0,
            syn1,
            cum,
            keep,
            use_keep,
            window,
            negatives,
            alpha0,
            alpha_floor,
            schedule_total,
            chunk_bases[c],
            seeds[c],
        )


@njit(cache=True)
def _train_pairs_range(
    centers,
    contexts,
    weights,
    pair_lo,
    pair_hi,
    syn0,
    syn1,
    cum,
    keep,
    use_keep,
    negatives,
    alpha0,
    alpha_floor,
    schedule_total,
    schedule_base,
    state,
):
    d = syn0.shape[1]
    neu1e = np.empty(d, dtype=np.float32)
    domain = cum[cum.shape[0] - 1]
    progress = schedule_base
    for idx in range(pair_lo, pair_hi):
        c = centers[idx]
        o = contexts[idx]
        w_rec = weights[idx]
        alpha = alpha0 * (1.0 - progress / schedule_total)
        if alpha < alpha_floor:
            alpha = alpha_floor
        progress += w_rec
        if use_keep:
            kp = keep[c] * keep[o]
            if kp < 1.0:
                state, u = _lcg_uniform(state)
                if u >= kp:
                    continue
        for k in range(d):
            neu1e[k] = np.float32(0.0)
        for n in range(negatives + 1):
            if n == 0:
                target = np.int64(o)
                label = 1.0
            else:
                state, u = _lcg_uniform(state)
                target = np.searchsorted(cum, u * domain)
                if target == o:
                    continue
                label = 0.0
            f = np.float32(0.0)
            for k in range(d):
                f += syn0[c, k] * syn1[target, k]
            sigma = 1.0 / (1.0 + np.exp(-np.float64(f)))
            g = np.float32((label - sigma) * alpha * w_rec)
            for k in range(d):
                neu1e[k] += g * syn1[target, k]
            for k in range(d):
                syn1[target, k] += g * syn0[c, k]
        for k in range(d):
            syn0[c, k] += neu1e[k]
    return state


@njit(cache=True)
def _sample_negative_indices(cum, n, state):
    out = np.empty(n, dtype=np.int64)
    domain = cum[cum.shape[0] - 1]
    for i in range(n):
        state, u = _lcg_uniform(state)
        out[i] = np.searchsorted(cum, u * domain)
    return out


def unigram_table(frequencies: np.ndarray, power: float = 0.75) -> np.ndarray:
    """Cumulative noise distribution: token frequencies raised to ``power``."""
    freqs = np.asarray(frequencies, dtype=np.float64)
    if freqs.size == 0:
        raise ValueError("cannot build a noise table for an empty vocabulary")
    return np.cumsum(freqs**power)


def sample_negatives(
    frequencies: np.ndarray, power: float, n: int, seed: int = 0
) -> np.ndarray:
    """Draw ``n`` negatives with the exact sampler the trainer uses."""
    cum = unigram_table(frequencies, power)
    return _sample_negative_indices(cum, n, _mix_seed(seed, 0, 0))


def keep_probabilities(frequencies: np.ndarray, threshold: float | None) -> np.ndarray:
    """Down-sampling keep probability per token (word2vec-style)."""
    freqs = np.asarray(frequencies, dtype=np.float64)
    if threshold is None or threshold <= 0:
        return np.ones_like(freqs)
    frac = freqs / freqs.sum()
    ratio = frac / threshold
    with np.errstate(divide="ignore", invalid="ignore"):
        keep = (np.sqrt(ratio) + 1.0) / ratio
    return np.minimum(keep, 1.0)


def pair_objective_and_gradient(
    center: np.ndarray, context: np.ndarray, negatives: np.ndarray
) -> tuple[float, np.ndarray, np.ndarray, np.ndarray]:
    """Objective and analytic gradients for one (center, context, negatives) step.

    Returns ``(objective, grad_center, grad_context, grad_negatives)`` in
    float64.  The kernels apply exactly these gradients scaled by the learning
    rate and pair weight.
    """
    u = np.asarray(center, dtype=np.float64)
    v = np.asarray(context, dtype=np.float64)
    negs = np.asarray(negatives, dtype=np.float64).reshape(-1, u.shape[0])
    s_pos = 1.0 / (1.0 + np.exp(-u @ v))
    s_negs = 1.0 / (1.0 + np.exp(-negs @ u))
    objective = float(np.log(s_pos) + np.sum(np.log(1.0 - s_negs)))
    grad_u = (1.0 - s_pos) * v - s_negs @ negs
    grad_v = (1.0 - s_pos) * u
    grad_negs = -s_negs[:, None] * u[None, :]
    return objective, grad_u, grad_v, grad_negs


@dataclass
class EncodedCorpus:
    """Vocabulary-encoded documents: OOV tokens removed, positions closed up."""

    tokens: np.ndarray  # uint32, concatenated
    offsets: np.ndarray  # int64, len = n_docs + 1
    weights: np.ndarray  # float32, per document

    @property
    def n_docs(self) -> int:
        return len(self.offsets) - 1


def encode_documents(records: Iterable[Record], vocab: Vocabulary) -> EncodedCorpus:
    chunks: list[np.ndarray] = []
    lengths: list[int] = []
    weights: list[float] = []
    get = vocab.get
    for record in records:
        ids = [get(tok) for tok in record.tokens]
        ids = [i for i in ids if i is not None]
        if len(ids) < 2:
            continue
        chunks.append(np.array(ids, dtype=np.uint32))
        lengths.append(len(ids))
        weights.append(float(record.match_count) if isinstance(record, NgramRecord) else 1.0)
    if chunks:
        tokens = np.concatenate(chunks)
    else:
        tokens = np.empty(0, dtype=np.uint32)
    offsets = np.zeros(len(lengths) + 1, dtype=np.int64)
    np.cumsum(lengths, out=offsets[1:])
    return EncodedCorpus(tokens, offsets, np.array(weights, dtype=np.float32))


def _pairs_per_doc(lengths: np.ndarray, window: int) -> np.ndarray:
    """Ordered in-window pair count for a document of each length."""
    lengths = lengths.astype(np.float64)
    full = window * (2.0 * lengths - window - 1.0)
    short = lengths * (lengths - 1.0)
    return np.where(lengths - 1 <= window, short, full)


@dataclass(eq=False)
class EmbeddingSpace:
    """One trained vector space: a vocabulary plus input/output matrices."""

    slice: TimeSlice | None
    vocab: Vocabulary
    input_vectors: np.ndarray
    output_vectors: np.ndarray
    _unit_cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        v = len(self.vocab)
        for name, mat in (("input", self.input_vectors), ("output", self.output_vectors)):
            if mat.shape[0] != v:
                raise ValueError(f"{name} matrix has {mat.shape[0]} rows for {v} tokens")
            if not np.isfinite(mat).all():
                raise ValueError(f"{name} matrix contains non-finite entries")

    @property
    def dimension(self) -> int:
        return int(self.input_vectors.shape[1])

    def __contains__(self, token: str) -> bool:
        return token in self.vocab

    def vector(self, token: str) -> np.ndarray | None:
        idx = self.vocab.get(token)
        if idx is None:
            return None
        return self.input_vectors[idx]

    def unit_vector(self, token: str) -> np.ndarray | None:
        """L2-normalized analysis vector (float64); zero vectors stay zero."""
        cached = self._unit_cache.get(token)
        if cached is not None:
            return cached
        idx = self.vocab.get(token)
        if idx is None:
            return None
        vec = self.input_vectors[idx].astype(np.float64)
        norm = np.linalg.norm(vec)
        if norm > 0:
            vec /= norm
        self._unit_cache[token] = vec
        return vec


class SkipGramEmbedder(BaseEstimator):
    """Train word vectors with skip-gram negative sampling.

    Parameters
    ----------
    dimension : int, default=300
        Size of each word vector.
    window : int, default=3
        Maximum positional distance between center and context tokens.
    negatives : int, default=5
        Noise words sampled per positive pair.
    epochs : int, default=5
        Passes over the training pairs.
    learning_rate : float, default=0.025
        Initial step size; decays linearly to ``learning_rate / 1e4``.
    min_count : int, default=10
        Tokens must appear strictly more often than this to enter the
        vocabulary.
    subsample : float or None, default=1e-4
        Frequency threshold for down-sampling very common tokens; ``None``
        disables it.
    unigram_power : float, default=0.75
        Exponent applied to unigram frequencies for the noise distribution.
    seed : int, default=0
        Seed for initialization and negative sampling.
    workers : int, default=1
        Worker count. One worker is sequential and bit-reproducible;
        more workers use lock-free shared updates.

    Attributes
    ----------
    vocabulary_ : Vocabulary
        Tokens retained for training.
    space_ : EmbeddingSpace
        Trained vectors (``input_vectors`` are the analysis vectors).
    """

    def __init__(
        self,
        dimension: int = 300,
        window: int = 3,
        negatives: int = 5,
        epochs: int = 5,
        learning_rate: float = 0.025,
        min_count: int = 10,
        subsample: float | None = 1e-4,
        unigram_power: float = 0.75,
        seed: int = 0,
        workers: int = 1,
    ) -> None:
        self.dimension = dimension
        self.window = window
        self.negatives = negatives
        self.epochs = epochs
        self.learning_rate = learning_rate
        self.min_count = min_count
        self.subsample = subsample
        self.unigram_power = unigram_power
        self.seed = seed
        self.workers = workers

    def _check_params(self) -> None:
        checks = [
            ("dimension", self.dimension >= 1),
            ("window", self.window >= 1),
            ("negatives", self.negatives >= 1),
            ("epochs", self.epochs >= 1),
            ("learning_rate", self.learning_rate > 0),
            ("min_count", self.min_count >= 0),
            ("workers", self.workers >= 1),
        ]
        for name, ok in checks:
            if not ok:
                raise ValueError(f"invalid {name}: {getattr(self, name)!r}")

    @staticmethod
    def _as_records(X: Iterable) -> list[Record]:
        records: list[Record] = []
        for item in X:
            if isinstance(item, (Document, NgramRecord)):
                records.append(item)
            else:
                records.append(Document(year=0, tokens=list(item)))
        return records

    def _init_matrices(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        rng = np.random.default_rng(self.seed)
        syn0 = (rng.random((n, self.dimension), dtype=np.float32) - 0.5) / self.dimension
        syn1 = np.zeros((n, self.dimension), dtype=np.float32)
        return syn0, syn1

    def _check_finite(self, syn0: np.ndarray, syn1: np.ndarray, epoch: int) -> None:
        for mat in (syn0, syn1):
            if not np.isfinite(mat).all():
                bad = np.where(~np.isfinite(mat).all(axis=1))[0]
                token = self.vocabulary_.tokens[int(bad[0])]
                raise TrainingError(
                    f"non-finite parameters for token {token!r} after epoch {epoch + 1}"
                )

    def fit(self, X: Iterable, y=None) -> "SkipGramEmbedder":
        """Train on documents (token sequences or corpus records)."""
        self._check_params()
        records = self._as_records(X)
        self.vocabulary_ = build_vocabulary(records, min_count=self.min_count)
        encoded = encode_documents(records, self.vocabulary_)
        syn0, syn1 = self._init_matrices(len(self.vocabulary_))
        self._run_docs(encoded, syn0, syn1)
        self.space_ = EmbeddingSpace(None, self.vocabulary_, syn0, syn1)
        return self

    def fit_pairs(self, pairs: Iterable[TrainingPair], vocab: Vocabulary) -> "SkipGramEmbedder":
        """Train from an explicit weighted-pair stream over a prebuilt vocabulary."""
        self._check_params()
        if len(vocab) == 0:
            raise EmptyVocabularyError("empty slice vocabulary")
        centers, contexts, weights = [], [], []
        for pair in pairs:
            c, o = int(pair[0]), int(pair[1])
            w = float(pair[2]) if len(pair) > 2 else 1.0
            if not (0 <= c < len(vocab) and 0 <= o < len(vocab)):
                raise ValueError(f"pair index out of range: ({c}, {o})")
            centers.append(c)
            contexts.append(o)
            weights.append(w)
        self.vocabulary_ = vocab
        syn0, syn1 = self._init_matrices(len(vocab))
        self._run_pairs(
            np.array(centers, dtype=np.uint32),
            np.array(contexts, dtype=np.uint32),
            np.array(weights, dtype=np.float32),
            syn0,
            syn1,
        )
        self.space_ = EmbeddingSpace(None, vocab, syn0, syn1)
        return self

    def _noise_and_keep(self) -> tuple[np.ndarray, np.ndarray, bool]:
        freqs = self.vocabulary_.frequencies
        cum = unigram_table(freqs, self.unigram_power)
        keep = keep_probabilities(freqs, self.subsample)
        use_keep = bool(self.subsample) and bool((keep < 1.0).any())
        return cum, keep, use_keep

    def _run_docs(self, encoded: EncodedCorpus, syn0: np.ndarray, syn1: np.ndarray) -> None:
        cum, keep, use_keep = self._noise_and_keep()
        lengths = np.diff(encoded.offsets)
        doc_pair_weight = _pairs_per_doc(lengths, self.window) * encoded.weights.astype(np.float64)
        epoch_weight = float(doc_pair_weight.sum())
        if epoch_weight == 0.0:
            return
        total = epoch_weight * self.epochs
        alpha_floor = self.learning_rate * 1e-4
        nchunks = min(self.workers, max(1, encoded.n_docs))
        if nchunks == 1:
            for epoch in range(self.epochs):
                _train_docs_range(
                    encoded.tokens, encoded.offsets, encoded.weights, 0, encoded.n_docs,
                    syn0, syn1, cum, keep, use_keep,
                    self.window, self.negatives, self.learning_rate, alpha_floor,
                    total, epoch * epoch_weight, _mix_seed(self.seed, epoch, 0),
                )
                self._check_finite(syn0, syn1, epoch)
            return
        prefix = np.concatenate([[0.0], np.cumsum(doc_pair_weight)])
        targets = epoch_weight * np.arange(nchunks + 1) / nchunks
        bounds = np.searchsorted(prefix, targets, side="left").astype(np.int64)
        bounds[0], bounds[-1] = 0, encoded.n_docs
        prev_threads = get_num_threads()
        set_num_threads(min(nchunks, prev_threads))
        try:
            for epoch in range(self.epochs):
                seeds = np.array(
                    [_mix_seed(self.seed, epoch, c) for c in range(nchunks)], dtype=np.uint64
                )
                bases = epoch * epoch_weight + prefix[bounds[:-1]]
                _train_docs_hogwild(
                    encoded.tokens, encoded.offsets, encoded.weights,
                    bounds, bases, seeds,
                    syn0, syn1, cum, keep, use_keep,
                    self.window, self.negatives, self.learning_rate, alpha_floor, total,
                )
                self._check_finite(syn0, syn1, epoch)
        finally:
            set_num_threads(prev_threads)

    def _run_pairs(
        self,
        centers: np.ndarray,
        contexts: np.ndarray,
        weights: np.ndarray,
        syn0: np.ndarray,
        syn1: np.ndarray,
    ) -> None:
        cum, keep, use_keep = self._noise_and_keep()
        epoch_weight = float(weights.sum())
        if epoch_weight == 0.0:
            return
        total = epoch_weight * self.epochs
        alpha_floor = self.learning_rate * 1e-4
        for epoch in range(self.epochs):
            _train_pairs_range(
                centers, contexts, weights, 0, len(centers),
                syn0, syn1, cum, keep, use_keep,
                self.negatives, self.learning_rate, alpha_floor,
                total, epoch * epoch_weight, _mix_seed(self.seed, epoch, 0),
            )
            self._check_finite(syn0, syn1, epoch)

    def transform(self, tokens: Sequence[str]) -> np.ndarray:
        """Look up analysis vectors for the given tokens."""
        if not hasattr(self, "space_"):
            raise ValueError("estimator is not fitted")
        missing = [t for t in tokens if t not in self.vocabulary_]
        if missing:
            raise ValueError(f"tokens not in vocabulary: {missing[:5]}")
        rows = [self.vocabulary_.index(t) for t in tokens]
        return self.space_.input_vectors[rows]

    @property
    def vectors_(self) -> np.ndarray:
        return self.space_.input_vectors


def slice_seed(base_seed: int, ts: TimeSlice) -> int:
    """Stable per-slice seed so slices train independently of visit order."""
    tag = ts.start_year * 10 + (1 if ts.resolution is Resolution.DECADE else 0)
    return (base_seed * 1_000_003 + tag) % (1 << 63)


BucketLike = Union[Iterable[Record], Callable[[], Iterable[Record]]]


def train_slices(
    buckets: Mapping[TimeSlice, BucketLike],
    base: SkipGramEmbedder,
) -> tuple[dict[TimeSlice, EmbeddingSpace], list[TimeSlice]]:
    """Fit one space per non-empty slice; return spaces and skipped slices.

    Bucket values may be record lists or zero-argument callables producing a
    fresh record iterator (for spooled corpora that are read twice).
    """
    spaces: dict[TimeSlice, EmbeddingSpace] = {}
    skipped: list[TimeSlice] = []
    for ts in sorted(buckets):
        source = buckets[ts]
        records = source() if callable(source) else source
        est = clone(base)
        est.set_params(seed=slice_seed(base.seed, ts))
        try:
            est.fit(records)
        except EmptyVocabularyError:
            skipped.append(ts)
            continue
        space = est.space_
        space.slice = ts
        spaces[ts] = space
    if not spaces:
        raise DiachronError("all slices empty: no trainable vocabulary anywhere")
    return spaces, skipped


_MAGIC = b"DIACHRON-EMB v1\n"
_RES_TO_CODE = {None: 0, Resolution.ANNUAL: 1, Resolution.DECADE: 2}
_CODE_TO_RES = {0: None, 1: Resolution.ANNUAL, 2: Resolution.DECADE}


def save_embeddings(space: EmbeddingSpace, path: Union[str, Path]) -> None:
    """Persist a space; the trailing 64-bit digest covers all preceding bytes."""
    digest = hashlib.blake2b(digest_size=8)
    with open(path, "wb") as fh:

        def put(chunk: bytes) -> None:
            digest.update(chunk)
            fh.write(chunk)

        put(_MAGIC)
        ts = space.slice
        put(
            struct.pack(
                "<Bii",
                _RES_TO_CODE[ts.resolution if ts else None],
                ts.start_year if ts else 0,
                ts.end_year if ts else 0,
            )
        )
        put(struct.pack("<QI", len(space.vocab), space.dimension))
        for token, (_, freq) in space.vocab.items():
            raw = token.encode("utf-8")
            put(struct.pack("<H", len(raw)))
            put(raw)
            put(struct.pack("<q", freq))
        put(np.ascontiguousarray(space.input_vectors, dtype="<f4").tobytes())
        put(np.ascontiguousarray(space.output_vectors, dtype="<f4").tobytes())
        fh.write(digest.digest())


class _FileCursor:
    def __init__(self, data: bytes, path: str) -> None:
        self.data = data
        self.pos = 0
        self.path = path

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise EmbeddingIOError(
                f"corrupt embedding file {self.path}: expected at least "
                f"{self.pos + n} bytes, got {len(self.data)}"
            )
        chunk = self.data[self.pos : self.pos + n]
        self.pos += n
        return chunk


def load_embeddings(path: Union[str, Path]) -> EmbeddingSpace:
    data = Path(path).read_bytes()
    name = str(path)
    if len(data) < len(_MAGIC) + 8:
        raise EmbeddingIOError(
            f"corrupt embedding file {name}: expected at least "
            f"{len(_MAGIC) + 8} bytes, got {len(data)}"
        )
    expected_sum = hashlib.blake2b(data[:-8], digest_size=8).digest()
    if data[-8:] != expected_sum:
        raise EmbeddingIOError(
            f"corrupt embedding file {name}: checksum expected "
            f"{expected_sum.hex()}, got {data[-8:].hex()}"
        )
    cur = _FileCursor(data[:-8], name)
    if cur.take(len(_MAGIC)) != _MAGIC:
        raise EmbeddingIOError(f"corrupt embedding file {name}: bad magic header")
    res_code, start, end = struct.unpack("<Bii", cur.take(9))
    if res_code not in _CODE_TO_RES:
        raise EmbeddingIOError(f"corrupt embedding file {name}: bad slice tag {res_code}")
    resolution = _CODE_TO_RES[res_code]
    ts = TimeSlice(resolution, start, end) if resolution is not None else None
    vocab_size, dim = struct.unpack("<QI", cur.take(12))
    counts: dict[str, int] = {}
    order: list[str] = []
    for _ in range(vocab_size):
        (tok_len,) = struct.unpack("<H", cur.take(2))
        token = cur.take(tok_len).decode("utf-8")
        (freq,) = struct.unpack("<q", cur.take(8))
        if token in counts:
            raise EmbeddingIOError(f"corrupt embedding file {name}: duplicate token {token!r}")
        counts[token] = freq
        order.append(token)
    vocab = Vocabulary(counts, min_count=0)
    if list(vocab.tokens) != order:
        raise EmbeddingIOError(f"corrupt embedding file {name}: vocabulary order mismatch")
    matrix_bytes = vocab_size * dim * 4
    mats = []
    for _ in range(2):
        raw = cur.take(matrix_bytes)
        mats.append(
            np.frombuffer(raw, dtype="<f4").reshape(vocab_size, dim).astype(np.float32)
        )
    if cur.pos != len(cur.data):
        raise EmbeddingIOError(
            f"corrupt embedding file {name}: expected {cur.pos + 8} bytes, got {len(data)}"
        )
    return EmbeddingSpace(ts, vocab, mats[0], mats[1])

"""Corpus ingestion, time slicing, vocabularies, and training-pair generation.

Two input formats are supported, both UTF-8 with LF line endings:

* ``docPerLine``: one document per line, ``YEAR<TAB>token token token ...``
* ``ngramTsv``: aggregated n-gram counts, ``tok1 tok2 ...<TAB>YEAR<TAB>COUNT``

Input must be pre-tokenized; tokens are whitespace-separated and this module
never segments text itself.
"""

from __future__ import annotations

import io
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import IO, Iterable, Iterator, NamedTuple, Union

import numpy as np

from .errors import ConfigError, CorpusFormatError, EmptyVocabularyError

# Sanity bounds for parsed years; the analysis range is narrower and applied
# at slicing time.
YEAR_MIN = 1000
YEAR_MAX = 3000

DEFAULT_YEAR_RANGE = (1950, 2019)

MAX_NGRAM_ORDER = 5


class Resolution(str, Enum):
    ANNUAL = "annual"
    DECADE = "decade"


@dataclass(frozen=True, order=True)
class TimeSlice:
    """A contiguous, inclusive year range over which one space is trained."""

    resolution: Resolution
    start_year: int
    end_year: int

    def __post_init__(self) -> None:
        if self.resolution is Resolution.ANNUAL:
            if self.start_year != self.end_year:
                raise ValueError(f"annual slice must cover one year, got {self}")
        elif self.resolution is Resolution.DECADE:
            if self.start_year % 10 != 0 or self.end_year != self.start_year + 9:
                raise ValueError(f"decade slice must be calendar-aligned, got {self}")

    @classmethod
    def annual(cls, year: int) -> "TimeSlice":
        return cls(Resolution.ANNUAL, year, year)

    @classmethod
    def decade(cls, year: int) -> "TimeSlice":
        start = year - (year % 10)
        return cls(Resolution.DECADE, start, start + 9)

    @classmethod
    def containing(cls, year: int, resolution: Resolution) -> "TimeSlice":
        if resolution is Resolution.ANNUAL:
            return cls.annual(year)
        return cls.decade(year)

    def contains(self, year: int) -> bool:
        return self.start_year <= year <= self.end_year

    @property
    def label(self) -> str:
        """Short display form: ``"1966"`` for annual, ``"1960-1969"`` for decades."""
        if self.resolution is Resolution.ANNUAL:
            return str(self.start_year)
        return f"{self.start_year}-{self.end_year}"

    @classmethod
    def parse(cls, text: str) -> "TimeSlice":
        text = text.strip()
        if "-" in text:
            start_s, end_s = text.split("-", 1)
            start, end = int(start_s), int(end_s)
            if start % 10 == 0 and end == start + 9:
                return cls.decade(start)
            raise ValueError(f"unsupported slice spec {text!r}")
        return cls.annual(int(text))


@dataclass
class Document:
    year: int
    tokens: list[str]


@dataclass
class NgramRecord:
    tokens: list[str]
    year: int
    match_count: int


Record = Union[Document, NgramRecord]


class TrainingPair(NamedTuple):
    center: int
    context: int
    weight: float = 1.0


def record_token_count(record: Record) -> int:
    """Token occurrences contributed by one record (n-grams count per match)."""
    if isinstance(record, NgramRecord):
        return len(record.tokens) * record.match_count
    return len(record.tokens)


def _parse_doc_line(line: str) -> Document | None:
    year_str, sep, rest = line.partition("\t")
    if not sep:
        return None
    try:
        year = int(year_str)
    except ValueError:
        return None
    if not YEAR_MIN <= year <= YEAR_MAX:
        return None
    return Document(year=year, tokens=rest.split())


def _parse_ngram_line(line: str) -> NgramRecord | None:
    parts = line.split("\t")
    if len(parts) != 3:
        return None
    tokens = parts[0].split()
    if not 1 <= len(tokens) <= MAX_NGRAM_ORDER:
        return None
    try:
        year = int(parts[1])
        count = int(parts[2])
    except ValueError:
        return None
    if not YEAR_MIN <= year <= YEAR_MAX or count < 1:
        return None
    return NgramRecord(tokens=tokens, year=year, match_count=count)


class CorpusReader:
    """Streaming reader over a corpus file or binary stream.

    Iterating yields one record per well-formed line in input order.  Malformed
    lines are skipped and counted in :attr:`malformed_count`; invalid UTF-8 is
    fatal and reported with its byte offset.
    """

    def __init__(self, source: Union[str, Path, IO[bytes]], fmt: str) -> None:
        if fmt not in ("docPerLine", "ngramTsv"):
            raise ConfigError(f"unknown corpus format {fmt!r}")
        self._source = source
        self.format = fmt
        self.malformed_count = 0
        self.records_read = 0

    def __iter__(self) -> Iterator[Record]:
        parse = _parse_doc_line if self.format == "docPerLine" else _parse_ngram_line
        if isinstance(self._source, (str, Path)):
            stream: IO[bytes] = open(self._source, "rb")
            close = True
        else:
            stream = self._source
            close = False
        offset = 0
        try:
            for raw in stream:
                try:
                    line = raw.decode("utf-8")
                except UnicodeDecodeError as exc:
                    raise CorpusFormatError(
                        f"invalid UTF-8 at byte offset {offset + exc.start}"
                    ) from exc
                offset += len(raw)
                line = line.rstrip("\n").rstrip("\r")
                if not line:
                    continue
                record = parse(line)
                if record is None:
                    self.malformed_count += 1
                    continue
                self.records_read += 1
                yield record
        finally:
            if close:
                stream.close()


def read_corpus(source: Union[str, Path, IO[bytes], bytes], fmt: str) -> CorpusReader:
    """Open a corpus for streaming; accepts a path, binary stream, or bytes."""
    if isinstance(source, bytes):
        source = io.BytesIO(source)
    return CorpusReader(source, fmt)


class Vocabulary:
    """Token inventory of one slice, indexed densely by descending frequency.

    Only tokens whose frequency strictly exceeds ``min_count`` are retained.
    Frequency ties are broken by code-point order so indices are reproducible.
    """

    def __init__(self, counts: dict[str, int], min_count: int = 0) -> None:
        if min_count < 0:
            raise ValueError("min_count must be >= 0")
        kept = [(tok, n) for tok, n in counts.items() if n > min_count]
        kept.sort(key=lambda item: (-item[1], item[0]))
        self.min_count = min_count
        self.tokens: tuple[str, ...] = tuple(tok for tok, _ in kept)
        self.frequencies = np.array([n for _, n in kept], dtype=np.int64)
        self._index = {tok: i for i, tok in enumerate(self.tokens)}

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: str) -> bool:
        return token in self._index

    def index(self, token: str) -> int:
        return self._index[token]

    def get(self, token: str) -> int | None:
        return self._index.get(token)

    def frequency(self, token: str) -> int:
        return int(self.frequencies[self._index[token]])

    def items(self) -> Iterator[tuple[str, tuple[int, int]]]:
        for i, tok in enumerate(self.tokens):
            yield tok, (i, int(self.frequencies[i]))

    @property
    def total_tokens(self) -> int:
        return int(self.frequencies.sum()) if len(self) else 0


def count_tokens(records: Iterable[Record]) -> Counter:
    counts: Counter = Counter()
    for record in records:
        if isinstance(record, NgramRecord):
            for tok in record.tokens:
                counts[tok] += record.match_count
        else:
            counts.update(record.tokens)
    return counts


def build_vocabulary(
    records: Iterable[Record],
    min_count: int = 10,
    slice_label: str | None = None,
) -> Vocabulary:
    """Count tokens and keep those appearing more than ``min_count`` times."""
    vocab = Vocabulary(count_tokens(records), min_count=min_count)
    if len(vocab) == 0:
        where = f" {slice_label}" if slice_label else ""
        raise EmptyVocabularyError(f"empty slice vocabulary{where}")
    return vocab


def generate_pairs(
    record: Record, vocab: Vocabulary, window: int = 3
) -> Iterator[TrainingPair]:
    """Yield (center, context) index pairs within ``window`` positions.

    Out-of-vocabulary tokens are removed before windowing, so surviving tokens
    close ranks.  Pairs from an n-gram record carry its match count as weight
    instead of being replicated.
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    weight = float(record.match_count) if isinstance(record, NgramRecord) else 1.0
    indices = [vocab.get(tok) for tok in record.tokens]
    indices = [i for i in indices if i is not None]
    n = len(indices)
    for i in range(n):
        lo = max(0, i - window)
        hi = min(n - 1, i + window)
        for j in range(lo, hi + 1):
            if j != i:
                yield TrainingPair(indices[i], indices[j], weight)


@dataclass
class SlicedCorpus:
    """Records routed into per-slice buckets, plus an out-of-range bucket."""

    resolution: Resolution
    year_range: tuple[int, int] = DEFAULT_YEAR_RANGE
    buckets: dict[TimeSlice, list[Record]] = field(default_factory=dict)
    out_of_range: list[Record] = field(default_factory=list)

    def add(self, record: Record) -> None:
        lo, hi = self.year_range
        if not lo <= record.year <= hi:
            self.out_of_range.append(record)
            return
        ts = TimeSlice.containing(record.year, self.resolution)
        self.buckets.setdefault(ts, []).append(record)

    def slices(self) -> list[TimeSlice]:
        return sorted(self.buckets)

    def token_count(self, ts: TimeSlice) -> int:
        return sum(record_token_count(r) for r in self.buckets.get(ts, ()))


def slice_corpus(
    records: Iterable[Record],
    resolution: Resolution,
    year_range: tuple[int, int] = DEFAULT_YEAR_RANGE,
) -> SlicedCorpus:
    """Assign each record to exactly one slice at the given resolution."""
    sliced = SlicedCorpus(resolution=resolution, year_range=year_range)
    for record in records:
        sliced.add(record)
    return sliced


def manifest_line(ts: TimeSlice, token_count: int, vocab_size: int) -> str:
    """One slice-manifest row: RESOLUTION, START, END, TOKENCOUNT, VOCABSIZE."""
    return "\t".join(
        [ts.resolution.value, str(ts.start_year), str(ts.end_year), str(token_count), str(vocab_size)]
    )

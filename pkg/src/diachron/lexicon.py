"""Loaders for the analysis lexicons: social groups, traits, attribute sets.

All files are UTF-8 TSV.  Groups: ``GROUPID<TAB>CATEGORY<TAB>COMPARISONID<TAB>
SLICESPEC-or-*<TAB>labels``; one row per label set, ``*`` marks the default
set that applies to every slice, an explicit ``START-END`` (or single year)
adds labels for slices falling inside that range.  Traits:
``WORD<TAB>VALENCE<TAB>STABLEFLAG``.  Attributes: ``P-or-U<TAB>WORD``.

Lexicon curation itself (choosing labels, rating valence, screening
historical stability) is human work done upstream; these loaders only
validate structure.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Union

import numpy as np

from .corpus import TimeSlice
from .errors import LexiconError

CATEGORIES = ("gender", "ethnicity", "age", "economic", "bodyType")

_TRUE = {"1", "true", "yes"}
_FALSE = {"0", "false", "no"}


@dataclass
class SocialGroup:
    id: str
    category: str
    comparison_id: str
    default_labels: list[str]
    ranged_labels: list[tuple[int, int, list[str]]] = field(default_factory=list)

    def labels_for(self, ts: TimeSlice | None) -> list[str]:
        """Label set in effect during ``ts``: default plus matching ranges."""
        labels = list(self.default_labels)
        if ts is not None:
            for lo, hi, extra in self.ranged_labels:
                if lo <= ts.start_year and ts.end_year <= hi:
                    labels.extend(extra)
        seen: dict[str, None] = {}
        for lab in labels:
            seen.setdefault(lab)
        return list(seen)


@dataclass
class TraitEntry:
    word: str
    valence: float
    stable: bool


@dataclass
class AttributeSets:
    pleasant: list[str]
    unpleasant: list[str]

    def __post_init__(self) -> None:
        if not self.pleasant or not self.unpleasant:
            raise LexiconError("attribute sets must both be non-empty")
        overlap = set(self.pleasant) & set(self.unpleasant)
        if overlap:
            raise LexiconError(f"attribute sets overlap: {sorted(overlap)[:5]}")


def _read_rows(path: Union[str, Path], n_fields: int) -> Iterable[tuple[int, list[str]]]:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != n_fields:
                raise LexiconError(
                    f"{path}:{lineno}: expected {n_fields} tab-separated fields, got {len(fields)}"
                )
            yield lineno, fields


def _parse_slice_spec(spec: str, path: Union[str, Path], lineno: int) -> tuple[int, int]:
    try:
        if "-" in spec:
            lo_s, hi_s = spec.split("-", 1)
            lo, hi = int(lo_s), int(hi_s)
        else:
            lo = hi = int(spec)
    except ValueError:
        raise LexiconError(f"{path}:{lineno}: bad slice spec {spec!r}") from None
    if lo > hi:
        raise LexiconError(f"{path}:{lineno}: empty slice range {spec!r}")
    return lo, hi


def load_groups(path: Union[str, Path]) -> list[SocialGroup]:
    groups: dict[str, SocialGroup] = {}
    scopes: set[tuple[str, str]] = set()
    for lineno, (gid, category, comparison, spec, labels_str) in _read_rows(path, 5):
        if category not in CATEGORIES:
            raise LexiconError(f"{path}:{lineno}: unknown category {category!r}")
        labels = labels_str.split()
        if not labels:
            raise LexiconError(f"{path}:{lineno}: empty label set for group {gid!r}")
        if (gid, spec) in scopes:
            raise LexiconError(f"{path}:{lineno}: duplicate group id {gid!r} for scope {spec!r}")
        scopes.add((gid, spec))
        group = groups.get(gid)
        if group is None:
            group = SocialGroup(gid, category, comparison, [])
            groups[gid] = group
        elif group.category != category or group.comparison_id != comparison:
            raise LexiconError(
                f"{path}:{lineno}: group {gid!r} redefined with different category/comparison"
            )
        if spec == "*":
            group.default_labels.extend(labels)
        else:
            lo, hi = _parse_slice_spec(spec, path, lineno)
            group.ranged_labels.append((lo, hi, labels))
    for group in groups.values():
        if not group.default_labels:
            raise LexiconError(f"group {group.id!r} has no default (*) label set")
        other = groups.get(group.comparison_id)
        if other is None:
            raise LexiconError(
                f"group {group.id!r} compares against undefined group {group.comparison_id!r}"
            )
        if other.comparison_id != group.id:
            raise LexiconError(
                f"groups {group.id!r} and {other.id!r} are not mutual comparisons"
            )
    return list(groups.values())


def load_traits(path: Union[str, Path], normalize: bool = False) -> list[TraitEntry]:
    """Load trait words; with ``normalize`` valences are z-scored in place."""
    entries: list[TraitEntry] = []
    seen: set[str] = set()
    for lineno, (word, valence_str, stable_str) in _read_rows(path, 3):
        if word in seen:
            raise LexiconError(f"{path}:{lineno}: duplicate trait word {word!r}")
        seen.add(word)
        try:
            valence = float(valence_str)
        except ValueError:
            raise LexiconError(
                f"{path}:{lineno}: non-numeric valence {valence_str!r}"
            ) from None
        if not np.isfinite(valence):
            raise LexiconError(f"{path}:{lineno}: non-finite valence {valence_str!r}")
        flag = stable_str.strip().lower()
        if flag in _TRUE:
            stable = True
        elif flag in _FALSE:
            stable = False
        else:
            raise LexiconError(f"{path}:{lineno}: bad stability flag {stable_str!r}")
        entries.append(TraitEntry(word, valence, stable))
    if normalize and entries:
        vals = np.array([e.valence for e in entries], dtype=np.float64)
        sd = vals.std()  # population sd
        mean = vals.mean()
        for entry in entries:
            entry.valence = float((entry.valence - mean) / sd) if sd > 0 else 0.0
    return entries


def load_attributes(path: Union[str, Path]) -> AttributeSets:
    pleasant: list[str] = []
    unpleasant: list[str] = []
    for lineno, (tag, word) in _read_rows(path, 2):
        key = tag.strip().upper()
        if key in ("P", "PLEASANT"):
            bucket = pleasant
        elif key in ("U", "UNPLEASANT"):
            bucket = unpleasant
        else:
            raise LexiconError(f"{path}:{lineno}: attribute tag must be P or U, got {tag!r}")
        if word not in bucket:
            bucket.append(word)
    return AttributeSets(pleasant, unpleasant)


def example_data_dir() -> Path:
    """Directory with the bundled toy lexicons (``*_en.tsv`` and ``*_zh.tsv``).

    Real analysis lexicons (the full curated trait list with valence norms,
    era-specific group labels) are user-supplied data.
    """
    return Path(__file__).parent / "data"


def stable_only(traits: Iterable[TraitEntry]) -> list[TraitEntry]:
    return [t for t in traits if t.stable]


def trait_map(traits: Iterable[TraitEntry]) -> dict[str, TraitEntry]:
    return {t.word: t for t in traits}


def save_groups(groups: Iterable[SocialGroup], path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for g in groups:
            fh.write("\t".join([g.id, g.category, g.comparison_id, "*", " ".join(g.default_labels)]) + "\n")
            for lo, hi, labels in g.ranged_labels:
                spec = str(lo) if lo == hi else f"{lo}-{hi}"
                fh.write("\t".join([g.id, g.category, g.comparison_id, spec, " ".join(labels)]) + "\n")


def save_traits(traits: Iterable[TraitEntry], path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for t in traits:
            fh.write(f"{t.word}\t{t.valence!r}\t{1 if t.stable else 0}\n")


def save_attributes(attrs: AttributeSets, path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for word in attrs.pleasant:
            fh.write(f"P\t{word}\n")
        for word in attrs.unpleasant:
            fh.write(f"U\t{word}\n")

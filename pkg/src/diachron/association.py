"""Group-trait association scores within and across time slices.

The primitive is the mean cosine similarity between a group's label vectors
and one trait vector inside a single slice.  Differences of that score between
a group and its comparison group, and time-averages of those differences over
the slices where a trait qualifies, drive the trait rankings and valence
summaries.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .corpus import TimeSlice
from .lexicon import SocialGroup, TraitEntry
from .sgns import EmbeddingSpace

DEFAULT_MAC_FLOOR = 0.2
DEFAULT_MIN_PERIODS = 3
DEFAULT_TOP_K = 10


@dataclass
class MacScore:
    group_id: str
    trait: str
    slice: TimeSlice | None
    value: float
    label_coverage: int


@dataclass
class TraitProfile:
    group_id: str
    category: str
    comparison_id: str
    top: list[tuple[str, float, float]]  # (trait, agg score, valence)
    mean_valence: float
    shortfall: bool


@dataclass
class AssociationTable:
    scores: list[MacScore]
    diff: dict[tuple[str, str, TimeSlice], float]
    agg: dict[tuple[str, str], tuple[float, int]]


def _check_mutual(group: SocialGroup, comparison: SocialGroup) -> None:
    if group.comparison_id != comparison.id or comparison.comparison_id != group.id:
        raise ValueError(
            f"groups {group.id!r} and {comparison.id!r} are not mutual comparisons"
        )


def mac_with_coverage(
    space: EmbeddingSpace, labels: Sequence[str], trait: str
) -> tuple[float, int] | None:
    """Mean cosine between in-vocabulary labels and the trait vector.

    Returns ``None`` when the trait or every label is out of vocabulary.
    A zero vector has cosine 0 with everything by convention.
    """
    trait_unit = space.unit_vector(trait)
    if trait_unit is None:
        return None
    total = 0.0
    covered = 0
    for label in labels:
        unit = space.unit_vector(label)
        if unit is None:
            continue
        total += float(unit @ trait_unit)
        covered += 1
    if covered == 0:
        return None
    return total / covered, covered


def mac(space: EmbeddingSpace, labels: Sequence[str], trait: str) -> float | None:
    result = mac_with_coverage(space, labels, trait)
    return None if result is None else result[0]


def diff_mac(
    space: EmbeddingSpace,
    group: SocialGroup,
    comparison: SocialGroup,
    trait: str,
    ts: TimeSlice | None = None,
) -> float | None:
    """Group-minus-comparison association difference for one slice."""
    _check_mutual(group, comparison)
    ts = ts if ts is not None else space.slice
    side_g = mac(space, group.labels_for(ts), trait)
    if side_g is None:
        return None
    side_c = mac(space, comparison.labels_for(ts), trait)
    if side_c is None:
        return None
    return side_g - side_c


def agg_diff_mac(
    spaces: Mapping[TimeSlice, EmbeddingSpace],
    group: SocialGroup,
    comparison: SocialGroup,
    trait: str,
    min_periods: int = DEFAULT_MIN_PERIODS,
    mac_floor: float = DEFAULT_MAC_FLOOR,
    symmetric_floor: bool = False,
) -> tuple[float, int] | None:
    """Mean difference over qualifying slices, or ``None`` below persistence.

    A slice qualifies when the difference exists there and the group-side
    association reaches ``mac_floor`` (with ``symmetric_floor`` the comparison
    side must reach it too).
    """
    _check_mutual(group, comparison)
    if min_periods < 1:
        raise ValueError("min_periods must be >= 1")
    diffs = []
    for ts in sorted(spaces):
        space = spaces[ts]
        side_g = mac(space, group.labels_for(ts), trait)
        if side_g is None or side_g < mac_floor:
            continue
        side_c = mac(space, comparison.labels_for(ts), trait)
        if side_c is None:
            continue
        if symmetric_floor and side_c < mac_floor:
            continue
        diffs.append(side_g - side_c)
    if len(diffs) < min_periods:
        return None
    return float(np.mean(diffs)), len(diffs)


def build_association_table(
    spaces: Mapping[TimeSlice, EmbeddingSpace],
    groups: Sequence[SocialGroup],
    traits: Sequence[TraitEntry],
    min_periods: int = DEFAULT_MIN_PERIODS,
    mac_floor: float = DEFAULT_MAC_FLOOR,
) -> AssociationTable:
    """Score every (group, trait, slice) and aggregate across slices."""
    by_id = {g.id: g for g in groups}
    scores: list[MacScore] = []
    diff: dict[tuple[str, str, TimeSlice], float] = {}
    agg: dict[tuple[str, str], tuple[float, int]] = {}
    for group in groups:
        comparison = by_id[group.comparison_id]
        for entry in traits:
            word = entry.word
            kept: list[float] = []
            for ts in sorted(spaces):
                space = spaces[ts]
                got = mac_with_coverage(space, group.labels_for(ts), word)
                if got is None:
                    continue
                value, coverage = got
                scores.append(MacScore(group.id, word, ts, value, coverage))
                side_c = mac(space, comparison.labels_for(ts), word)
                if side_c is None:
                    continue
                diff[(group.id, word, ts)] = value - side_c
                if value >= mac_floor:
                    kept.append(value - side_c)
            if len(kept) >= min_periods:
                agg[(group.id, word)] = (float(np.mean(kept)), len(kept))
    return AssociationTable(scores=scores, diff=diff, agg=agg)


def top_traits(
    agg_scores: Mapping[str, tuple[float, int]],
    traits: Sequence[TraitEntry],
    group: SocialGroup,
    k: int = DEFAULT_TOP_K,
) -> TraitProfile:
    """Highest-scoring traits for a group, ties broken by code-point order."""
    if k < 1:
        raise ValueError("k must be >= 1")
    valences = {t.word: t.valence for t in traits}
    ranked = sorted(agg_scores.items(), key=lambda item: (-item[1][0], item[0]))
    top = [(word, score, valences[word]) for word, (score, _) in ranked[:k]]
    mean_valence = float(np.mean([v for _, _, v in top])) if top else float("nan")
    return TraitProfile(
        group_id=group.id,
        category=group.category,
        comparison_id=group.comparison_id,
        top=top,
        mean_valence=mean_valence,
        shortfall=len(top) < k,
    )


def group_profile(
    spaces: Mapping[TimeSlice, EmbeddingSpace],
    group: SocialGroup,
    comparison: SocialGroup,
    traits: Sequence[TraitEntry],
    k: int = DEFAULT_TOP_K,
    min_periods: int = DEFAULT_MIN_PERIODS,
    mac_floor: float = DEFAULT_MAC_FLOOR,
) -> TraitProfile:
    """Aggregate across slices and rank the group's most distinctive traits."""
    agg: dict[str, tuple[float, int]] = {}
    for entry in traits:
        got = agg_diff_mac(
            spaces, group, comparison, entry.word, min_periods=min_periods, mac_floor=mac_floor
        )
        if got is not None:
            agg[entry.word] = got
    return top_traits(agg, traits, group, k=k)


def decade_valence_series(
    spaces: Mapping[TimeSlice, EmbeddingSpace],
    group: SocialGroup,
    comparison: SocialGroup,
    traits: Sequence[TraitEntry],
    k: int = DEFAULT_TOP_K,
    mac_floor: float = DEFAULT_MAC_FLOOR,
) -> dict[TimeSlice, float]:
    """Per-decade mean valence of the decade's own top-k distinctive traits.

    Decades with no qualifying trait are absent from the result.
    """
    _check_mutual(group, comparison)
    series: dict[TimeSlice, float] = {}
    for ts in sorted(spaces):
        space = spaces[ts]
        labels_g = group.labels_for(ts)
        labels_c = comparison.labels_for(ts)
        scored: list[tuple[str, float, float]] = []
        for entry in traits:
            side_g = mac(space, labels_g, entry.word)
            if side_g is None or side_g < mac_floor:
                continue
            side_c = mac(space, labels_c, entry.word)
            if side_c is None:
                continue
            scored.append((entry.word, side_g - side_c, entry.valence))
        if not scored:
            continue
        scored.sort(key=lambda item: (-item[1], item[0]))
        series[ts] = float(np.mean([valence for _, _, valence in scored[:k]]))
    return series


def association_rows(
    spaces: Mapping[TimeSlice, EmbeddingSpace],
    groups: Sequence[SocialGroup],
    traits: Iterable[TraitEntry],
    lookup: Mapping[str, SocialGroup] | None = None,
) -> Iterable[tuple[str, str, str, str, float | None, float | None, float | None]]:
    """Rows for the per-slice export: group, comparison, trait, slice, both sides, diff.

    ``lookup`` resolves comparison groups when ``groups`` is a filtered subset.
    """
    by_id = lookup if lookup is not None else {g.id: g for g in groups}
    for group in groups:
        comparison = by_id[group.comparison_id]
        for entry in traits:
            for ts in sorted(spaces):
                space = spaces[ts]
                side_g = mac(space, group.labels_for(ts), entry.word)
                side_c = mac(space, comparison.labels_for(ts), entry.word)
                if side_g is None and side_c is None:
                    continue
                diff = None if side_g is None or side_c is None else side_g - side_c
                yield (group.id, comparison.id, entry.word, ts.label, side_g, side_c, diff)

"""Year-to-year stability of a group's trait-association profile.

For each year, the group's association with every in-vocabulary trait forms a
vector; correlating those vectors across all year pairs yields a matrix whose
banded structure exposes periods of disrupted representation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .corpus import TimeSlice
from .errors import DiachronError
from .lexicon import SocialGroup, TraitEntry
from .sgns import EmbeddingSpace
from .association import mac

DEFAULT_MIN_OVERLAP = 10
DEFAULT_BAND_THRESHOLD = 0.4
DEFAULT_MIN_RUN = 3


@dataclass
class AssociationVector:
    group_id: str
    year: int
    entries: dict[str, float]


@dataclass
class CorrelationMatrix:
    group_id: str
    years: list[int]
    values: np.ndarray  # square, NaN marks undefined pairs
    missing_years: list[int]


def association_vector(
    space: EmbeddingSpace, group: SocialGroup, traits: Sequence[TraitEntry]
) -> AssociationVector:
    """Group-trait association for every trait present in this year's vocabulary."""
    ts = space.slice
    labels = group.labels_for(ts)
    if not any(label in space.vocab for label in labels):
        raise DiachronError(
            f"no label of group {group.id!r} in vocabulary for slice "
            f"{ts.label if ts else '<none>'}"
        )
    entries: dict[str, float] = {}
    for entry in traits:
        value = mac(space, labels, entry.word)
        if value is not None:
            entries[entry.word] = value
    year = ts.start_year if ts else 0
    return AssociationVector(group_id=group.id, year=year, entries=entries)


def _rank(values: np.ndarray) -> np.ndarray:
    """Average ranks (1-based) with ties sharing their mean rank."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=np.float64)
    sorted_vals = values[order]
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def correlate(
    a: AssociationVector,
    b: AssociationVector,
    min_overlap: int = DEFAULT_MIN_OVERLAP,
    method: str = "pearson",
) -> float | None:
    """Correlation over the shared trait keys; ``None`` when undefined.

    Undefined means fewer than ``min_overlap`` shared traits or zero variance
    on either side.
    """
    if method not in ("pearson", "spearman"):
        raise ValueError(f"unknown correlation method {method!r}")
    shared = sorted(a.entries.keys() & b.entries.keys())
    if len(shared) < min_overlap:
        return None
    xa = np.array([a.entries[w] for w in shared], dtype=np.float64)
    xb = np.array([b.entries[w] for w in shared], dtype=np.float64)
    if method == "spearman":
        xa = _rank(xa)
        xb = _rank(xb)
    xa -= xa.mean()
    xb -= xb.mean()
    denom = np.sqrt((xa @ xa) * (xb @ xb))
    if denom == 0.0:
        return None
    return float(np.clip((xa @ xb) / denom, -1.0, 1.0))


def correlation_matrix(
    annual_spaces: Mapping[TimeSlice, EmbeddingSpace],
    group: SocialGroup,
    traits: Sequence[TraitEntry],
    min_overlap: int = DEFAULT_MIN_OVERLAP,
    method: str = "pearson",
) -> CorrelationMatrix:
    """All pairwise year correlations; undefined pairs are recorded as NaN."""
    vectors: dict[int, AssociationVector] = {}
    missing: list[int] = []
    for ts in sorted(annual_spaces):
        try:
            vec = association_vector(annual_spaces[ts], group, traits)
        except DiachronError:
            missing.append(ts.start_year)
            continue
        vectors[ts.start_year] = vec
    years = sorted(vectors)
    if len(years) < 2:
        raise DiachronError(
            f"need at least 2 usable years for group {group.id!r}, got {len(years)}"
        )
    n = len(years)
    values = np.full((n, n), np.nan, dtype=np.float64)
    for i in range(n):
        for j in range(i, n):
            r = correlate(vectors[years[i]], vectors[years[j]], min_overlap, method)
            if r is not None:
                values[i, j] = r
                values[j, i] = r
    return CorrelationMatrix(group.id, years, values, missing)


def disruption_bands(
    matrix: CorrelationMatrix,
    threshold: float = DEFAULT_BAND_THRESHOLD,
    min_run: int = DEFAULT_MIN_RUN,
) -> list[tuple[int, int, float]]:
    """Maximal runs of consecutive years weakly correlated with all others.

    A year is flagged when the mean of its defined off-diagonal correlations
    falls below ``threshold``; runs shorter than ``min_run`` (or broken by
    non-consecutive years) are dropped.  Each band reports its mean
    off-diagonal correlation.
    """
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must lie in (0, 1)")
    years = matrix.years
    n = len(years)
    row_means = np.full(n, np.nan)
    for i in range(n):
        off = np.concatenate([matrix.values[i, :i], matrix.values[i, i + 1 :]])
        defined = off[~np.isnan(off)]
        if defined.size:
            row_means[i] = defined.mean()
    bands: list[tuple[int, int, float]] = []
    run_start = None
    for i in range(n + 1):
        flagged = (
            i < n
            and not np.isnan(row_means[i])
            and row_means[i] < threshold
            and (run_start is None or years[i] == years[i - 1] + 1)
        )
        if flagged:
            if run_start is None:
                run_start = i
            continue
        if run_start is not None:
            end = i - 1
            if end - run_start + 1 >= min_run:
                bands.append(
                    (years[run_start], years[end], float(row_means[run_start : end + 1].mean()))
                )
            run_start = None
            # a below-threshold year that broke adjacency starts a new run
            if i < n and not np.isnan(row_means[i]) and row_means[i] < threshold:
                run_start = i
    return bands


def matrix_to_tsv(matrix: CorrelationMatrix) -> str:
    """Square TSV with a year header row and column; NA marks undefined cells."""
    lines = ["YEAR\t" + "\t".join(str(y) for y in matrix.years)]
    for i, year in enumerate(matrix.years):
        cells = [
            "NA" if np.isnan(v) else repr(float(v)) for v in matrix.values[i]
        ]
        lines.append(str(year) + "\t" + "\t".join(cells))
    return "\n".join(lines) + "\n"


_RAMP_LOW = (33, 102, 172)  # blue at -1
_RAMP_MID = (247, 247, 247)  # white at 0
_RAMP_HIGH = (178, 24, 43)  # red at +1
_MISSING_COLOR = "#bdbdbd"


def _ramp_color(value: float) -> str:
    v = max(-1.0, min(1.0, value))
    if v >= 0:
        lo, hi, t = _RAMP_MID, _RAMP_HIGH, v
    else:
        lo, hi, t = _RAMP_MID, _RAMP_LOW, -v
    rgb = [round(l + (h - l) * t) for l, h in zip(lo, hi)]
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def matrix_to_svg(matrix: CorrelationMatrix, meta: str | None = None) -> str:
    """Standalone heatmap SVG; red = strong positive, blue = negative, gray = missing."""
    width, height = 800, 600
    margin_left, margin_top, margin_bottom = 80, 60, 60
    plot = min(width - margin_left - 20, height - margin_top - margin_bottom)
    n = len(matrix.years)
    cell = plot / n
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {width} {height}">',
    ]
    if meta:
        parts.append(f"<!-- {meta} -->")
    parts.append(
        f'<text x="{margin_left}" y="30" font-size="18" font-family="sans-serif">'
        f"year-to-year trait-association correlation: {matrix.group_id}</text>"
    )
    for i in range(n):
        for j in range(n):
            v = matrix.values[i, j]
            color = _MISSING_COLOR if np.isnan(v) else _ramp_color(float(v))
            x = margin_left + j * cell
            y = margin_top + i * cell
            parts.append(
                f'<rect x="{x:.2f}" y="{y:.2f}" width="{cell:.2f}" height="{cell:.2f}" '
                f'fill="{color}"/>'
            )
    for idx, year in enumerate(matrix.years):
        if year % 10 == 0:
            x = margin_left + (idx + 0.5) * cell
            y = margin_top + (idx + 0.5) * cell
            parts.append(
                f'<text x="{x:.2f}" y="{margin_top + plot + 16:.2f}" font-size="10" '
                f'text-anchor="middle" font-family="sans-serif">{year}</text>'
            )
            parts.append(
                f'<text x="{margin_left - 6}" y="{y:.2f}" font-size="10" '
                f'text-anchor="end" font-family="sans-serif">{year}</text>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"

"""Report emission: TSV tables, formatted text summaries, and SVG charts.

Outputs are deterministic byte-for-byte for identical inputs: floats are
written with ``repr`` (shortest round-trip form), iteration orders are sorted,
and no data file carries a timestamp.  The run manifest is the one file with
a timestamp; every emitted file references the manifest's config hash in a
leading comment.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Mapping, Sequence, Union

from .association import TraitProfile
from .corpus import TimeSlice
from .drift import CorrelationMatrix, matrix_to_svg, matrix_to_tsv
from .weat import EventImpact, WeatSeries

_PALETTE = ["#1b6ca8", "#c0392b", "#27ae60", "#8e44ad", "#d35400", "#16a085", "#7f8c8d"]


def fmt(x: float) -> str:
    """Full-precision float form that round-trips exactly."""
    return repr(float(x))


def p_stars(p: float) -> str:
    if p < 0.001:
        return "***"
    if p < 0.01:
        return "**"
    if p < 0.05:
        return "*"
    return ""


def config_hash(config: Mapping[str, str]) -> str:
    blob = "\n".join(f"{k}={config[k]}" for k in sorted(config)).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()


def file_digest(path: Union[str, Path]) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


@dataclass
class RunManifest:
    config_hash: str
    tool_version: str
    corpus_digests: dict[str, str] = field(default_factory=dict)
    lexicon_digests: dict[str, str] = field(default_factory=dict)
    slice_inventory: list[str] = field(default_factory=list)
    skipped_slices: list[str] = field(default_factory=list)
    created: str = ""

    def write(self, path: Union[str, Path]) -> None:
        created = self.created or datetime.now(timezone.utc).isoformat()
        lines = [
            f"config_hash\t{self.config_hash}",
            f"tool_version\t{self.tool_version}",
            f"created\t{created}",
        ]
        for name in sorted(self.corpus_digests):
            lines.append(f"corpus\t{name}\t{self.corpus_digests[name]}")
        for name in sorted(self.lexicon_digests):
            lines.append(f"lexicon\t{name}\t{self.lexicon_digests[name]}")
        for row in self.slice_inventory:
            lines.append(f"slice\t{row}")
        for label in self.skipped_slices:
            lines.append(f"skipped_slice\t{label}")
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _write(path: Union[str, Path], meta: str, body: str) -> None:
    Path(path).write_text(f"# config={meta}\n{body}", encoding="utf-8")


def emit_profile_table(
    profiles: Sequence[TraitProfile], path: Union[str, Path], meta: str = ""
) -> str:
    """Write the per-group trait table; returns a formatted text rendering."""
    rows = sorted(profiles, key=lambda p: (p.category, p.group_id))
    header = "GROUP\tCATEGORY\tCOMPARISON\tMEAN_VALENCE\tN_TRAITS\tSHORTFALL\tTRAITS"
    lines = [header]
    for p in rows:
        traits = " ".join(f"{w}:{fmt(s)}:{fmt(v)}" for w, s, v in p.top)
        valence = fmt(p.mean_valence) if p.top else "NA"
        lines.append(
            "\t".join(
                [
                    p.group_id,
                    p.category,
                    p.comparison_id,
                    valence,
                    str(len(p.top)),
                    "yes" if p.shortfall else "no",
                    traits,
                ]
            )
        )
    _write(path, meta, "\n".join(lines) + "\n")

    text_lines = [f"{'group':<16}{'category':<12}{'valence':>8}  top traits"]
    for p in rows:
        valence = f"{p.mean_valence:.2f}" if p.top else "  NA"
        words = ", ".join(w for w, _, _ in p.top) or "(none)"
        mark = " [shortfall]" if p.shortfall else ""
        text_lines.append(f"{p.group_id:<16}{p.category:<12}{valence:>8}  {words}{mark}")
    return "\n".join(text_lines) + "\n"


def _svg_line_chart(
    series: Mapping[str, Sequence[tuple[int, float]]],
    title: str,
    meta: str = "",
    y_label: str = "",
) -> str:
    width, height = 800, 600
    left, right, top, bottom = 80, 40, 60, 60
    plot_w, plot_h = width - left - right, height - top - bottom
    xs = [x for pts in series.values() for x, _ in pts]
    ys = [y for pts in series.values() for _, y in pts]
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {width} {height}">']
    if meta:
        parts.append(f"<!-- config={meta} -->")
    parts.append(
        f'<text x="{left}" y="30" font-size="18" font-family="sans-serif">{title}</text>'
    )
    if xs:
        x_lo, x_hi = min(xs), max(xs)
        y_lo, y_hi = min(ys), max(ys)
        if x_hi == x_lo:
            x_hi = x_lo + 1
        pad = (y_hi - y_lo) * 0.1 or 1.0
        y_lo, y_hi = y_lo - pad, y_hi + pad

        def sx(x: float) -> float:
            return left + (x - x_lo) / (x_hi - x_lo) * plot_w

        def sy(y: float) -> float:
            return top + (y_hi - y) / (y_hi - y_lo) * plot_h

        parts.append(
            f'<line x1="{left}" y1="{top + plot_h}" x2="{left + plot_w}" y2="{top + plot_h}" '
            'stroke="#333"/>'
        )
        parts.append(f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + plot_h}" stroke="#333"/>')
        if y_lo < 0 < y_hi:
            zero = sy(0.0)
            parts.append(
                f'<line x1="{left}" y1="{zero:.2f}" x2="{left + plot_w}" y2="{zero:.2f}" '
                'stroke="#999" stroke-dasharray="4 4"/>'
            )
        for year in range(x_lo - x_lo % 10, x_hi + 1, 10):
            if year < x_lo:
                continue
            parts.append(
                f'<text x="{sx(year):.2f}" y="{top + plot_h + 20}" font-size="11" '
                f'text-anchor="middle" font-family="sans-serif">{year}</text>'
            )
        for frac in (0.0, 0.5, 1.0):
            yv = y_lo + (y_hi - y_lo) * frac
            parts.append(
                f'<text x="{left - 8}" y="{sy(yv):.2f}" font-size="11" text-anchor="end" '
                f'font-family="sans-serif">{yv:.2f}</text>'
            )
        if y_label:
            parts.append(
                f'<text x="20" y="{top - 10}" font-size="12" font-family="sans-serif">{y_label}</text>'
            )
        for idx, name in enumerate(sorted(series)):
            color = _PALETTE[idx % len(_PALETTE)]
            pts = sorted(series[name])
            segment: list[str] = []
            prev_x = None
            for x, y in pts:
                if prev_x is not None and x - prev_x > 10:
                    if len(segment) >= 2:
                        parts.append(
                            f'<polyline fill="none" stroke="{color}" stroke-width="2" '
                            f'points="{" ".join(segment)}"/>'
                        )
                    segment = []
                segment.append(f"{sx(x):.2f},{sy(y):.2f}")
                parts.append(
                    f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="3" fill="{color}"/>'
                )
                prev_x = x
            if len(segment) >= 2:
                parts.append(
                    f'<polyline fill="none" stroke="{color}" stroke-width="2" '
                    f'points="{" ".join(segment)}"/>'
                )
            parts.append(
                f'<text x="{left + plot_w - 150}" y="{top + 16 * (idx + 1)}" font-size="12" '
                f'fill="{color}" font-family="sans-serif">{name}</text>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def emit_valence_series(
    series_by_group: Mapping[str, Mapping[TimeSlice, float]],
    tsv_path: Union[str, Path],
    svg_path: Union[str, Path],
    meta: str = "",
) -> None:
    """Per-decade mean valence: TSV plus a line chart with gaps left unfilled."""
    lines = ["GROUP\tDECADE\tMEAN_VALENCE"]
    chart: dict[str, list[tuple[int, float]]] = {}
    for group_id in sorted(series_by_group):
        pts = []
        for ts in sorted(series_by_group[group_id]):
            value = series_by_group[group_id][ts]
            lines.append(f"{group_id}\t{ts.start_year}\t{fmt(value)}")
            pts.append((ts.start_year, value))
        chart[group_id] = pts
    _write(tsv_path, meta, "\n".join(lines) + "\n")
    svg = _svg_line_chart(chart, "mean valence of top distinctive traits by decade", meta)
    Path(svg_path).write_text(svg, encoding="utf-8")


def emit_weat_series(
    series_list: Sequence[WeatSeries], path: Union[str, Path], meta: str = ""
) -> None:
    lines = ["GROUP\tYEAR\tWEAT"]
    for series in sorted(series_list, key=lambda s: s.group_id):
        for point in series.points:
            lines.append(f"{series.group_id}\t{point.year}\t{fmt(point.score)}")
    _write(path, meta, "\n".join(lines) + "\n")


def emit_event_report(
    impacts: Sequence[EventImpact], path: Union[str, Path], meta: str = ""
) -> str:
    """Write event statistics TSV; returns a starred text summary."""
    rows = sorted(impacts, key=lambda e: (e.group_id, e.event_year))
    lines = ["GROUP\tEVENTYEAR\tT\tDF\tP\tD\tNPRE\tNPOST"]
    for e in rows:
        lines.append(
            "\t".join(
                [
                    e.group_id,
                    str(e.event_year),
                    fmt(e.t_statistic),
                    fmt(e.degrees_of_freedom),
                    fmt(e.p_value),
                    fmt(e.cohens_d),
                    str(len(e.pre_samples)),
                    str(len(e.post_samples)),
                ]
            )
        )
    _write(path, meta, "\n".join(lines) + "\n")

    text = [f"{'group':<16}{'event':>6}  t(df)        p        d"]
    for e in rows:
        stars = p_stars(e.p_value)
        text.append(
            f"{e.group_id:<16}{e.event_year:>6}  "
            f"t({e.degrees_of_freedom:.0f})={e.t_statistic:.3f}  "
            f"p={e.p_value:.4g}{stars}  d={e.cohens_d:.3f}"
        )
    return "\n".join(text) + "\n"


def emit_correlation(
    matrix: CorrelationMatrix,
    tsv_path: Union[str, Path],
    svg_path: Union[str, Path],
    meta: str = "",
) -> None:
    _write(tsv_path, meta, matrix_to_tsv(matrix))
    Path(svg_path).write_text(matrix_to_svg(matrix, meta=f"config={meta}"), encoding="utf-8")


def emit_association_table(rows, path: Union[str, Path], meta: str = "") -> None:
    """Per-slice association scores for both sides of each comparison."""
    lines = ["GROUP\tCOMPARISON\tTRAIT\tSLICE\tMAC_G\tMAC_C\tDIFF"]
    for group_id, comparison_id, trait, slice_label, mg, mc, diff in rows:
        lines.append(
            "\t".join(
                [
                    group_id,
                    comparison_id,
                    trait,
                    slice_label,
                    "NA" if mg is None else fmt(mg),
                    "NA" if mc is None else fmt(mc),
                    "NA" if diff is None else fmt(diff),
                ]
            )
        )
    _write(path, meta, "\n".join(lines) + "\n")

"""Command-line pipeline: synth -> train -> analyze -> report.

Configuration is a flat ``key=value`` UTF-8 file with dotted section prefixes
(``train.dimension=300``); any key can be overridden on the command line with
``--train.dimension=400``-style flags.  Exit codes: 0 success, 1 internal
error, 2 user/config error.
"""

from __future__ import annotations

import argparse
import os
import re
import sys
import tempfile
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from . import __version__
from .association import association_rows, decade_valence_series, group_profile
from .corpus import (
    NgramRecord,
    Resolution,
    TimeSlice,
    manifest_line,
    read_corpus,
    record_token_count,
)
from .drift import CorrelationMatrix, correlation_matrix, disruption_bands, matrix_to_svg
from .errors import ConfigError, DiachronError
from .lexicon import load_attributes, load_groups, load_traits, stable_only
from .report import (
    RunManifest,
    _svg_line_chart,
    config_hash,
    emit_association_table,
    emit_correlation,
    emit_event_report,
    emit_profile_table,
    emit_valence_series,
    emit_weat_series,
    file_digest,
)
from .sgns import SkipGramEmbedder, load_embeddings, save_embeddings, train_slices
from .synth import generate_corpus, load_synth_spec, write_lexicons
from .weat import DEFAULT_EVENTS, event_impact, weat_series

DEFAULTS: dict[str, str] = {
    "corpus.path": "",
    "corpus.format": "docPerLine",
    "corpus.resolutions": "annual,decade",
    "corpus.start_year": "1950",
    "corpus.end_year": "2019",
    "train.dimension": "300",
    "train.window": "3",
    "train.negatives": "5",
    "train.epochs": "5",
    "train.learning_rate": "0.025",
    "train.min_count": "10",
    "train.subsample": "1e-4",
    "train.unigram_power": "0.75",
    "train.seed": "0",
    "train.workers": "1",
    "lexicon.groups": "",
    "lexicon.traits": "",
    "lexicon.attributes": "",
    "lexicon.normalize_valence": "false",
    "lexicon.stable_only": "true",
    "analysis.k": "10",
    "analysis.mac_floor": "0.2",
    "analysis.min_periods": "3",
    "analysis.window_years": "5",
    "analysis.events": ",".join(str(y) for y in sorted(DEFAULT_EVENTS)),
    "analysis.min_overlap": "10",
    "analysis.correlation": "pearson",
    "analysis.groups": "",
    "synth.spec": "",
    "synth.seed": "0",
    "output.dir": "",
}

_OVERRIDE_RE = re.compile(r"^--([a-z]+(?:\.[a-z_]+)+)=(.*)$")


def parse_config_file(path: str | Path) -> dict[str, str]:
    if not Path(path).is_file():
        raise ConfigError(f"config file not found: {path}")
    cfg: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, value = line.split("=", 1)
            cfg[key.strip()] = value.strip()
    return cfg


def effective_config(args: argparse.Namespace, extras: Sequence[str]) -> dict[str, str]:
    cfg = dict(DEFAULTS)
    if args.config:
        file_cfg = parse_config_file(args.config)
        unknown = set(file_cfg) - set(DEFAULTS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(file_cfg)
    for extra in extras:
        match = _OVERRIDE_RE.match(extra)
        if not match:
            raise ConfigError(f"unrecognized argument {extra!r} (expected --section.key=value)")
        key, value = match.groups()
        if key not in DEFAULTS:
            raise ConfigError(f"unknown config key {key!r}")
        cfg[key] = value
    if args.seed is not None:
        cfg["train.seed"] = str(args.seed)
        cfg["synth.seed"] = str(args.seed)
    if args.workers is not None:
        cfg["train.workers"] = str(args.workers)
    if args.strict:
        cfg["train.workers"] = "1"
    if args.out:
        cfg["output.dir"] = args.out
    if getattr(args, "groups", None):
        cfg["analysis.groups"] = args.groups
    if not cfg["output.dir"]:
        cfg["output.dir"] = os.environ.get("DIACHRON_OUT", "diachron_out")
    return cfg


def _bool(cfg: Mapping[str, str], key: str) -> bool:
    value = cfg[key].strip().lower()
    if value in ("1", "true", "yes"):
        return True
    if value in ("0", "false", "no"):
        return False
    raise ConfigError(f"{key} must be boolean, got {cfg[key]!r}")


def _subsample(raw: str) -> float | None:
    raw = raw.strip().lower()
    if raw in ("", "none", "off"):
        return None
    value = float(raw)
    return value if value > 0 else None


def _estimator(cfg: Mapping[str, str]) -> SkipGramEmbedder:
    try:
        return SkipGramEmbedder(
            dimension=int(cfg["train.dimension"]),
            window=int(cfg["train.window"]),
            negatives=int(cfg["train.negatives"]),
            epochs=int(cfg["train.epochs"]),
            learning_rate=float(cfg["train.learning_rate"]),
            min_count=int(cfg["train.min_count"]),
            subsample=_subsample(cfg["train.subsample"]),
            unigram_power=float(cfg["train.unigram_power"]),
            seed=int(cfg["train.seed"]),
            workers=int(cfg["train.workers"]),
        )
    except ValueError as exc:
        raise ConfigError(f"bad trainer setting: {exc}") from None


def _serialize(record) -> str:
    if isinstance(record, NgramRecord):
        return f"{' '.join(record.tokens)}\t{record.year}\t{record.match_count}"
    return f"{record.year}\t{' '.join(record.tokens)}"


def _resolutions(cfg: Mapping[str, str]) -> list[Resolution]:
    out = []
    for part in cfg["corpus.resolutions"].split(","):
        part = part.strip()
        if not part:
            continue
        try:
            out.append(Resolution(part))
        except ValueError:
            raise ConfigError(f"unknown resolution {part!r}") from None
    if not out:
        raise ConfigError("corpus.resolutions selects nothing")
    return out


def emb_filename(ts: TimeSlice) -> str:
    return f"emb_{ts.resolution.value}_{ts.start_year}_{ts.end_year}.emb"


def cmd_synth(cfg: Mapping[str, str]) -> int:
    spec_path = cfg["synth.spec"]
    if not spec_path:
        raise ConfigError("synth requires synth.spec=<file>")
    if not Path(spec_path).is_file():
        raise ConfigError(f"synth spec not found: {spec_path}")
    spec = load_synth_spec(spec_path)
    out = Path(cfg["output.dir"]) / "corpus"
    out.mkdir(parents=True, exist_ok=True)
    corpus_path = out / "corpus.tsv"
    stats = generate_corpus(spec, int(cfg["synth.seed"]), corpus_path)
    lexicons = write_lexicons(spec, out / "lexicons")
    print(f"wrote {stats['sentences']} sentences / {stats['tokens']} tokens to {corpus_path}")
    for name, path in lexicons.items():
        print(f"wrote {name} lexicon to {path}")
    return 0


def cmd_train(cfg: Mapping[str, str]) -> int:
    corpus_path = cfg["corpus.path"]
    if not corpus_path:
        raise ConfigError("train requires corpus.path=<file>")
    if not Path(corpus_path).is_file():
        raise ConfigError(f"corpus file not found: {corpus_path}")
    fmt = cfg["corpus.format"]
    year_range = (int(cfg["corpus.start_year"]), int(cfg["corpus.end_year"]))
    resolutions = _resolutions(cfg)
    base = _estimator(cfg)
    out = Path(cfg["output.dir"])
    emb_dir = out / "embeddings"
    emb_dir.mkdir(parents=True, exist_ok=True)

    manifest_rows: list[str] = []
    with tempfile.TemporaryDirectory(prefix="diachron_spool_") as spool_root:
        spool = Path(spool_root)
        handles: dict[tuple[Resolution, TimeSlice], object] = {}
        token_counts: dict[tuple[Resolution, TimeSlice], int] = {}
        out_of_range = 0
        reader = read_corpus(corpus_path, fmt)
        try:
            for record in reader:
                if not year_range[0] <= record.year <= year_range[1]:
                    out_of_range += 1
                    continue
                line = _serialize(record)
                for res in resolutions:
                    ts = TimeSlice.containing(record.year, res)
                    key = (res, ts)
                    fh = handles.get(key)
                    if fh is None:
                        fh = open(spool / f"{res.value}_{ts.start_year}.tsv", "w", encoding="utf-8")
                        handles[key] = fh
                        token_counts[key] = 0
                    fh.write(line + "\n")
                    token_counts[key] += record_token_count(record)
        finally:
            for fh in handles.values():
                fh.close()
        print(
            f"ingested {reader.records_read} records "
            f"({reader.malformed_count} malformed, {out_of_range} out of range)"
        )
        for res in resolutions:
            buckets = {}
            for (bres, ts), _ in handles.items():
                if bres is res:
                    path = spool / f"{res.value}_{ts.start_year}.tsv"
                    buckets[ts] = lambda p=path: read_corpus(p, fmt)
            if not buckets:
                continue
            spaces, skipped = train_slices(buckets, base)
            for ts, space in sorted(spaces.items()):
                save_embeddings(space, emb_dir / emb_filename(ts))
                manifest_rows.append(
                    manifest_line(ts, token_counts[(res, ts)], len(space.vocab))
                )
                print(f"trained {ts.resolution.value} slice {ts.label}: |V|={len(space.vocab)}")
            for ts in skipped:
                manifest_rows.append(manifest_line(ts, token_counts[(res, ts)], 0))
                print(f"skipped {ts.resolution.value} slice {ts.label}: vocabulary empty")
    (out / "slices.tsv").write_text("\n".join(manifest_rows) + "\n", encoding="utf-8")
    print(f"slice manifest: {out / 'slices.tsv'}")
    return 0


def _load_lexicons(cfg: Mapping[str, str]):
    for key in ("lexicon.groups", "lexicon.traits", "lexicon.attributes"):
        if not cfg[key]:
            raise ConfigError(f"analyze requires {key}=<file>")
        if not Path(cfg[key]).is_file():
            raise ConfigError(f"lexicon file not found: {cfg[key]}")
    groups = load_groups(cfg["lexicon.groups"])
    traits = load_traits(cfg["lexicon.traits"], normalize=_bool(cfg, "lexicon.normalize_valence"))
    if _bool(cfg, "lexicon.stable_only"):
        traits = stable_only(traits)
    attrs = load_attributes(cfg["lexicon.attributes"])
    return groups, traits, attrs


def cmd_analyze(cfg: Mapping[str, str]) -> int:
    out = Path(cfg["output.dir"])
    emb_dir = out / "embeddings"
    emb_files = sorted(emb_dir.glob("emb_*.emb"))
    if not emb_files:
        raise ConfigError(f"no embeddings found in {emb_dir}; run train first")
    spaces: dict[Resolution, dict[TimeSlice, object]] = {r: {} for r in Resolution}
    for path in emb_files:
        space = load_embeddings(path)
        if space.slice is None:
            raise ConfigError(f"embedding file {path} carries no slice metadata")
        spaces[space.slice.resolution][space.slice] = space
    groups, traits, attrs = _load_lexicons(cfg)
    by_id = {g.id: g for g in groups}
    selected = groups
    if cfg["analysis.groups"].strip():
        wanted = [gid.strip() for gid in cfg["analysis.groups"].split(",") if gid.strip()]
        missing = [gid for gid in wanted if gid not in by_id]
        if missing:
            raise ConfigError(f"analysis.groups names unknown groups: {missing}")
        selected = [by_id[gid] for gid in wanted]

    k = int(cfg["analysis.k"])
    mac_floor = float(cfg["analysis.mac_floor"])
    min_periods = int(cfg["analysis.min_periods"])
    window_years = int(cfg["analysis.window_years"])
    min_overlap = int(cfg["analysis.min_overlap"])
    method = cfg["analysis.correlation"]
    events = [int(y) for y in cfg["analysis.events"].split(",") if y.strip()]

    agg_spaces = spaces[Resolution.DECADE] or spaces[Resolution.ANNUAL]
    annual_spaces = spaces[Resolution.ANNUAL]
    report_dir = out / "report"
    report_dir.mkdir(parents=True, exist_ok=True)
    # each analyze produces a coherent set; drop artifacts of earlier runs
    for stale in ("manifest.tsv", "profiles.tsv", "valence_series.tsv", "valence_series.svg", "weat_series.tsv", "events.tsv", "associations.tsv"):
        (report_dir / stale).unlink(missing_ok=True)
    for stale_path in report_dir.glob("corr_*"):
        stale_path.unlink()
    meta = config_hash(cfg)
    notes: list[str] = []

    profiles = []
    valence = {}
    for group in selected:
        comparison = by_id[group.comparison_id]
        profiles.append(
            group_profile(
                agg_spaces, group, comparison, traits,
                k=k, min_periods=min_periods, mac_floor=mac_floor,
            )
        )
        series = decade_valence_series(
            spaces[Resolution.DECADE] or agg_spaces, group, comparison, traits,
            k=k, mac_floor=mac_floor,
        )
        if series:
            valence[group.id] = series
        else:
            notes.append(f"no qualifying decade valence points for group {group.id}")
    profile_text = emit_profile_table(profiles, report_dir / "profiles.tsv", meta)
    emit_valence_series(
        valence, report_dir / "valence_series.tsv", report_dir / "valence_series.svg", meta
    )
    all_spaces = {**spaces[Resolution.ANNUAL], **spaces[Resolution.DECADE]}
    emit_association_table(
        association_rows(all_spaces, selected, traits, lookup=by_id),
        report_dir / "associations.tsv",
        meta,
    )

    all_series = []
    impacts = []
    for group in selected:
        if not annual_spaces:
            notes.append("no annual embeddings: series and event analyses skipped")
            break
        series, missing_years = weat_series(annual_spaces, group, attrs)
        if missing_years:
            notes.append(f"group {group.id}: no score for years {missing_years}")
        all_series.append(series)
        for year in events:
            try:
                impacts.append(event_impact(series, year, window_years))
            except ValueError as exc:
                notes.append(f"group {group.id}, event {year}: {exc}")
    emit_weat_series(all_series, report_dir / "weat_series.tsv", meta)
    event_text = emit_event_report(impacts, report_dir / "events.tsv", meta)

    for group in selected:
        if not annual_spaces:
            break
        try:
            matrix = correlation_matrix(
                annual_spaces, group, traits, min_overlap=min_overlap, method=method
            )
        except DiachronError as exc:
            notes.append(f"group {group.id}: correlation skipped ({exc})")
            continue
        emit_correlation(
            matrix,
            report_dir / f"corr_{group.id}.tsv",
            report_dir / f"corr_{group.id}.svg",
            meta,
        )
        for start, end, mean_r in disruption_bands(matrix):
            notes.append(
                f"group {group.id}: weak-correlation band {start}-{end} "
                f"(mean r {mean_r:.3f}; derived summary, not a scored statistic)"
            )

    manifest = RunManifest(config_hash=meta, tool_version=__version__)
    if cfg["corpus.path"] and Path(cfg["corpus.path"]).is_file():
        manifest.corpus_digests[cfg["corpus.path"]] = file_digest(cfg["corpus.path"])
    for key in ("lexicon.groups", "lexicon.traits", "lexicon.attributes"):
        manifest.lexicon_digests[cfg[key]] = file_digest(cfg[key])
    slices_file = out / "slices.tsv"
    if slices_file.is_file():
        for line in slices_file.read_text(encoding="utf-8").splitlines():
            if line.strip():
                (manifest.slice_inventory if not line.endswith("\t0") else manifest.skipped_slices).append(line)
    manifest.write(report_dir / "manifest.tsv")

    print(profile_text)
    print(event_text)
    for note in notes:
        print(f"note: {note}")
    print(f"report written to {report_dir}")
    return 0


def _read_tsv(path: Path) -> tuple[str, list[str], list[list[str]]]:
    meta = ""
    header: list[str] = []
    rows: list[list[str]] = []
    for line in path.read_text(encoding="utf-8").splitlines():
        if line.startswith("# config="):
            meta = line[len("# config=") :]
            continue
        if not header:
            header = line.split("\t")
            continue
        if line.strip():
            rows.append(line.split("\t"))
    return meta, header, rows


def cmd_report(cfg: Mapping[str, str]) -> int:
    """Re-render charts and text summaries from an existing analysis directory."""
    report_dir = Path(cfg["output.dir"]) / "report"
    if not report_dir.is_dir():
        raise ConfigError(f"no report directory at {report_dir}; run analyze first")
    rendered = 0
    valence_tsv = report_dir / "valence_series.tsv"
    if valence_tsv.is_file():
        meta, _, rows = _read_tsv(valence_tsv)
        chart: dict[str, list[tuple[int, float]]] = {}
        for gid, decade, value in rows:
            chart.setdefault(gid, []).append((int(decade), float(value)))
        svg = _svg_line_chart(chart, "mean valence of top distinctive traits by decade", meta)
        (report_dir / "valence_series.svg").write_text(svg, encoding="utf-8")
        rendered += 1
    for tsv_path in sorted(report_dir.glob("corr_*.tsv")):
        meta, header, rows = _read_tsv(tsv_path)
        years = [int(y) for y in header[1:]]
        values = np.full((len(years), len(years)), np.nan)
        for i, row in enumerate(rows):
            for j, cell in enumerate(row[1:]):
                if cell != "NA":
                    values[i, j] = float(cell)
        matrix = CorrelationMatrix(tsv_path.stem[len("corr_") :], years, values, [])
        svg = matrix_to_svg(matrix, meta=f"config={meta}")
        tsv_path.with_suffix(".svg").write_text(svg, encoding="utf-8")
        rendered += 1
    events_tsv = report_dir / "events.tsv"
    if events_tsv.is_file():
        _, _, rows = _read_tsv(events_tsv)
        from .report import p_stars

        print(f"{'group':<16}{'event':>6}  t(df)        p        d")
        for gid, year, t, df, p, d, *_ in rows:
            print(
                f"{gid:<16}{year:>6}  t({float(df):.0f})={float(t):.3f}  "
                f"p={float(p):.4g}{p_stars(float(p))}  d={float(d):.3f}"
            )
    print(f"re-rendered {rendered} charts in {report_dir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="diachron",
        description="time-sliced embeddings and group-association analysis",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("synth", "generate a planted-bias synthetic corpus plus lexicons"),
        ("train", "slice the corpus and train one embedding space per slice"),
        ("analyze", "run all analyses and write the report directory"),
        ("report", "re-render charts/text from an existing report directory"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", help="key=value config file")
        cmd.add_argument("--workers", type=int, default=None, help="training worker count")
        cmd.add_argument(
            "--strict", action="store_true", help="force single-worker deterministic training"
        )
        cmd.add_argument("--seed", type=int, default=None, help="seed override")
        cmd.add_argument("--out", default=None, help="output root (default $DIACHRON_OUT)")
        if name in ("analyze", "report"):
            cmd.add_argument(
                "--groups", default=None, help="restrict analyses to these group ids (comma-separated)"
            )
    return parser


_COMMANDS = {
    "synth": cmd_synth,
    "train": cmd_train,
    "analyze": cmd_analyze,
    "report": cmd_report,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args, extras = parser.parse_known_args(argv)
    try:
        cfg = effective_config(args, extras)
        return _COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DiachronError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Synthetic corpus generator with planted group-attribute co-occurrence.

Real historical corpora cannot be redistributed, so tests and demos run on
generated ones.  A spec file (TSV directives, ``#`` comments allowed) declares
groups with label tokens, pleasant/unpleasant attribute pools, and plant
directives that bias a group's sentences toward one pool over a year range:

    years               1950    1959
    sentences_per_year  2000
    sentence_length     30
    background_vocab    300
    group   heroes  rivals  gender  hero_a hero_b hero_c
    group   rivals  heroes  gender  rival_a rival_b rival_c
    attr    pleasant    joy calm kind brave warm gold
    attr    unpleasant  grim foul dust cruel vile rust
    plant   heroes  pleasant    0.9 1950    1954

Alongside the corpus the generator writes matching lexicon files (groups,
traits with valence, attribute sets) so the full pipeline can run on the
output unchanged.  Output bytes are a pure function of (spec, seed).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np

from .errors import ConfigError

_POOLS = ("pleasant", "unpleasant")


@dataclass
class PlantDirective:
    group_id: str
    pool: str
    strength: float
    start_year: int
    end_year: int


@dataclass
class GroupSpec:
    id: str
    comparison_id: str
    category: str
    labels: list[str]


@dataclass
class SynthSpec:
    start_year: int = 1950
    end_year: int = 1959
    sentences_per_year: int = 2000
    sentence_length: int = 30
    background_vocab: int = 300
    group_sentence_share: float = 0.5
    attr_share: float = 0.5
    neutral_traits: int = 0
    groups: list[GroupSpec] = field(default_factory=list)
    pleasant: list[str] = field(default_factory=list)
    unpleasant: list[str] = field(default_factory=list)
    plants: list[PlantDirective] = field(default_factory=list)

    def validate(self) -> None:
        if not self.groups:
            raise ConfigError("empty spec: no groups declared")
        if not self.pleasant or not self.unpleasant:
            raise ConfigError("empty spec: both attribute pools are required")
        if self.start_year > self.end_year:
            raise ConfigError("years range is empty")
        if self.sentence_length < 2:
            raise ConfigError("sentence_length must be >= 2")
        if self.sentences_per_year < 1:
            raise ConfigError("sentences_per_year must be >= 1")
        if self.background_vocab < 1:
            raise ConfigError("background_vocab must be >= 1")
        for name, prob in (
            ("group_sentence_share", self.group_sentence_share),
            ("attr_share", self.attr_share),
        ):
            if not 0.0 <= prob <= 1.0:
                raise ConfigError(f"{name} must be a probability in [0, 1], got {prob}")
        ids = {g.id for g in self.groups}
        if len(ids) != len(self.groups):
            raise ConfigError("duplicate group ids in spec")
        for g in self.groups:
            if g.comparison_id not in ids:
                raise ConfigError(f"group {g.id!r} compares against unknown {g.comparison_id!r}")
        for plant in self.plants:
            if plant.group_id not in ids:
                raise ConfigError(f"plant references unknown group {plant.group_id!r}")
            if plant.pool not in _POOLS:
                raise ConfigError(f"plant pool must be pleasant or unpleasant, got {plant.pool!r}")
            if not 0.0 <= plant.strength <= 1.0:
                raise ConfigError(
                    f"plant strength must be a probability in [0, 1], got {plant.strength}"
                )
            if plant.start_year > plant.end_year:
                raise ConfigError(f"plant year range empty: {plant.start_year}-{plant.end_year}")


def load_synth_spec(path: Union[str, Path]) -> SynthSpec:
    spec = SynthSpec(groups=[], pleasant=[], unpleasant=[], plants=[])
    saw_any = False
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            saw_any = True
            fields = line.split("\t")
            key = fields[0].strip()
            try:
                if key == "years" and len(fields) == 3:
                    spec.start_year, spec.end_year = int(fields[1]), int(fields[2])
                elif key in (
                    "sentences_per_year",
                    "sentence_length",
                    "background_vocab",
                    "neutral_traits",
                ) and len(fields) == 2:
                    setattr(spec, key, int(fields[1]))
                elif key in ("group_sentence_share", "attr_share") and len(fields) == 2:
                    setattr(spec, key, float(fields[1]))
                elif key == "group" and len(fields) == 5:
                    labels = fields[4].split()
                    if not labels:
                        raise ConfigError(f"{path}:{lineno}: group without labels")
                    spec.groups.append(GroupSpec(fields[1], fields[2], fields[3], labels))
                elif key == "attr" and len(fields) == 3:
                    words = fields[2].split()
                    if fields[1] == "pleasant":
                        spec.pleasant.extend(words)
                    elif fields[1] == "unpleasant":
                        spec.unpleasant.extend(words)
                    else:
                        raise ConfigError(f"{path}:{lineno}: unknown attr pool {fields[1]!r}")
                elif key == "plant" and len(fields) == 6:
                    spec.plants.append(
                        PlantDirective(
                            group_id=fields[1],
                            pool=fields[2],
                            strength=float(fields[3]),
                            start_year=int(fields[4]),
                            end_year=int(fields[5]),
                        )
                    )
                else:
                    raise ConfigError(f"{path}:{lineno}: unrecognized directive {key!r}")
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: {exc}") from None
    if not saw_any:
        raise ConfigError(f"empty spec: {path} contains no directives")
    spec.validate()
    return spec


def _active_plant(spec: SynthSpec, group_id: str, year: int) -> PlantDirective | None:
    for plant in spec.plants:
        if plant.group_id == group_id and plant.start_year <= year <= plant.end_year:
            return plant
    return None


def generate_corpus(spec: SynthSpec, seed: int, out_path: Union[str, Path]) -> dict[str, int]:
    """Write a docPerLine corpus; returns sentence/token counters."""
    spec.validate()
    rng = np.random.default_rng(seed)
    bg_tokens = np.array([f"bg{i:04d}" for i in range(spec.background_vocab)])
    ranks = np.arange(1, spec.background_vocab + 1, dtype=np.float64)
    bg_probs = (1.0 / ranks) / (1.0 / ranks).sum()  # Zipf-ish backdrop
    pools = {
        "pleasant": np.array(spec.pleasant),
        "unpleasant": np.array(spec.unpleasant),
    }
    length = spec.sentence_length
    n_tokens = 0
    n_sentences = 0
    with open(out_path, "w", encoding="utf-8") as fh:
        for year in range(spec.start_year, spec.end_year + 1):
            n = spec.sentences_per_year
            n_group = int(round(n * spec.group_sentence_share))
            body = bg_tokens[
                rng.choice(spec.background_vocab, size=(n, length), p=bg_probs)
            ].astype(object)
            group_rows = rng.integers(0, len(spec.groups), size=n_group)
            label_pos = rng.integers(0, length, size=n_group)
            for row in range(n_group):
                group = spec.groups[int(group_rows[row])]
                pos = int(label_pos[row])
                body[row, pos] = group.labels[int(rng.integers(0, len(group.labels)))]
                plant = _active_plant(spec, group.id, year)
                for col in range(length):
                    if col == pos or rng.random() >= spec.attr_share:
                        continue
                    if plant is None:
                        side = _POOLS[int(rng.integers(0, 2))]
                    else:
                        side = (
                            plant.pool
                            if rng.random() < plant.strength
                            else _POOLS[1 - _POOLS.index(plant.pool)]
                        )
                    pool = pools[side]
                    body[row, col] = pool[int(rng.integers(0, len(pool)))]
            for row in range(n):
                fh.write(f"{year}\t" + " ".join(body[row]) + "\n")
            n_sentences += n
            n_tokens += n * length
    return {"sentences": n_sentences, "tokens": n_tokens}


def write_lexicons(spec: SynthSpec, out_dir: Union[str, Path]) -> dict[str, Path]:
    """Emit groups/traits/attributes files matching the generated corpus."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "groups": out / "groups.tsv",
        "traits": out / "traits.tsv",
        "attributes": out / "attributes.tsv",
    }
    with open(paths["groups"], "w", encoding="utf-8") as fh:
        for g in spec.groups:
            fh.write("\t".join([g.id, g.category, g.comparison_id, "*", " ".join(g.labels)]) + "\n")
    with open(paths["traits"], "w", encoding="utf-8") as fh:
        for word in spec.pleasant:
            fh.write(f"{word}\t2.0\t1\n")
        for word in spec.unpleasant:
            fh.write(f"{word}\t-2.0\t1\n")
        for i in range(spec.neutral_traits):
            fh.write(f"bg{i:04d}\t0.0\t1\n")
    with open(paths["attributes"], "w", encoding="utf-8") as fh:
        for word in spec.pleasant:
            fh.write(f"P\t{word}\n")
        for word in spec.unpleasant:
            fh.write(f"U\t{word}\n")
    return paths

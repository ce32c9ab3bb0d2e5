import pytest

from diachron.cli import main
from diachron.sgns import load_embeddings

SPEC = """\
years\t1950\t1959
sentences_per_year\t150
sentence_length\t20
background_vocab\t40
group_sentence_share\t0.5
attr_share\t0.5
group\theroes\trivals\tgender\thero_a hero_b hero_c
group\trivals\theroes\tgender\trival_a rival_b rival_c
attr\tpleasant\tjoy calm kind brave warm gold
attr\tunpleasant\tgrim foul dust cruel vile rust
plant\theroes\tpleasant\t0.9\t1950\t1959
"""


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    """One synth -> train -> analyze run shared by the read-only tests."""
    root = tmp_path_factory.mktemp("pipeline")
    spec = root / "spec.tsv"
    spec.write_text(SPEC, encoding="utf-8")
    out = root / "run"
    config = root / "run.cfg"
    config.write_text(
        f"""\
synth.spec={spec}
synth.seed=3
corpus.path={out}/corpus/corpus.tsv
corpus.format=docPerLine
corpus.resolutions=annual,decade
corpus.start_year=1950
corpus.end_year=2019
train.dimension=16
train.window=3
train.epochs=2
train.min_count=2
train.subsample=none
train.seed=3
lexicon.groups={out}/corpus/lexicons/groups.tsv
lexicon.traits={out}/corpus/lexicons/traits.tsv
lexicon.attributes={out}/corpus/lexicons/attributes.tsv
analysis.events=1955
analysis.min_overlap=5
analysis.min_periods=1
output.dir={out}
""",
        encoding="utf-8",
    )
    assert main(["synth", "--config", str(config)]) == 0
    assert main(["train", "--config", str(config)]) == 0
    assert main(["analyze", "--config", str(config)]) == 0
    return config, out


class TestPipeline:
    def test_outputs_exist(self, pipeline):
        _, out = pipeline
        assert (out / "corpus" / "corpus.tsv").is_file()
        embs = sorted((out / "embeddings").glob("emb_*.emb"))
        assert len(embs) == 11  # 10 annual + 1 decade
        assert (out / "slices.tsv").is_file()
        report = out / "report"
        for name in (
            "manifest.tsv",
            "profiles.tsv",
            "valence_series.tsv",
            "valence_series.svg",
            "weat_series.tsv",
            "events.tsv",
            "associations.tsv",
            "corr_heroes.tsv",
            "corr_heroes.svg",
        ):
            assert (report / name).is_file(), name

    def test_association_table_columns(self, pipeline):
        _, out = pipeline
        lines = (out / "report" / "associations.tsv").read_text().splitlines()
        assert lines[1] == "GROUP\tCOMPARISON\tTRAIT\tSLICE\tMAC_G\tMAC_C\tDIFF"
        row = lines[2].split("\t")
        assert row[0] in ("heroes", "rivals")
        if row[4] != "NA" and row[5] != "NA":
            assert float(row[6]) == pytest.approx(float(row[4]) - float(row[5]))

    def test_planted_traits_rank_first_for_planted_group(self, pipeline):
        _, out = pipeline
        pleasant = {"joy", "calm", "kind", "brave", "warm", "gold"}
        for line in (out / "report" / "profiles.tsv").read_text().splitlines():
            if line.startswith("heroes\t"):
                traits_field = line.split("\t")[6]
                top_words = [t.split(":")[0] for t in traits_field.split()]
                assert len(top_words) >= 3
                assert set(top_words[:3]) <= pleasant
                return
        raise AssertionError("heroes row missing from profiles.tsv")

    def test_slice_manifest_format(self, pipeline):
        _, out = pipeline
        lines = (out / "slices.tsv").read_text().splitlines()
        assert len(lines) == 11
        fields = lines[0].split("\t")
        assert fields[0] in ("annual", "decade")
        assert int(fields[3]) > 0 and int(fields[4]) > 0

    def test_event_report_has_the_requested_event(self, pipeline):
        _, out = pipeline
        lines = (out / "report" / "events.tsv").read_text().splitlines()
        rows = [l.split("\t") for l in lines[2:]]
        assert {r[1] for r in rows} == {"1955"}
        assert {r[0] for r in rows} == {"heroes", "rivals"}

    def test_weat_series_covers_all_years(self, pipeline):
        _, out = pipeline
        lines = (out / "report" / "weat_series.tsv").read_text().splitlines()[2:]
        heroes_years = [int(l.split("\t")[1]) for l in lines if l.startswith("heroes\t")]
        assert heroes_years == list(range(1950, 1960))

    def test_report_rerenders_svg(self, pipeline):
        config, out = pipeline
        svg = out / "report" / "corr_heroes.svg"
        before = svg.read_bytes()
        svg.unlink()
        assert main(["report", "--config", str(config)]) == 0
        assert svg.read_bytes() == before

    def test_group_filter_restricts_reports(self, pipeline, tmp_path):
        config, out = pipeline
        filtered = tmp_path / "filtered"
        assert (
            main(
                [
                    "analyze",
                    "--config",
                    str(config),
                    f"--output.dir={filtered}",
                    "--analysis.groups=heroes",
                ]
            )
            == 2  # no embeddings at the new output root
        )
        # reuse the trained embeddings, redirect only the report via same out
        assert main(["analyze", "--config", str(config), "--groups", "heroes"]) == 0
        profile_lines = (out / "report" / "profiles.tsv").read_text().splitlines()[2:]
        assert [l.split("\t")[0] for l in profile_lines] == ["heroes"]
        assert not (out / "report" / "corr_rivals.tsv").exists()
        # restore the full report for any later test
        assert main(["analyze", "--config", str(config)]) == 0


class TestDeterminism:
    def test_strict_rerun_reproduces_bytes(self, tmp_path):
        spec = tmp_path / "spec.tsv"
        spec.write_text(SPEC.replace("150", "60"), encoding="utf-8")
        outs = []
        for name in ("r1", "r2"):
            out = tmp_path / name
            config = tmp_path / f"{name}.cfg"
            config.write_text(
                f"""\
synth.spec={spec}
corpus.path={out}/corpus/corpus.tsv
corpus.resolutions=annual
train.dimension=8
train.epochs=2
train.min_count=2
lexicon.groups={out}/corpus/lexicons/groups.tsv
lexicon.traits={out}/corpus/lexicons/traits.tsv
lexicon.attributes={out}/corpus/lexicons/attributes.tsv
analysis.events=1955
analysis.min_overlap=5
output.dir={out}
""",
                encoding="utf-8",
            )
            for cmd in ("synth", "train", "analyze"):
                assert main([cmd, "--config", str(config), "--seed", "11", "--strict"]) == 0
            outs.append(out)
        a, b = outs
        emb_a = sorted((a / "embeddings").glob("*.emb"))
        emb_b = sorted((b / "embeddings").glob("*.emb"))
        assert [p.name for p in emb_a] == [p.name for p in emb_b]
        for pa, pb in zip(emb_a, emb_b):
            assert pa.read_bytes() == pb.read_bytes()
        for name in ("profiles.tsv", "valence_series.tsv", "weat_series.tsv", "events.tsv"):
            fa = (a / "report" / name).read_bytes()
            fb = (b / "report" / name).read_bytes()
            # config hash differs between the two roots only via paths; strip comment
            assert fa.split(b"\n", 1)[1] == fb.split(b"\n", 1)[1], name


class TestErrors:
    def test_bad_corpus_path_names_path(self, tmp_path, capsys):
        out = tmp_path / "o"
        code = main(["train", f"--corpus.path={tmp_path}/nope.tsv", "--out", str(out)])
        assert code == 2
        assert "nope.tsv" in capsys.readouterr().err

    def test_analyze_without_train(self, tmp_path, capsys):
        code = main(["analyze", "--out", str(tmp_path / "fresh")])
        assert code == 2
        assert "no embeddings found" in capsys.readouterr().err

    def test_unknown_config_key_rejected(self, tmp_path, capsys):
        code = main(["train", "--train.mystery=1", "--out", str(tmp_path)])
        assert code == 2
        assert "unknown config key" in capsys.readouterr().err

    def test_malformed_override_rejected(self, tmp_path, capsys):
        code = main(["train", "--notakey", "--out", str(tmp_path)])
        assert code == 2

    def test_missing_config_file(self, tmp_path, capsys):
        code = main(["train", "--config", str(tmp_path / "missing.cfg")])
        assert code == 2

    def test_corrupt_embedding_is_internal_error(self, pipeline, tmp_path, capsys):
        config, out = pipeline
        target = tmp_path / "broken"
        (target / "embeddings").mkdir(parents=True)
        src = next((out / "embeddings").glob("*.emb"))
        data = bytearray(src.read_bytes())
        data[len(data) // 2] ^= 0xFF
        (target / "embeddings" / src.name).write_bytes(bytes(data))
        code = main(["analyze", "--config", str(config), f"--output.dir={target}"])
        assert code == 1
        assert "corrupt embedding file" in capsys.readouterr().err

    def test_synth_requires_spec(self, tmp_path, capsys):
        assert main(["synth", "--out", str(tmp_path)]) == 2


class TestOtherPipelines:
    def test_ngram_corpus_trains(self, tmp_path):
        corpus = tmp_path / "ngrams.tsv"
        rows = []
        for year in (1950, 1951):
            for i in range(30):
                rows.append(f"alpha beta gamma delta eps\t{year}\t{2 + i % 3}")
                rows.append(f"beta gamma zeta\t{year}\t1")
        corpus.write_text("\n".join(rows) + "\n", encoding="utf-8")
        out = tmp_path / "o"
        code = main(
            [
                "train",
                f"--corpus.path={corpus}",
                "--corpus.format=ngramTsv",
                "--corpus.resolutions=annual",
                "--train.dimension=8",
                "--train.epochs=1",
                "--train.min_count=5",
                "--train.subsample=none",
                "--out",
                str(out),
            ]
        )
        assert code == 0
        embs = sorted((out / "embeddings").glob("*.emb"))
        assert len(embs) == 2
        space = load_embeddings(embs[0])
        assert "alpha" in space.vocab

    def test_decade_only_analyze_skips_annual_analyses(self, tmp_path):
        spec = tmp_path / "spec.tsv"
        spec.write_text(SPEC.replace("150", "60"), encoding="utf-8")
        out = tmp_path / "o"
        base = [
            f"--corpus.path={out}/corpus/corpus.tsv",
            "--corpus.resolutions=decade",
            "--train.dimension=8",
            "--train.epochs=1",
            "--train.min_count=2",
            "--out",
            str(out),
        ]
        assert main(["synth", f"--synth.spec={spec}", "--out", str(out)]) == 0
        assert main(["train", *base]) == 0
        assert (
            main(
                [
                    "analyze",
                    *base,
                    f"--lexicon.groups={out}/corpus/lexicons/groups.tsv",
                    f"--lexicon.traits={out}/corpus/lexicons/traits.tsv",
                    f"--lexicon.attributes={out}/corpus/lexicons/attributes.tsv",
                    "--analysis.min_periods=1",
                ]
            )
            == 0
        )
        report = out / "report"
        assert (report / "profiles.tsv").is_file()
        weat_lines = (report / "weat_series.tsv").read_text().splitlines()
        assert len(weat_lines) == 2  # meta comment + header, no annual points
        assert not list(report.glob("corr_*.tsv"))


class TestConfigPlumbing:
    def test_flag_override_wins(self, tmp_path):
        spec = tmp_path / "spec.tsv"
        spec.write_text(SPEC.replace("150", "60"), encoding="utf-8")
        out = tmp_path / "o"
        assert main(["synth", f"--synth.spec={spec}", "--out", str(out)]) == 0
        assert (
            main(
                [
                    "train",
                    f"--corpus.path={out}/corpus/corpus.tsv",
                    "--corpus.resolutions=annual",
                    "--train.dimension=8",
                    "--train.epochs=1",
                    "--train.min_count=2",
                    "--out",
                    str(out),
                ]
            )
            == 0
        )
        space = load_embeddings(next((out / "embeddings").glob("*.emb")))
        assert space.dimension == 8

    def test_env_var_output_root(self, tmp_path, monkeypatch):
        spec = tmp_path / "spec.tsv"
        spec.write_text(SPEC.replace("150", "40"), encoding="utf-8")
        monkeypatch.chdir(tmp_path)
        monkeypatch.setenv("DIACHRON_OUT", str(tmp_path / "envroot"))
        assert main(["synth", f"--synth.spec={spec}"]) == 0
        assert (tmp_path / "envroot" / "corpus" / "corpus.tsv").is_file()

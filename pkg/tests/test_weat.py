import math
from types import SimpleNamespace

import numpy as np
import pytest
import scipy.stats
from hypothesis import given, settings
from hypothesis import strategies as st

from diachron.corpus import TimeSlice
from diachron.errors import DegenerateVarianceError
from diachron.weat import (
    DEFAULT_EVENTS,
    WeatPoint,
    WeatSeries,
    cohens_d,
    event_impact,
    regularized_incomplete_beta,
    student_t_sf,
    weat_score,
    weat_series,
    welch_t_test,
)

from conftest import make_group, space_from_vectors
from oracles import cohens_d_ref, weat_ref, welch_ref


def attrs(pleasant, unpleasant):
    # bypasses loader validation on purpose: some rigs need identical sets
    return SimpleNamespace(pleasant=list(pleasant), unpleasant=list(unpleasant))


class TestWeatScore:
    def test_identical_attribute_sets_score_zero(self):
        space = space_from_vectors({"l": [1.0, 0.2], "a": [0.3, 0.7], "b": [0.1, 0.9]})
        assert weat_score(space, ["l"], attrs(["a", "b"], ["a", "b"])) == 0.0

    def test_hand_built_difference(self):
        space = space_from_vectors(
            {
                "l": [1.0, 0.0, 0.0],
                "p": [0.5, math.sqrt(0.75), 0.0],
                "u": [0.3, 0.0, math.sqrt(0.91)],
            }
        )
        got = weat_score(space, ["l"], attrs(["p"], ["u"]))
        assert got == pytest.approx(0.2, abs=1e-6)

    def test_all_pleasant_oov_gives_none(self):
        space = space_from_vectors({"l": [1.0, 0.0], "u": [0.5, 0.5]})
        assert weat_score(space, ["l"], attrs(["ghost"], ["u"])) is None

    def test_oov_attribute_words_skipped(self):
        space = space_from_vectors(
            {"l": [1.0, 0.0], "p": [1.0, 0.1], "u": [0.0, 1.0]}
        )
        with_ghost = weat_score(space, ["l"], attrs(["p", "ghost"], ["u"]))
        without = weat_score(space, ["l"], attrs(["p"], ["u"]))
        assert with_ghost == without

    def test_matches_bruteforce_reference(self, rng):
        vectors = {f"t{i}": rng.normal(size=5) for i in range(15)}
        space = space_from_vectors(vectors)
        f32 = {tok: space.input_vectors[space.vocab.index(tok)] for tok in vectors}
        labels = ["t0", "t1", "t2"]
        pleasant = ["t3", "t4", "t5"]
        unpleasant = ["t6", "t7"]
        got = weat_score(space, labels, attrs(pleasant, unpleasant))
        want = weat_ref(f32, labels, pleasant, unpleasant)
        assert got == pytest.approx(want, abs=1e-12)

    def test_swap_antisymmetry_exact(self, rng):
        vectors = {f"t{i}": rng.normal(size=4) for i in range(10)}
        space = space_from_vectors(vectors)
        forward = weat_score(space, ["t0", "t1"], attrs(["t2", "t3"], ["t4", "t5"]))
        backward = weat_score(space, ["t0", "t1"], attrs(["t4", "t5"], ["t2", "t3"]))
        assert forward == -backward


class TestWeatSeries:
    def _spaces(self, years, vectors):
        return {
            TimeSlice.annual(y): space_from_vectors(vectors, TimeSlice.annual(y))
            for y in years
        }

    def test_identical_years_identical_scores(self):
        vectors = {"l": [1.0, 0.1], "p": [0.9, 0.2], "u": [0.0, 1.0]}
        spaces = self._spaces([1950, 1951, 1952], vectors)
        group = make_group("g", "c", ["l"])
        series, missing = weat_series(spaces, group, attrs(["p"], ["u"]))
        assert missing == []
        scores = [pt.score for pt in series.points]
        assert len(set(scores)) == 1 and len(scores) == 3
        assert series.years() == [1950, 1951, 1952]

    def test_year_with_oov_labels_reported_missing(self):
        good = {"l": [1.0, 0.1], "p": [0.9, 0.2], "u": [0.0, 1.0]}
        bad = {"p": [0.9, 0.2], "u": [0.0, 1.0]}
        spaces = {
            TimeSlice.annual(1950): space_from_vectors(good, TimeSlice.annual(1950)),
            TimeSlice.annual(1951): space_from_vectors(bad, TimeSlice.annual(1951)),
        }
        group = make_group("g", "c", ["l"])
        series, missing = weat_series(spaces, group, attrs(["p"], ["u"]))
        assert missing == [1951]
        assert series.years() == [1950]

    def test_score_is_mean_of_label_components(self, rng):
        vectors = {f"t{i}": rng.normal(size=4) for i in range(12)}
        spaces = self._spaces([1960], vectors)
        group = make_group("g", "c", ["t0", "t1", "t2"])
        series, _ = weat_series(spaces, group, attrs(["t3", "t4"], ["t5", "t6"]))
        point = series.points[0]
        assert point.score == pytest.approx(
            np.mean([s for _, s in point.label_scores]), abs=1e-12
        )


class TestStudentT:
    def test_sf_matches_scipy_to_1e10(self):
        for df in (1.0, 2.5, 8.0, 49.0, 67.0, 142.0, 500.0):
            for t in (-8.0, -2.768, -1.0, -0.1, 0.0, 0.5, 2.352, 4.369, 7.5):
                mine = student_t_sf(t, df)
                ref = scipy.stats.t.sf(t, df)
                assert mine == pytest.approx(ref, abs=1e-10)

    def test_incomplete_beta_edges(self):
        assert regularized_incomplete_beta(2.0, 3.0, 0.0) == 0.0
        assert regularized_incomplete_beta(2.0, 3.0, 1.0) == 1.0
        with pytest.raises(ValueError):
            regularized_incomplete_beta(2.0, 3.0, 1.5)

    def test_incomplete_beta_matches_scipy(self, rng):
        for _ in range(200):
            a = float(rng.uniform(0.25, 80.0))
            b = float(rng.uniform(0.25, 80.0))
            x = float(rng.uniform(0.0, 1.0))
            assert regularized_incomplete_beta(a, b, x) == pytest.approx(
                scipy.stats.beta.cdf(x, a, b), abs=1e-10
            )

    def test_p_monotone_in_t_magnitude(self):
        df = 20.0
        ps = [2 * student_t_sf(t, df) for t in (0.1, 0.5, 1.0, 2.0, 4.0, 8.0)]
        assert all(a > b for a, b in zip(ps, ps[1:]))

    def test_infinite_t(self):
        assert student_t_sf(math.inf, 5.0) == 0.0
        assert student_t_sf(-math.inf, 5.0) == 1.0


class TestWelch:
    def test_textbook_example_against_scipy(self):
        pre = [1.0, 2.0, 3.0, 4.0, 5.0]
        post = [3.0, 4.0, 5.0, 6.0, 7.0]
        t, df, p = welch_t_test(pre, post)
        ref = scipy.stats.ttest_ind(post, pre, equal_var=False)
        assert t == pytest.approx(ref.statistic, abs=1e-6)
        assert df == pytest.approx(ref.df, abs=1e-6)
        assert p == pytest.approx(ref.pvalue, abs=1e-6)
        t_ref, df_ref = welch_ref(pre, post)
        assert t == pytest.approx(t_ref, abs=1e-12)
        assert df == pytest.approx(df_ref, abs=1e-12)

    @given(st.integers(0, 100_000))
    @settings(max_examples=60, deadline=None)
    def test_random_samples_match_scipy(self, seed):
        rng = np.random.default_rng(seed)
        a = rng.normal(rng.uniform(-2, 2), rng.uniform(0.5, 3), size=rng.integers(2, 40))
        b = rng.normal(rng.uniform(-2, 2), rng.uniform(0.5, 3), size=rng.integers(2, 40))
        t, df, p = welch_t_test(a, b)
        ref = scipy.stats.ttest_ind(b, a, equal_var=False)
        assert t == pytest.approx(ref.statistic, rel=1e-9, abs=1e-9)
        assert df == pytest.approx(ref.df, rel=1e-9)
        assert p == pytest.approx(ref.pvalue, abs=1e-6)

    def test_shift_invariance(self):
        a = [0.3, 0.9, 1.4, 2.2]
        b = [1.1, 1.9, 2.4, 3.0]
        t1, df1, _ = welch_t_test(a, b)
        t2, df2, _ = welch_t_test([x + 57.0 for x in a], [x + 57.0 for x in b])
        assert t1 == pytest.approx(t2, abs=1e-9)
        assert df1 == pytest.approx(df2, abs=1e-9)

    def test_insufficient_samples(self):
        with pytest.raises(ValueError, match="insufficient samples"):
            welch_t_test([1.0], [1.0, 2.0])

    def test_zero_variance_equal_means(self):
        t, df, p = welch_t_test([2.0, 2.0], [2.0, 2.0])
        assert (t, p) == (0.0, 1.0)

    def test_zero_variance_unequal_means(self):
        with pytest.raises(DegenerateVarianceError):
            welch_t_test([0.0, 0.0], [1.0, 1.0])


class TestCohensD:
    def test_all_zero_samples(self):
        assert cohens_d([0.0, 0.0], [0.0, 0.0]) == 0.0

    def test_unit_pooled_sd_gives_mean_difference(self):
        h = 1.0 / math.sqrt(2.0)
        assert cohens_d([-h, h], [1 - h, 1 + h]) == pytest.approx(1.0, abs=1e-12)

    def test_scale_invariance(self, rng):
        a = rng.normal(size=12)
        b = rng.normal(1.0, 1.0, size=9)
        assert cohens_d(a * 3.0, b * 3.0) == pytest.approx(cohens_d(a, b), abs=1e-9)

    def test_matches_reference(self, rng):
        a = list(rng.normal(size=15))
        b = list(rng.normal(0.8, 2.0, size=11))
        assert cohens_d(a, b) == pytest.approx(cohens_d_ref(a, b), abs=1e-12)

    def test_degenerate_variance(self):
        with pytest.raises(DegenerateVarianceError, match="degenerate variance"):
            cohens_d([1.0, 1.0], [2.0, 2.0])


def series_from_year_scores(year_scores):
    """year -> list of (label, score)."""
    points = [WeatPoint(year, float(np.mean([s for _, s in ls])), ls) for year, ls in sorted(year_scores.items())]
    return WeatSeries("g", points)


class TestEventImpact:
    def test_identical_windows_give_zero(self):
        scores = {
            1965: [("l1", 0.1), ("l2", 0.2), ("l3", 0.3)],
            1966: [("l1", 0.1), ("l2", 0.2), ("l3", 0.3)],
        }
        impact = event_impact(series_from_year_scores(scores), 1966, window_years=5)
        assert impact.t_statistic == 0.0
        assert impact.cohens_d == 0.0

    def test_clean_separation(self):
        jitter = [0.0, 1e-6, -1e-6, 5e-7]
        pre = {1962 + i: [("l", 0.0 + j)] for i, j in enumerate(jitter)}
        post = {1966 + i: [("l", 1.0 + j)] for i, j in enumerate(jitter)}
        impact = event_impact(series_from_year_scores({**pre, **post}), 1966)
        assert impact.t_statistic > 0
        assert impact.p_value < 1e-6
        assert impact.cohens_d > 100

    def test_sign_follows_post_minus_pre(self):
        scores = {y: [("l", 1.0 + 0.01 * (y % 3))] for y in range(1961, 1966)}
        scores.update({y: [("l", 0.01 * (y % 3))] for y in range(1966, 1971)})
        impact = event_impact(series_from_year_scores(scores), 1966)
        assert impact.t_statistic < 0
        assert np.mean(impact.post_samples) < np.mean(impact.pre_samples)

    def test_window_partition(self):
        # year-coded scores verify window membership: pre gets -year, post +year
        scores = {y: [("l", float(-y))] for y in range(1950, 1966)}
        scores.update({y: [("l", float(y))] for y in range(1966, 1990)})
        impact = event_impact(series_from_year_scores(scores), 1966, window_years=5)
        assert sorted(-int(s) for s in impact.pre_samples) == list(range(1961, 1966))
        assert sorted(int(s) for s in impact.post_samples) == list(range(1966, 1971))
        assert len(impact.pre_samples) + len(impact.post_samples) == 10

    def test_per_label_samples_are_the_unit(self):
        scores = {
            y: [("l1", 0.1 * y % 1), ("l2", 0.2), ("l3", 0.3)] for y in range(1961, 1971)
        }
        impact = event_impact(series_from_year_scores(scores), 1966)
        assert len(impact.pre_samples) == 15  # 3 labels x 5 years
        assert len(impact.post_samples) == 15

    def test_insufficient_samples_error(self):
        scores = {1965: [("l", 0.1)], 1966: [("l", 0.2)], 1967: [("l", 0.3)]}
        with pytest.raises(ValueError, match="insufficient samples"):
            event_impact(series_from_year_scores(scores), 1966)

    def test_impact_statistics_match_direct_computation(self):
        scores = {y: [("l1", 0.1 * (y - 1960)), ("l2", 0.05 * (y - 1958))] for y in range(1961, 1971)}
        series = series_from_year_scores(scores)
        impact = event_impact(series, 1966)
        t, df, p = welch_t_test(impact.pre_samples, impact.post_samples)
        assert impact.t_statistic == t
        assert impact.degrees_of_freedom == df
        assert impact.p_value == p
        assert impact.cohens_d == cohens_d(impact.pre_samples, impact.post_samples)


def test_default_event_registry():
    assert set(DEFAULT_EVENTS) == {1966, 1978}

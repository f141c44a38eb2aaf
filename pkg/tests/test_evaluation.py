"""Cross-validation folds, accuracy protocols, precision@k, Pearson."""

import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from triagekit.classify import TrainConfig
from triagekit.errors import ConstantSeries, HoldoutTooSmall, LengthMismatch, TooFewExamples
from triagekit.evaluation import (
    OTHER_LABEL,
    accuracy_against_log,
    correlation_study,
    cross_validate,
    judgment_counts,
    load_judgment_lines,
    pearson,
    pool_rare_labels,
    precision_at_k,
    stratified_folds,
)
from triagekit.model import Corpus, canonical_json, default_schema
from tests.conftest import make_ticket, separable_corpus


class TestStratifiedFolds:
    def test_disjoint_exhaustive_balanced(self):
        labels = ["a"] * 37 + ["b"] * 41 + ["c"] * 22
        assignment = stratified_folds(labels, folds=10, seed=1)
        assert len(assignment) == 100
        sizes = [int((assignment == f).sum()) for f in range(10)]
        assert sum(sizes) == 100
        assert max(sizes) - min(sizes) <= 1

    def test_label_with_enough_instances_in_every_fold(self):
        labels = ["a"] * 30 + ["b"] * 70
        assignment = stratified_folds(labels, folds=10, seed=3)
        for fold in range(10):
            fold_labels = {labels[i] for i in range(100) if assignment[i] == fold}
            assert fold_labels == {"a", "b"}

    def test_even_split_balances_exactly(self):
        labels = ["a"] * 50 + ["b"] * 50
        assignment = stratified_folds(labels, folds=10, seed=0)
        sizes = [int((assignment == f).sum()) for f in range(10)]
        assert sizes == [10] * 10

    def test_deterministic(self):
        labels = ["a", "b", "c"] * 20
        first = stratified_folds(labels, folds=5, seed=9)
        second = stratified_folds(labels, folds=5, seed=9)
        assert np.array_equal(first, second)

    def test_pool_rare_labels(self):
        labels = ["a"] * 15 + ["rare"] * 3 + ["b"] * 12
        pooled = pool_rare_labels(labels, folds=10)
        assert pooled.count(OTHER_LABEL) == 3
        assert set(pooled) == {"a", "b", OTHER_LABEL}


@pytest.fixture(scope="module")
def corpus():
    return separable_corpus(n_per_class=20, seed=13)


class TestCrossValidate:
    def test_separable_macro_f1(self, corpus):
        report = cross_validate(corpus, "business_process", folds=10, seed=5)
        assert report.macro_f1 >= 0.95
        assert report.label_count == 3
        assert report.corpus_size == 60

    def test_fold_sizes(self, corpus):
        report = cross_validate(corpus, "business_process", folds=10, seed=5)
        sizes = [f.test_size for f in report.folds]
        assert sum(sizes) == 60
        assert max(sizes) - min(sizes) <= 1

    def test_deterministic(self, corpus):
        a = cross_validate(corpus, "business_process", folds=10, seed=5)
        b = cross_validate(corpus, "business_process", folds=10, seed=5)
        assert canonical_json(a.to_dict()) == canonical_json(b.to_dict())

    def test_macro_f1_in_unit_interval(self, corpus):
        report = cross_validate(corpus, "business_process", folds=5, seed=2)
        assert 0.0 <= report.macro_f1 <= 1.0

    def test_too_few_examples(self):
        tickets = [make_ticket(i, f"w{i} text", business_process="a" if i % 2 else "b")
                   for i in range(6)]
        corpus = Corpus.build(default_schema(), tickets)
        with pytest.raises(TooFewExamples):
            cross_validate(corpus, "business_process", folds=10, seed=0)

    def test_report_table_renders(self, corpus):
        report = cross_validate(corpus, "business_process", folds=5, seed=2)
        assert "fold" in report.to_table()


class TestAccuracyAgainstLog:
    def test_separable_holdout_accuracy(self):
        corpus = separable_corpus(n_per_class=30, seed=17)
        holdout = [t.id for t in corpus.tickets[::3]][:30]
        report = accuracy_against_log(corpus, "business_process", holdout, TrainConfig(seed=0))
        assert report.accuracy >= 0.95
        assert report.holdout_size == 30
        assert report.top_k_accuracy[1] == report.accuracy
        assert report.top_k_accuracy[3] >= report.top_k_accuracy[1]

    def test_holdout_too_small(self):
        corpus = separable_corpus(n_per_class=20, seed=17)
        with pytest.raises(HoldoutTooSmall):
            accuracy_against_log(corpus, "business_process", [t.id for t in corpus.tickets[:10]])


class TestPrecisionAtK:
    def test_all_relevant(self):
        report = precision_at_k([(5, 5), (5, 5)], k=5)
        assert report.precision_relevant == 1.0
        assert report.precision_relevant_or_related == 1.0

    def test_none_relevant(self):
        report = precision_at_k([(0, 0)], k=5)
        assert report.precision_relevant == 0.0

    def test_hand_computed_two_queries(self):
        # (3/5 + 4/5) / 2 = 0.70 exactly
        report = precision_at_k([(3, 3), (4, 4)], k=5)
        assert report.precision_relevant == pytest.approx(0.70)

    def test_relevant_bounded_by_relevant_or_related(self):
        with pytest.raises(ValueError):
            precision_at_k([(4, 3)], k=5)
        with pytest.raises(ValueError):
            precision_at_k([(2, 6)], k=5)

    def test_permutation_invariant(self):
        a = precision_at_k([(3, 4), (1, 2), (5, 5)], k=5)
        b = precision_at_k([(5, 5), (3, 4), (1, 2)], k=5)
        assert a.precision_relevant == b.precision_relevant
        assert a.precision_relevant_or_related == b.precision_relevant_or_related

    def test_judgment_lines_round_trip(self):
        lines = [
            "q1,t1,relevant",
            "q1,t2,related",
            "q1,t3,irrelevant",
            "q2,t4,relevant",
            "q2,t5,relevant",
        ]
        per_query = load_judgment_lines(lines)
        counts = judgment_counts(per_query, k=3)
        assert counts == [(1, 2), (2, 2)]

    def test_bad_judgment_line(self):
        with pytest.raises(ValueError):
            load_judgment_lines(["q1,t1,maybe"])


class TestPearson:
    def test_perfect_positive(self):
        x = [1.0, 2.0, 3.0, 4.0]
        y = [2 * v + 1 for v in x]
        assert pearson(x, y) == pytest.approx(1.0, abs=1e-12)

    def test_perfect_negative(self):
        x = [1.0, 2.0, 3.0]
        y = [-v for v in x]
        assert pearson(x, y) == pytest.approx(-1.0, abs=1e-12)

    def test_three_point_closed_form(self):
        # n*Sxy - Sx*Sy = 3*16 - 6*7 = 6; denominators 6 and 14,
        # so r = 6 / sqrt(6 * 14) = 6 / sqrt(84)
        expected = 6.0 / math.sqrt(84.0)
        assert pearson([1.0, 2.0, 3.0], [2.0, 1.0, 4.0]) == pytest.approx(expected, abs=1e-9)

    def test_constant_series(self):
        with pytest.raises(ConstantSeries):
            pearson([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])
        with pytest.raises(ConstantSeries):
            pearson([1.0, 2.0], [5.0, 5.0])

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            pearson([1.0, 2.0], [1.0])

    def test_symmetry(self):
        x = [1.0, 4.0, 2.0, 8.0]
        y = [3.0, 1.0, 5.0, 2.0]
        assert pearson(x, y) == pytest.approx(pearson(y, x), abs=1e-12)

    @given(
        st.lists(st.floats(min_value=-100, max_value=100), min_size=3, max_size=20),
        st.floats(min_value=0.1, max_value=10),
        st.floats(min_value=-50, max_value=50),
    )
    def test_affine_invariance_positive_slope(self, xs, slope, intercept):
        # a spread floor keeps the check away from catastrophic cancellation
        assume(max(xs) - min(xs) > 1e-3)
        ys = [2.0 * v - 3.0 for v in xs]
        base = pearson(xs, ys)
        shifted = pearson([slope * v + intercept for v in xs], ys)
        assert shifted == pytest.approx(base, abs=1e-9)


class TestCorrelationStudy:
    def test_constant_accuracy_surfaces_error_with_table(self):
        corpus = separable_corpus(n_per_class=30, seed=23)
        holdout = [t.id for t in corpus.tickets[::3]][:30]
        study = correlation_study(corpus, "business_process", holdout, TrainConfig(seed=0))
        # perfectly separable: every label's accuracy is 1.0 -> constant
        assert study.r is None
        assert study.error == "ConstantSeries"
        assert len(study.pairs) == 3
        for _, count, accuracy in study.pairs:
            assert count > 0
            assert accuracy == 1.0

    def test_holdout_too_small(self):
        corpus = separable_corpus(n_per_class=20, seed=23)
        with pytest.raises(HoldoutTooSmall):
            correlation_study(corpus, "business_process", ["S0001"])

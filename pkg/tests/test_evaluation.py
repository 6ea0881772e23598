import json

import numpy as np
import pytest

from g2pstack.errors import ArgumentError, ScoringError
from g2pstack.evaluation import (
    FoldScore,
    aggregate,
    error_reduction,
    per_phoneme_errors,
    score_predictions,
)

from tests.helpers import aligned


class TestErrorReduction:
    @pytest.mark.parametrize("baseline, improved, expected", [
        (0.93, 0.9516, 0.309),
        (0.8637, 0.9155, 0.380),
    ])
    def test_published_style_pairs(self, baseline, improved, expected):
        assert error_reduction(baseline, improved) == pytest.approx(expected, abs=0.005)

    def test_no_change_and_worse(self):
        assert error_reduction(0.8, 0.8) == 0.0
        assert error_reduction(0.8, 0.7) < 0.0

    def test_perfect_baseline_is_undefined(self):
        with pytest.raises(ArgumentError):
            error_reduction(1.0, 1.0)

    def test_out_of_range(self):
        with pytest.raises(ArgumentError):
            error_reduction(1.2, 0.5)


class TestScoring:
    def test_any_alternative_counts_as_right(self):
        gold = {
            "tak": [("t", "A", "k"), ("t", "a:", "k")],
            "eet": [("e:", "-", "t")],
        }
        predicted = {"tak": ("t", "a:", "k"), "eet": ("e:", "-", "d")}
        score = score_predictions(gold, predicted)
        assert score.word_accuracy == 0.5
        assert score.phoneme_accuracy == pytest.approx(5 / 6)
        assert (score.phoneme_count, score.word_count) == (6, 2)

    def test_aligned_entries_as_gold(self):
        gold = {"eet": [aligned("eet", "e: - t")]}
        assert score_predictions(gold, {"eet": ("e:", "-", "t")}).word_accuracy == 1.0

    def test_length_mismatch_names_the_word(self):
        with pytest.raises(ScoringError, match="eet"):
            score_predictions({"eet": [("e:", "-", "t")]}, {"eet": ("e:", "t")})

    def test_word_without_gold_alternatives(self):
        with pytest.raises(ScoringError, match="eet"):
            score_predictions({"eet": []}, {"eet": ("e:", "-", "t")})

    def test_missing_word(self):
        with pytest.raises(ScoringError):
            score_predictions({"a": [("a",)], "b": [("b",)]}, {"a": ("a",)})


class TestAggregate:
    def test_means_are_count_weighted(self):
        result = aggregate([
            FoldScore(0, 1.0, 1.0, 30, 10),
            FoldScore(1, 0.5, 0.0, 10, 5),
        ])
        assert result.mean_phoneme == pytest.approx((30 + 5) / 40)
        assert result.mean_word == pytest.approx(10 / 15)
        assert result.stddev_phoneme == pytest.approx(np.std([1.0, 0.5], ddof=1))

    def test_single_fold_has_zero_spread(self):
        result = aggregate([FoldScore(0, 0.9, 0.6, 10, 5)])
        assert result.stddev_phoneme == result.stddev_word == 0.0

    def test_folds_come_out_in_order(self):
        result = aggregate([FoldScore(1, 0.5, 0.5, 4, 2), FoldScore(0, 1.0, 1.0, 4, 2)])
        assert [f.fold for f in result.per_fold] == [0, 1]

    def test_empty(self):
        with pytest.raises(ArgumentError):
            aggregate([])

    def test_tsv_layout(self):
        result = aggregate([FoldScore(0, 1.0, 1.0, 4, 2), FoldScore(1, 0.5, 0.5, 4, 2)])
        lines = result.to_tsv().splitlines()
        assert lines[0] == "fold\tphoneme_acc\tword_acc\tphonemes\twords"
        assert lines[1] == "0\t1.000000\t1.000000\t4\t2"
        assert lines[3].startswith("mean\t0.750000\t0.750000\t8\t4")
        assert lines[4].startswith("stddev\t")

    def test_json_report(self):
        result = aggregate([FoldScore(0, 1.0, 1.0, 4, 2), FoldScore(1, 0.5, 0.5, 4, 2)])
        payload = json.loads(result.to_json())
        assert payload["mean_word"] == 0.75
        assert payload["folds"][1]["word_count"] == 2


class TestPerPhonemeErrors:
    def test_worst_phoneme_first(self):
        gold = {"tak": [("t", "A", "k")], "kat": [("k", "A", "t")]}
        predicted = {"tak": ("t", "a:", "k"), "kat": ("k", "a:", "d")}
        frame = per_phoneme_errors(gold, predicted)
        assert list(frame["phoneme"][:2]) == ["A", "t"]
        assert list(frame["errors"][:2]) == [2, 1]
        assert frame.loc[frame["phoneme"] == "k", "error_rate"].item() == 0.0

"""Phoneme- and word-level scoring, fold aggregation and error reduction."""

import json
import math
from collections import Counter
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import pandas as pd

from .errors import ArgumentError, ScoringError
from .log import get_logger

logger = get_logger(__name__)

FLOAT_FORMAT = "%.6f"


class Score(NamedTuple):
    phoneme_accuracy: float
    word_accuracy: float
    phoneme_count: int
    word_count: int


class FoldScore(NamedTuple):
    fold: int
    phoneme_accuracy: float
    word_accuracy: float
    phoneme_count: int
    word_count: int


def _alternatives(value):
    if isinstance(value, tuple) and value and isinstance(value[0], str):
        return (value,)
    return tuple(tuple(getattr(alt, "phonemes", alt)) for alt in value)


def _best_alternative(word, predicted, alternatives):
    if not alternatives:
        raise ScoringError(word, "no gold transcription to score against")
    best = None
    for alternative in alternatives:
        if len(alternative) != len(predicted):
            raise ScoringError(word, f"predicted {len(predicted)} phonemes, gold has {len(alternative)}")
        matches = sum(p == g for p, g in zip(predicted, alternative))
        if best is None or matches > best[0]:
            best = (matches, alternative)
    return best


def score_predictions(gold, predicted):
    """Score predicted phoneme sequences against gold alternatives.

    gold maps each word to its aligned alternatives; a word is right when the
    prediction equals any of them, and phoneme matches are counted against the
    alternative that agrees best.
    """
    if set(gold) != set(predicted):
        missing = sorted(set(gold) - set(predicted)) or sorted(set(predicted) - set(gold))
        raise ScoringError(missing[0], "predictions and gold cover different words")
    if not gold:
        raise ArgumentError("nothing to score")

    phonemes = correct_phonemes = correct_words = 0
    for word in sorted(gold):
        guess = tuple(predicted[word])
        alternatives = _alternatives(gold[word])
        matches, _ = _best_alternative(word, guess, alternatives)
        phonemes += len(guess)
        correct_phonemes += matches
        correct_words += any(guess == alt for alt in alternatives)
    return Score(correct_phonemes / phonemes, correct_words / len(gold), phonemes, len(gold))


def error_reduction(baseline, improved):
    """Share of the baseline's errors removed by the improved system."""
    for name, value in (("baseline", baseline), ("improved", improved)):
        if not 0.0 <= value <= 1.0:
            raise ArgumentError(f"{name} accuracy must lie in [0, 1], got {value}")
    if baseline >= 1.0:
        raise ArgumentError("error reduction is undefined for a perfect baseline")
    return ((1.0 - baseline) - (1.0 - improved)) / (1.0 - baseline)


@dataclass(frozen=True)
class EvaluationResult:
    per_fold: tuple
    mean_phoneme: float
    mean_word: float
    stddev_phoneme: float
    stddev_word: float = 0.0

    def to_frame(self):
        rows = [
            {
                "fold": str(fold.fold),
                "phoneme_acc": fold.phoneme_accuracy,
                "word_acc": fold.word_accuracy,
                "phonemes": fold.phoneme_count,
                "words": fold.word_count,
            }
            for fold in self.per_fold
        ]
        rows.append({
            "fold": "mean",
            "phoneme_acc": self.mean_phoneme,
            "word_acc": self.mean_word,
            "phonemes": sum(f.phoneme_count for f in self.per_fold),
            "words": sum(f.word_count for f in self.per_fold),
        })
        rows.append({
            "fold": "stddev",
            "phoneme_acc": self.stddev_phoneme,
            "word_acc": self.stddev_word,
            "phonemes": len(self.per_fold),
            "words": len(self.per_fold),
        })
        return pd.DataFrame(rows, columns=["fold", "phoneme_acc", "word_acc", "phonemes", "words"])

    def to_tsv(self):
        return frame_to_tsv(self.to_frame())

    def to_json(self):
        payload = {
            "folds": [fold._asdict() for fold in self.per_fold],
            "mean_phoneme": self.mean_phoneme,
            "mean_word": self.mean_word,
            "stddev_phoneme": self.stddev_phoneme,
            "stddev_word": self.stddev_word,
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def frame_to_tsv(frame):
    return frame.to_csv(sep="\t", index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


def _weighted_mean(values, weights):
    total = math.fsum(weights)
    return math.fsum(v * w for v, w in zip(values, weights)) / total


def _sample_stddev(values):
    return float(np.std(sorted(values), ddof=1))


def aggregate(per_fold):
    """Count-weighted means and the sample standard deviation across folds."""
    folds = []
    for i, score in enumerate(per_fold):
        if not isinstance(score, FoldScore):
            score = FoldScore(i, *score)
        folds.append(score)
    if not folds:
        raise ArgumentError("cannot aggregate an empty list of folds")
    folds.sort(key=lambda f: f.fold)

    mean_phoneme = _weighted_mean([f.phoneme_accuracy for f in folds], [f.phoneme_count for f in folds])
    mean_word = _weighted_mean([f.word_accuracy for f in folds], [f.word_count for f in folds])
    if len(folds) == 1:
        logger.warning("only one fold: standard deviation reported as 0")
        stddev_phoneme = stddev_word = 0.0
    else:
        stddev_phoneme = _sample_stddev([f.phoneme_accuracy for f in folds])
        stddev_word = _sample_stddev([f.word_accuracy for f in folds])
    return EvaluationResult(tuple(folds), mean_phoneme, mean_word, stddev_phoneme, stddev_word)


def per_phoneme_errors(gold, predicted):
    """Error counts per gold phoneme, worst first."""
    totals, errors = Counter(), Counter()
    for word in sorted(gold):
        guess = tuple(predicted[word])
        _, reference = _best_alternative(word, guess, _alternatives(gold[word]))
        for g, p in zip(reference, guess):
            totals[g] += 1
            errors[g] += g != p
    frame = pd.DataFrame(
        [{"phoneme": ph, "count": totals[ph], "errors": errors[ph]} for ph in totals],
        columns=["phoneme", "count", "errors"],
    )
    frame["error_rate"] = frame["errors"] / frame["count"]
    return frame.sort_values(["errors", "phoneme"], ascending=[False, True], kind="stable").reset_index(drop=True)

"""Cascade, combination and meta-meta classifier architectures.

Every prediction a combiner trains on comes from a model that never saw the
word in question: training-side predictions are produced by inner
cross-validation over the outer training words, and each prediction carries
the training-word set of the model(s) that produced it so the guarantee can
be checked before any combiner is trained.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple

import numpy as np

from .config import LEARNER_KINDS, Settings
from .errors import ArgumentError, LeakageError, PairingError, TrainingError
from .evaluation import FoldScore, aggregate, score_predictions
from .instances import (
    Instance,
    InstanceSchema,
    PredictionStream,
    augment_instances,
    window,
    window_instances,
    window_sequence,
)
from .learners import learner_params, train
from .log import get_logger

logger = get_logger(__name__)

MIN_META_LEARNERS, MAX_META_LEARNERS = 2, 8


class Architecture(Enum):
    SINGLE = "single"
    CASCADE = "cascade"
    COMBO_ONE = "combo1"
    COMBO_BOTH = "combo2"
    META_META = "metameta"


@dataclass(frozen=True)
class StackingPlan:
    architecture: Architecture
    target_variant: str = "b"
    component_learner: str = "ib1ig"
    combiner_learner: str = "ib1ig"
    meta_learners: tuple = ("tree_rules", "ib1ig", "igtree", "maxent")
    with_spelling: bool = False
    inner_folds: int = 5
    resubstitution: bool = False

    def __post_init__(self):
        if self.target_variant not in ("a", "b"):
            raise ArgumentError(f"target variant must be 'a' or 'b', got '{self.target_variant}'")
        for kind in (self.component_learner, self.combiner_learner, *self.meta_learners):
            if kind not in LEARNER_KINDS:
                raise ArgumentError(f"unknown learner '{kind}'")
        if self.architecture is Architecture.META_META and not (
            MIN_META_LEARNERS <= len(self.meta_learners) <= MAX_META_LEARNERS
        ):
            raise ArgumentError(f"meta-meta needs {MIN_META_LEARNERS}..{MAX_META_LEARNERS} meta learners")
        if self.inner_folds < 2:
            raise ArgumentError("inner folds must be at least 2")

    @property
    def other_variant(self):
        return "a" if self.target_variant == "b" else "b"

    @property
    def needs_pair(self):
        return self.architecture is not Architecture.SINGLE


def plan_from_settings(architecture, target_variant, settings):
    return StackingPlan(
        Architecture(architecture) if not isinstance(architecture, Architecture) else architecture,
        target_variant,
        settings.component,
        settings.combiner,
        tuple(settings.meta_learners),
        settings.with_spelling,
        settings.inner_folds,
        settings.resubstitution,
    )


# -------------------------------------------------------------------------------------------------
# Folds
# -------------------------------------------------------------------------------------------------


@dataclass(frozen=True)
class FoldAssignment:
    fold_of_word: dict
    seed: int
    n_folds: int

    def words_in(self, fold):
        return tuple(sorted(w for w, f in self.fold_of_word.items() if f == fold))

    def train_words(self, fold):
        return tuple(sorted(w for w, f in self.fold_of_word.items() if f != fold))

    def sizes(self):
        return [sum(1 for f in self.fold_of_word.values() if f == k) for k in range(self.n_folds)]


def make_folds(words, n_folds, seed):
    """Shuffle words deterministically, then deal them round-robin into folds."""
    words = sorted(set(words))
    if n_folds < 2:
        raise ArgumentError("at least two folds are needed")
    if len(words) < n_folds:
        raise ArgumentError(f"{len(words)} words cannot fill {n_folds} folds")
    order = np.random.default_rng(seed).permutation(len(words))
    return FoldAssignment({words[int(j)]: i % n_folds for i, j in enumerate(order)}, seed, n_folds)


# -------------------------------------------------------------------------------------------------
# Provenance-tagged predictions
# -------------------------------------------------------------------------------------------------


@dataclass(frozen=True)
class ModelTag:
    name: str
    training_words: frozenset = field(repr=False)


class PredictionSet(NamedTuple):
    predictions: dict  # word -> predicted phoneme tuple
    provenance: dict  # word -> tuple of ModelTag behind that prediction


def assert_no_leakage(words, prediction_sets):
    """Raise LeakageError if any word was predicted by a model trained on it."""
    checks = 0
    for word in words:
        for prediction_set in prediction_sets:
            for tag in prediction_set.provenance[word]:
                checks += 1
                if word in tag.training_words:
                    raise LeakageError(f"'{word}' was predicted by {tag.name}, which was trained on it")
    return checks


def _word_ids(variant_data):
    return {word: i for i, word in enumerate(sorted(variant_data))}


def _orthography(variant_data, word):
    return variant_data[word][0].orthography


def _spelling_instances(variant_data, words, schema, word_ids):
    instances = []
    for word in words:
        for entry in variant_data[word]:
            instances += window_instances(entry, schema, word_ids[word])
    return instances


def _predict_spelling(model, variant_data, words):
    out = {}
    for word in words:
        orthography = _orthography(variant_data, word)
        out[word] = tuple(model.classify_many(window(orthography, i, model.schema) for i in range(len(orthography))))
    return out


def inner_predictions(train_words, learner, variant_data, inner_folds=5, *, seed=7, params=None,
                      schema=None, assignment=None, name="component"):
    """Predictions for every training word from a model trained without it."""
    schema = schema or InstanceSchema()
    params = params or {}
    assignment = assignment or make_folds(train_words, inner_folds, seed)
    word_ids = _word_ids(variant_data)
    predictions, provenance = {}, {}
    for j in range(assignment.n_folds):
        held, rest = assignment.words_in(j), assignment.train_words(j)
        model = train(learner, _spelling_instances(variant_data, rest, schema, word_ids), schema, **params)
        tag = ModelTag(f"{name}/inner{j}", frozenset(rest))
        for word, predicted in _predict_spelling(model, variant_data, held).items():
            predictions[word] = predicted
            provenance[word] = (tag,)
    return PredictionSet(predictions, provenance)


def resubstitution_predictions(train_words, learner, variant_data, *, params=None, schema=None,
                               name="component"):
    """Optimistic training-side predictions from a model that saw every word."""
    schema = schema or InstanceSchema()
    model = train(learner, _spelling_instances(variant_data, train_words, schema, _word_ids(variant_data)),
                  schema, **(params or {}))
    tag = ModelTag(f"{name}/resubstitution", frozenset(train_words))
    predicted = _predict_spelling(model, variant_data, train_words)
    return PredictionSet(predicted, {word: (tag,) for word in predicted})


# -------------------------------------------------------------------------------------------------
# Combiner instances
# -------------------------------------------------------------------------------------------------


def _stream_names(plan):
    if plan.architecture is Architecture.COMBO_ONE:
        return (f"pred_{plan.other_variant}",)
    if plan.architecture is Architecture.COMBO_BOTH:
        return ("pred_a", "pred_b")
    if plan.architecture is Architecture.META_META:
        return tuple(f"meta{i}_{kind}" for i, kind in enumerate(plan.meta_learners))
    return ()


def combiner_schema(plan, base=None):
    """Feature layout of the model whose output is scored."""
    base = base or InstanceSchema()
    if plan.architecture in (Architecture.SINGLE, Architecture.CASCADE):
        return base
    names = _stream_names(plan)
    if plan.architecture is Architecture.META_META and not plan.with_spelling:
        return base.predictions_only(names)
    return base.extended(names)


def _stacked_instances(entry, word_id, streams, schema):
    """Spelling window (when the schema has one) plus one focus prediction per stream."""
    if schema.with_window:
        base = window_instances(entry, schema, word_id)
    else:
        base = [Instance((), label, word_id, i) for i, label in enumerate(entry.phonemes)]
    keys = tuple((word_id, i) for i in range(len(entry.phonemes)))
    return augment_instances(base, [PredictionStream(name, keys, tuple(symbols)) for name, symbols in streams])


def _stacked_training(target_data, words, named_sets, schema, word_ids):
    instances = []
    for word in words:
        streams = [(name, ps.predictions[word]) for name, ps in named_sets]
        for entry in target_data[word]:
            instances += _stacked_instances(entry, word_ids[word], streams, schema)
    return instances


def _stacked_predict(model, target_data, words, named_sets, word_ids):
    out = {}
    for word in words:
        streams = [(name, ps.predictions[word]) for name, ps in named_sets]
        rows = _stacked_instances(target_data[word][0], word_ids[word], streams, model.schema)
        out[word] = tuple(model.classify_instances(rows))
    return out


def _cascade_training(target_data, words, source, schema, word_ids):
    instances = []
    for word in words:
        for entry in target_data[word]:
            instances += window_sequence(source.predictions[word], entry.phonemes, schema, word_ids[word])
    return instances


def _cascade_predict(model, words, source):
    out = {}
    for word in words:
        predicted = source.predictions[word]
        out[word] = tuple(model.classify_many(window(predicted, i, model.schema) for i in range(len(predicted))))
    return out


# -------------------------------------------------------------------------------------------------
# One outer fold
# -------------------------------------------------------------------------------------------------


class _Fold:
    def __init__(self, plan, corpus, assignment, fold, settings):
        self.plan = plan
        self.settings = settings
        self.fold = fold
        self.data = {"a": _restrict(corpus.variant_a, corpus.shared_words),
                     "b": _restrict(corpus.variant_b, corpus.shared_words)}
        self.word_ids = {word: i for i, word in enumerate(corpus.shared_words)}
        self.train_words = assignment.train_words(fold)
        self.test_words = assignment.words_in(fold)
        if set(self.train_words) & set(self.test_words):
            raise LeakageError(f"fold {fold}: test words overlap the training words")
        self.inner = make_folds(self.train_words, plan.inner_folds, assignment.seed + fold + 1)
        self.schema = InstanceSchema()
        self.checks = 0

    def params(self, kind):
        return learner_params(kind, self.settings)

    def guard(self, words, prediction_sets):
        if self.plan.resubstitution:
            return
        self.checks += assert_no_leakage(words, prediction_sets)

    def component(self, variant, words):
        kind = self.plan.component_learner
        instances = _spelling_instances(self.data[variant], words, self.schema, self.word_ids)
        return train(kind, instances, self.schema, **self.params(kind))

    def training_predictions(self, variant):
        kind = self.plan.component_learner
        name = f"{kind}:{variant}"
        if self.plan.resubstitution:
            return resubstitution_predictions(self.train_words, kind, self.data[variant],
                                              params=self.params(kind), schema=self.schema, name=name)
        return inner_predictions(self.train_words, kind, self.data[variant], params=self.params(kind),
                                 schema=self.schema, assignment=self.inner, name=name)

    def test_predictions(self, variant):
        model = self.component(variant, self.train_words)
        tag = ModelTag(f"{self.plan.component_learner}:{variant}/full", frozenset(self.train_words))
        predicted = _predict_spelling(model, self.data[variant], self.test_words)
        return PredictionSet(predicted, {word: (tag,) for word in predicted})

    def run(self):
        arch = self.plan.architecture
        if arch is Architecture.SINGLE:
            model = self.component(self.plan.target_variant, self.train_words)
            return _predict_spelling(model, self.data[self.plan.target_variant], self.test_words)
        if arch is Architecture.CASCADE:
            return self.run_cascade()
        if arch is Architecture.META_META:
            return self.run_meta_meta()
        return self.run_combination()

    def run_cascade(self):
        source, target = self.plan.other_variant, self.plan.target_variant
        train_side = self.training_predictions(source)
        self.guard(self.train_words, [train_side])
        kind = self.plan.combiner_learner
        instances = _cascade_training(self.data[target], self.train_words, train_side, self.schema, self.word_ids)
        model = train(kind, instances, self.schema, **self.params(kind))
        return _cascade_predict(model, self.test_words, self.test_predictions(source))

    def _combination_variants(self):
        if self.plan.architecture is Architecture.COMBO_ONE:
            return (self.plan.other_variant,)
        return ("a", "b")

    def run_combination(self):
        variants = self._combination_variants()
        schema = combiner_schema(self.plan, self.schema)
        names = _stream_names(self.plan)
        train_sets = [(name, self.training_predictions(v)) for name, v in zip(names, variants)]
        test_sets = [(name, self.test_predictions(v)) for name, v in zip(names, variants)]
        self.guard(self.train_words, [ps for _, ps in train_sets])

        kind = self.plan.combiner_learner
        target = self.data[self.plan.target_variant]
        instances = _stacked_training(target, self.train_words, train_sets, schema, self.word_ids)
        model = train(kind, instances, schema, **self.params(kind))
        return _stacked_predict(model, target, self.test_words, test_sets, self.word_ids)

    def run_meta_meta(self):
        target = self.data[self.plan.target_variant]
        combo_schema = self.schema.extended(("pred_a", "pred_b"))
        comp_train = [("pred_a", self.training_predictions("a")), ("pred_b", self.training_predictions("b"))]
        comp_test = [("pred_a", self.test_predictions("a")), ("pred_b", self.test_predictions("b"))]
        comp_sets = [ps for _, ps in comp_train]

        def fit(kind, words):
            self.guard(words, comp_sets)
            instances = _stacked_training(target, words, comp_train, combo_schema, self.word_ids)
            return train(kind, instances, combo_schema, **self.params(kind))

        names = _stream_names(self.plan)
        meta_train, meta_test = [], []
        for name, kind in zip(names, self.plan.meta_learners):
            predictions, provenance = {}, {}
            # held words are unseen by the meta model, not by every component behind its features
            for j in range(self.inner.n_folds):
                held, rest = self.inner.words_in(j), self.inner.train_words(j)
                model = fit(kind, rest)
                tag = ModelTag(f"{name}/inner{j}", frozenset(rest))
                for word, predicted in _stacked_predict(model, target, held, comp_train, self.word_ids).items():
                    predictions[word] = predicted
                    provenance[word] = (tag,) + tuple(t for _, ps in comp_train for t in ps.provenance[word])
            meta_train.append((name, PredictionSet(predictions, provenance)))

            full = fit(kind, self.train_words)
            tag = ModelTag(f"{name}/full", frozenset(self.train_words))
            predicted = _stacked_predict(full, target, self.test_words, comp_test, self.word_ids)
            meta_test.append((name, PredictionSet(predicted, {word: (tag,) for word in predicted})))
            logger.debug("fold %d: meta learner %s done", self.fold, name)

        self.guard(self.train_words, [ps for _, ps in meta_train])
        schema = combiner_schema(self.plan, self.schema)
        kind = self.plan.combiner_learner
        instances = _stacked_training(target, self.train_words, meta_train, schema, self.word_ids)
        final = train(kind, instances, schema, **self.params(kind))
        return _stacked_predict(final, target, self.test_words, meta_test, self.word_ids)


def _restrict(variant_data, words):
    return {word: variant_data[word] for word in words}


def _run_fold(task):
    plan, corpus, assignment, fold, settings = task
    runner = _Fold(plan, corpus, assignment, fold, settings)
    try:
        predicted = runner.run()
    except TrainingError as exc:
        if exc.fold is not None:
            raise
        raise TrainingError(str(exc), fold=fold) from exc
    gold = {word: runner.data[plan.target_variant][word] for word in runner.test_words}
    score = score_predictions(gold, predicted)
    return FoldScore(fold, *score), runner.checks


def check_plan(plan, corpus):
    if not corpus.shared_words:
        if plan.needs_pair:
            raise PairingError(f"{plan.architecture.value} needs words aligned in both variants")
        raise PairingError("no aligned words to evaluate on")


def run_plan(plan, corpus, folds, settings=None, jobs=1):
    """Cross-validate a stacking plan over the given folds."""
    settings = settings or Settings()
    check_plan(plan, corpus)
    if set(folds.fold_of_word) != set(corpus.shared_words):
        raise ArgumentError("fold assignment does not cover the shared word list")
    if plan.resubstitution:
        logger.warning("resubstitution predictions: combiner results are optimistic")

    tasks = [(plan, corpus, folds, fold, settings) for fold in range(folds.n_folds)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
            outcomes = list(pool.map(_run_fold, tasks))
    else:
        outcomes = [_run_fold(task) for task in tasks]

    for score, checks in outcomes:
        logger.info("fold %d: phoneme %.4f word %.4f (%d provenance checks)",
                    score.fold, score.phoneme_accuracy, score.word_accuracy, checks)
    return aggregate([score for score, _ in outcomes])

"""Maximum-entropy classification over symbolic features, trained with
Generalized Iterative Scaling.

Every observed (position, value, class) triple is an indicator predicate. A
shared slack predicate tops every (instance, class) pair up to the correction
constant F + 1, which GIS needs for its closed-form update.
"""

import math

import numpy as np

from ..errors import ArgumentError
from .base import Model, deduplicate, prepare_training

DEFAULT_MAX_ITERATIONS = 100
DEFAULT_TOLERANCE = 1e-4

_SCORE_DECIMALS = 12


def _log_normalize(scores):
    top = scores.max(axis=1, keepdims=True)
    return scores - (top + np.log(np.exp(scores - top).sum(axis=1, keepdims=True)))


class MaxEntModel(Model):
    kind = "maxent"

    def __init__(self, schema, class_index, pairs, weights, active, slack_weight,
                 iterations_run=0, log_likelihood=()):
        super().__init__(schema, class_index)
        self.pairs = tuple(pairs)
        self.pair_index = {pair: i for i, pair in enumerate(self.pairs)}
        self.weights = weights
        self.active = active
        self.slack_weight = float(slack_weight)
        self.iterations_run = iterations_run
        self.log_likelihood = tuple(log_likelihood)

    @property
    def correction_constant(self):
        return self.schema.width + 1

    @property
    def feature_weights(self):
        return {
            (f, value, self.classes[c]): float(self.weights[i, c])
            for i, (f, value) in enumerate(self.pairs)
            for c in np.flatnonzero(self.active[i])
        }

    def scores(self, features):
        total = np.zeros(len(self.class_index))
        fired = np.zeros(len(self.class_index))
        for f, value in enumerate(features):
            i = self.pair_index.get((f, value))
            if i is not None:
                total += self.weights[i]
                fired += self.active[i]
        return total + self.slack_weight * (self.correction_constant - fired)

    def posterior(self, features):
        log_p = _log_normalize(self.scores(tuple(features))[None, :])[0]
        return dict(zip(self.classes, np.exp(log_p)))

    def _classify(self, features):
        scores = np.round(self.scores(features), _SCORE_DECIMALS)
        return self.classes[self.class_index.best(scores)]

    def to_dict(self):
        data = self._common_dict()
        data.update({
            "correction_constant": self.correction_constant,
            "iterations_run": self.iterations_run,
            "log_likelihood": list(self.log_likelihood),
            "slack_weight": self.slack_weight,
            "feature_weights": [
                [f, value, label, weight]
                for (f, value, label), weight in sorted(self.feature_weights.items())
            ],
        })
        return data

    @classmethod
    def from_dict(cls, data):
        schema, class_index = cls._common_from_dict(data)
        pairs = sorted({(f, value) for f, value, _, _ in data["feature_weights"]})
        index = {pair: i for i, pair in enumerate(pairs)}
        weights = np.zeros((len(pairs), len(class_index)))
        active = np.zeros((len(pairs), len(class_index)), dtype=bool)
        for f, value, label, weight in data["feature_weights"]:
            i, c = index[(f, value)], class_index.index(label)
            weights[i, c] = weight
            active[i, c] = True
        return cls(schema, class_index, pairs, weights, active, data["slack_weight"],
                   data["iterations_run"], data["log_likelihood"])


class _Design:
    """Deduplicated training rows with their predicate ids per position."""

    def __init__(self, data):
        self.class_index = data.class_index
        n_classes = len(data.class_index)
        rows, self.counts = deduplicate(data.X, data.y, n_classes)
        self.row_totals = self.counts.sum(axis=1)
        self.ids = np.empty_like(rows)
        self.pairs = []
        offset = 0
        for f in range(rows.shape[1]):
            values = np.unique(rows[:, f])
            self.ids[:, f] = offset + np.searchsorted(values, rows[:, f])
            self.pairs += [(f, data.codec.symbols[code]) for code in values]
            offset += len(values)

        self.observed = np.zeros((offset, n_classes))
        for f in range(rows.shape[1]):
            np.add.at(self.observed, self.ids[:, f], self.counts)
        self.active = self.observed > 0
        self.correction = rows.shape[1] + 1
        self.slack = self.correction - self.active[self.ids].sum(axis=1)
        self.observed_slack = float((self.counts * self.slack).sum())

    def log_posteriors(self, weights, slack_weight):
        return _log_normalize(weights[self.ids].sum(axis=1) + slack_weight * self.slack)

    def expected(self, log_p):
        mass = self.row_totals[:, None] * np.exp(log_p)
        expected = np.zeros_like(self.observed)
        for f in range(self.ids.shape[1]):
            np.add.at(expected, self.ids[:, f], mass)
        return expected, float((mass * self.slack).sum())


def train_maxent_gis(instances, schema, max_iterations=DEFAULT_MAX_ITERATIONS, tolerance=DEFAULT_TOLERANCE):
    if max_iterations < 1:
        raise ArgumentError("max_iterations must be at least 1")
    data = prepare_training(instances, schema)
    design = _Design(data)
    weights = np.zeros_like(design.observed)
    slack_weight = 0.0
    history = []

    iteration = 0
    for iteration in range(1, max_iterations + 1):
        log_p = design.log_posteriors(weights, slack_weight)
        history.append(float((design.counts * log_p).sum()))
        expected, expected_slack = design.expected(log_p)

        delta = np.zeros_like(weights)
        delta[design.active] = np.log(design.observed[design.active] / expected[design.active])
        delta /= design.correction
        slack_delta = math.log(design.observed_slack / expected_slack) / design.correction

        weights += delta
        slack_weight += slack_delta
        if max(float(np.abs(delta).max()), abs(slack_delta)) < tolerance:
            break

    history.append(float((design.counts * design.log_posteriors(weights, slack_weight)).sum()))
    return MaxEntModel(schema, data.class_index, design.pairs, weights, design.active,
                       slack_weight, iteration, history)


def predicate_moments(model, instances):
    """(empirical, expected) predicate counts over instances, slack predicate last."""
    n_classes = len(model.class_index)
    empirical = np.zeros((len(model.pairs) + 1, n_classes))
    expected = np.zeros_like(empirical)
    slack = len(model.pairs)
    for inst in instances:
        p = np.array([model.posterior(inst.features)[c] for c in model.classes])
        fired = np.zeros(n_classes)
        label = model.class_index.index(inst.label)
        for f, value in enumerate(inst.features):
            i = model.pair_index.get((f, value))
            if i is None:
                continue
            fired += model.active[i]
            empirical[i, label] += model.active[i, label]
            expected[i] += p * model.active[i]
        residual = model.correction_constant - fired
        empirical[slack, 0] += residual[label]
        expected[slack, 0] += float((p * residual).sum())
    return empirical, expected



import math
from collections import Counter

import numpy as np
import pytest

from g2pstack.errors import ArgumentError, ModelFormatError, TrainingError
from g2pstack.instances import Instance, InstanceSchema
from g2pstack.learners import (
    MODEL_CLASSES,
    ProductionRule,
    dumps_model,
    gain_ratio,
    loads_model,
    predicate_moments,
    sort_rules,
    train,
    train_ib1ig,
    train_igtree,
    train_maxent_gis,
    train_tree_rules,
)
from g2pstack.learners.base import ClassIndex

from tests.helpers import random_instances

WIDTH = 7
SCHEMA = InstanceSchema()


def _entropy(labels):
    counts = Counter(labels)
    total = sum(counts.values())
    return -sum(c / total * math.log2(c / total) for c in counts.values())


def _gain_ratio_oracle(instances, feature):
    """Plain-Python entropy table."""
    labels = [inst.label for inst in instances]
    by_value = {}
    for inst in instances:
        by_value.setdefault(inst.features[feature], []).append(inst.label)
    n = len(instances)
    conditional = sum(len(ls) / n * _entropy(ls) for ls in by_value.values())
    gain = _entropy(labels) - conditional
    split = -sum(len(ls) / n * math.log2(len(ls) / n) for ls in by_value.values())
    if split <= 1e-12 or gain <= 1e-12:
        return 0.0
    return gain / split


def _brute_force_ib1(instances, weights, query, k=1):
    rows = np.array([inst.features for inst in instances])
    distances = np.round((rows != np.array(query)) @ weights, 12)
    cutoff = np.unique(distances)[:k][-1]
    votes = Counter(inst.label for inst, d in zip(instances, distances) if d <= cutoff)
    index = ClassIndex(Counter(inst.label for inst in instances))
    return max(index.classes, key=lambda c: (votes[c], -index.index(c)))


def _rule_generator(features):
    f1, f2, f3, f4, f5 = features[1], features[2], features[3], features[4], features[5]
    if f3 == "a" and f4 == "b":
        return "X"
    if f3 == "c" and f2 == "a":
        return "Y"
    if f3 == "d":
        return "Z"
    if f3 == "b" and f5 == "e":
        return "W"
    if f3 == "e" and f1 == "c":
        return "V"
    return "0"


def _generated(rng, n):
    symbols = np.array(list("abcde"))
    rows = symbols[rng.integers(5, size=(n, WIDTH))]
    return [Instance(tuple(row), _rule_generator(tuple(row)), i, 0) for i, row in enumerate(rows)]


class TestGainRatio:
    """Feature weights against an independent entropy table."""

    def test_hand_datasets_match_the_oracle(self, rng):
        for _ in range(20):
            instances = random_instances(rng, int(rng.integers(2, 40)), 3, n_symbols=int(rng.integers(1, 5)))
            for feature in range(3):
                assert gain_ratio(instances, feature) == pytest.approx(_gain_ratio_oracle(instances, feature), abs=1e-9)

    def test_perfect_predictor_and_constant_feature(self):
        instances = [
            Instance(("a", "k"), "X"), Instance(("a", "k"), "X"),
            Instance(("b", "k"), "Y"), Instance(("b", "k"), "Y"),
        ]
        assert gain_ratio(instances, 0) == pytest.approx(1.0)
        assert gain_ratio(instances, 1) == 0.0

    def test_fuzzed_values_stay_in_unit_interval(self, rng):
        for _ in range(1000):
            instances = random_instances(rng, int(rng.integers(1, 30)), 1, n_symbols=int(rng.integers(1, 6)))
            assert 0.0 <= gain_ratio(instances, 0) <= 1.0

    def test_empty_instance_set_is_a_training_error(self):
        with pytest.raises(TrainingError):
            gain_ratio([], 0)


class TestIB1IG:
    def test_agrees_with_brute_force_scan(self, rng):
        for _ in range(50):
            width = int(rng.integers(1, 10))
            schema = InstanceSchema(left_context=0, right_context=width - 1)
            instances = random_instances(rng, int(rng.integers(1, 500)), width)
            k = int(rng.integers(1, 4))
            model = train_ib1ig(instances, schema, k=k)
            weights = model.weights.vector("gainratio")
            queries = [inst.features for inst in instances[:10]]
            queries += [tuple(q) for q in np.array(list("abcde"))[rng.integers(5, size=(10, width))]]
            for query in queries:
                assert model.classify(query) == _brute_force_ib1(instances, weights, query, k)

    def test_recalls_training_data_without_conflicts(self, rng):
        instances = _generated(rng, 300)
        model = train_ib1ig(instances, SCHEMA)
        rows = {inst.features: inst.label for inst in instances}
        assert all(model.classify(features) == label for features, label in rows.items())

    def test_memory_is_deduplicated(self):
        instances = [Instance(("a",), "X")] * 3 + [Instance(("a",), "Y"), Instance(("b",), "Y")]
        model = train_ib1ig(instances, InstanceSchema(0, 0))
        assert model.memory_size == 2
        assert model.classify(("a",)) == "X"

    def test_width_mismatch_is_an_argument_error(self):
        model = train_ib1ig([Instance(("a",), "X")], InstanceSchema(0, 0))
        with pytest.raises(ArgumentError):
            model.classify(("a", "b"))

    def test_empty_training_set_is_a_training_error(self):
        with pytest.raises(TrainingError):
            train_ib1ig([], SCHEMA)


class TestIGTree:
    def test_recalls_consistent_training_data(self, rng):
        instances = _generated(rng, 400)
        model = train_igtree(instances, SCHEMA)
        assert all(model.classify(inst.features) == inst.label for inst in instances)

    def test_unseen_values_fall_back_to_the_default(self, rng):
        instances = _generated(rng, 200)
        model = train_igtree(instances, SCHEMA)
        assert model.classify(("?",) * WIDTH) == model.root.default == model.default_class

    def test_features_are_tested_in_relevance_order(self, rng):
        instances = _generated(rng, 400)
        model = train_igtree(instances, SCHEMA)
        relevance = model.weights.vector("gainratio")
        ordered = [relevance[f] for f in model.feature_order]
        assert ordered == sorted(ordered, reverse=True)
        # the focus grapheme decides most classes
        assert model.feature_order[0] == 3

    @pytest.mark.parametrize("noisy", [False, True])
    def test_matches_ib1ig_on_training_items(self, noisy, rng):
        instances = random_instances(rng, 400, 4) if noisy else _generated(rng, 400)
        schema = InstanceSchema(0, 3) if noisy else SCHEMA
        tree = train_igtree(instances, schema)
        ratios = tree.weights.vector("gainratio")
        assert len(set(np.round(ratios, 12))) == len(ratios) and ratios.min() > 0
        neighbours = train_ib1ig(instances, schema, k=1)
        queries = [inst.features for inst in instances]
        assert tree.classify_many(queries) == neighbours.classify_many(queries)


class TestTreeRules:
    def test_recovers_generating_rules(self, rng):
        model = train_tree_rules(_generated(rng, 3000), SCHEMA)
        fresh = _generated(rng, 1000)
        agreement = np.mean([model.classify(inst.features) == inst.label for inst in fresh])
        assert agreement >= 0.95

    def test_rule_list_agrees_with_its_tree(self, rng):
        instances = _generated(rng, 2000)
        model = train_tree_rules(instances, SCHEMA)
        agreement = np.mean([model.classify(inst.features) == model.tree_classify(inst.features)
                             for inst in instances])
        assert agreement >= 0.95

    def test_rules_are_sorted_by_lift_then_coverage(self, rng):
        model = train_tree_rules(_generated(rng, 1000), SCHEMA)
        keys = [(-rule.lift, -rule.covered) for rule in model.rules]
        assert keys == sorted(keys)
        assert all(rule.covered > rule.misclassified for rule in model.rules)

    def test_uncovered_query_gets_the_default_class(self, rng):
        model = train_tree_rules(_generated(rng, 500), SCHEMA)
        assert model.classify(("?",) * WIDTH) == model.default_class

    def test_rule_header_format(self):
        rule = ProductionRule(((3, frozenset({"a"})),), "X", 6422, 229, 79.0)
        assert rule.header() == "(6422/229, lift 79.0)"

    def test_rendering(self):
        rule = ProductionRule(
            ((3, frozenset({"a"})), (4, frozenset({"m", "b", "t"}))), "X", 10, 0, 4.56,
        )
        text = rule.render(SCHEMA.feature_names, number=2)
        assert text.splitlines() == [
            "Rule 2: (10/0, lift 4.6)",
            "\tf = a",
            "\tf+1 in {b, m, t}",
            "\t->  class X  [0.917]",
        ]
        assert "\tf+1 in {b, m, (...)}" in rule.render(SCHEMA.feature_names, max_values=2)

    def test_invalid_statistics_are_rejected(self):
        with pytest.raises(ArgumentError):
            ProductionRule((), "X", 3, 3, 1.0)

    def test_sort_is_stable(self):
        first = ProductionRule(((0, frozenset({"a"})),), "X", 5, 0, 2.0)
        second = ProductionRule(((0, frozenset({"b"})),), "Y", 5, 0, 2.0)
        assert sort_rules([first, second]) == [first, second]

    def test_model_render_ends_with_default(self, rng):
        model = train_tree_rules(_generated(rng, 500), SCHEMA)
        text = model.render()
        assert text.startswith("Rule 1: (")
        assert text.rstrip().endswith(f"Default class: {model.default_class}")


class TestMaxEnt:
    def test_log_likelihood_never_decreases(self, rng):
        for _ in range(20):
            width = int(rng.integers(1, 5))
            instances = random_instances(rng, int(rng.integers(5, 80)), width)
            model = train_maxent_gis(instances, InstanceSchema(0, width - 1), max_iterations=60, tolerance=1e-12)
            assert np.all(np.diff(model.log_likelihood) >= -1e-9)

    def test_converged_moments_match(self, rng):
        symbols, classes = np.array(["a", "b"]), np.array(["X", "Y"])
        rows = symbols[rng.integers(2, size=(200, 3))]
        labels = classes[rng.integers(2, size=200)]
        instances = [Instance(tuple(r), str(c)) for r, c in zip(rows, labels)]
        model = train_maxent_gis(instances, InstanceSchema(0, 2), max_iterations=3000, tolerance=1e-10)
        empirical, expected = predicate_moments(model, instances)
        np.testing.assert_allclose(expected, empirical, atol=1e-3)

    def test_posterior_sums_to_one(self, rng):
        instances = random_instances(rng, 60, 2)
        model = train_maxent_gis(instances, InstanceSchema(0, 1))
        posterior = model.posterior(instances[0].features)
        assert sum(posterior.values()) == pytest.approx(1.0)
        assert model.classify(instances[0].features) == max(model.classes, key=lambda c: (posterior[c], -model.class_index.index(c)))

    def test_learns_a_deterministic_mapping(self):
        instances = [Instance((s,), s.upper()) for s in "abc" for _ in range(5)]
        model = train_maxent_gis(instances, InstanceSchema(0, 0))
        assert [model.classify((s,)) for s in "abc"] == ["A", "B", "C"]

    def test_separating_feature_is_confident(self):
        instances = [Instance((s, n), s.upper()) for s in "ab" for n in "xyz" for _ in range(4)]
        model = train_maxent_gis(instances, InstanceSchema(0, 1), max_iterations=1000)
        assert model.posterior(("a", "y"))["A"] >= 0.95
        assert model.posterior(("b", "x"))["B"] >= 0.95

    def test_uninformative_features_give_the_priors(self):
        instances = [Instance((s, n), label) for s in "ab" for n in "cd" for label in "XXXY"]
        model = train_maxent_gis(instances, InstanceSchema(0, 1), max_iterations=3000, tolerance=1e-10)
        for features in (("a", "c"), ("b", "d")):
            posterior = model.posterior(features)
            assert posterior["X"] == pytest.approx(0.75, abs=1e-3)
            assert posterior["Y"] == pytest.approx(0.25, abs=1e-3)

    def test_needs_at_least_one_iteration(self):
        with pytest.raises(ArgumentError):
            train_maxent_gis([Instance(("a",), "X")], InstanceSchema(0, 0), max_iterations=0)


class TestPersistence:
    @pytest.mark.parametrize("kind", sorted(MODEL_CLASSES))
    def test_reloaded_model_predicts_the_same(self, kind, rng):
        instances = _generated(rng, 300)
        model = train(kind, instances, SCHEMA)
        text = dumps_model(model)
        assert text.startswith(f"g2pstack-model v1 {kind}\n")
        reloaded = loads_model(text, MODEL_CLASSES)
        queries = [inst.features for inst in _generated(rng, 100)]
        assert reloaded.classify_many(queries) == model.classify_many(queries)
        assert dumps_model(reloaded) == text

    def test_foreign_header_is_rejected(self):
        with pytest.raises(ModelFormatError):
            loads_model("something else\n{}\n", MODEL_CLASSES)

    def test_unknown_kind_is_rejected(self):
        with pytest.raises(ModelFormatError, match="unknown model kind"):
            loads_model("g2pstack-model v1 perceptron\n{}\n", MODEL_CLASSES)

    def test_unknown_learner_is_an_argument_error(self):
        with pytest.raises(ArgumentError):
            train("perceptron", [Instance(("a",) * WIDTH, "X")], SCHEMA)

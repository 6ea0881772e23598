"""Gain-ratio decision trees turned into ordered production rules.

The tree picks the best remaining feature at every node (C4.5 style, with the
average-gain filter), each root-to-leaf path becomes a rule, conditions are
dropped while the rule's Laplace error does not grow, and rules of one class
that differ in a single feature are merged into value-set tests.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import ArgumentError
from .base import Model, TreeNode, prepare_training
from .weights import EPSILON, contingency, ratio, split_scores

# a split needs at least two branches with this many instances
MINIMUM_INSTANCES = 2


def laplace_error(covered, misclassified):
    return (misclassified + 1) / (covered + 2)


@dataclass(frozen=True)
class ProductionRule:
    conditions: tuple  # ((feature index, frozenset of values), ...) by feature index
    label: str
    covered: int
    misclassified: int
    lift: float

    def __post_init__(self):
        if not self.covered > self.misclassified >= 0:
            raise ArgumentError(f"rule statistics out of range: {self.covered}/{self.misclassified}")

    @property
    def accuracy(self):
        return 1.0 - laplace_error(self.covered, self.misclassified)

    def matches(self, features):
        return all(features[f] in values for f, values in self.conditions)

    def header(self):
        return f"({self.covered}/{self.misclassified}, lift {self.lift:.1f})"

    def render(self, feature_names, number=None, max_values=None):
        title = f"Rule {number}: " if number is not None else ""
        lines = [title + self.header()]
        for f, values in self.conditions:
            name = feature_names[f]
            ordered = sorted(values)
            if len(ordered) == 1:
                lines.append(f"\t{name} = {ordered[0]}")
                continue
            if max_values is not None and len(ordered) > max_values:
                ordered = ordered[:max_values] + ["(...)"]
            lines.append(f"\t{name} in {{{', '.join(ordered)}}}")
        lines.append(f"\t->  class {self.label}  [{self.accuracy:.3f}]")
        return "\n".join(lines)


class RuleListModel(Model):
    kind = "tree_rules"

    def __init__(self, schema, class_index, rules, tree=None):
        super().__init__(schema, class_index)
        self.rules = tuple(rules)
        # pre-conversion tree, kept for comparison
        self.tree = tree

    def _classify(self, features):
        for rule in self.rules:
            if rule.matches(features):
                return rule.label
        return self.default_class

    def tree_classify(self, features):
        return self.tree.classify(tuple(features)) if self.tree is not None else self.default_class

    def render(self, max_values=None):
        names = self.schema.feature_names
        blocks = [rule.render(names, i, max_values) for i, rule in enumerate(self.rules, start=1)]
        blocks.append(f"Default class: {self.default_class}")
        return "\n\n".join(blocks) + "\n"

    def to_dict(self):
        data = self._common_dict()
        data["rules"] = [
            {
                "conditions": [[f, sorted(values)] for f, values in rule.conditions],
                "label": rule.label,
                "covered": rule.covered,
                "misclassified": rule.misclassified,
                "lift": rule.lift,
            }
            for rule in self.rules
        ]
        if self.tree is not None:
            data["tree"] = self.tree.to_dict()
        return data

    @classmethod
    def from_dict(cls, data):
        schema, class_index = cls._common_from_dict(data)
        rules = [
            ProductionRule(
                tuple((f, frozenset(values)) for f, values in item["conditions"]),
                item["label"], item["covered"], item["misclassified"], item["lift"],
            )
            for item in data["rules"]
        ]
        tree = TreeNode.from_dict(data["tree"]) if "tree" in data else None
        return cls(schema, class_index, rules, tree)


def sort_rules(rules):
    """Descending lift, then descending coverage; the sort is stable on creation order."""
    return sorted(rules, key=lambda rule: (-rule.lift, -rule.covered))


# -------------------------------------------------------------------------------------------------
# Tree growing
# -------------------------------------------------------------------------------------------------


def _best_split(X, y, rows, available, n_classes):
    candidates = []
    for f in sorted(available):
        table = contingency(X[rows, f], y[rows], n_classes)
        if np.count_nonzero(table.sum(axis=1) >= MINIMUM_INSTANCES) < 2:
            continue
        gain, split_info = split_scores(table)
        if gain <= EPSILON:
            continue
        candidates.append((f, ratio(gain, split_info), gain))
    if not candidates:
        return None

    # only features with at least average gain compete on gain ratio
    average_gain = sum(gain for _, _, gain in candidates) / len(candidates) - EPSILON
    best = None
    for f, gain_ratio, gain in candidates:
        if gain >= average_gain and (best is None or gain_ratio > best[1]):
            best = (f, gain_ratio)
    return best[0]


def _grow(X, y, rows, available, class_index, symbols):
    counts = np.bincount(y[rows], minlength=len(class_index))
    node = TreeNode(class_index.classes[class_index.best(counts)])
    if np.count_nonzero(counts) == 1 or len(rows) < 2 * MINIMUM_INSTANCES or not available:
        return node
    feature = _best_split(X, y, rows, available, len(class_index))
    if feature is None:
        return node
    node.feature = feature
    column = X[rows, feature]
    for code in np.unique(column):
        node.children[symbols[code]] = _grow(X, y, rows[column == code], available - {feature},
                                             class_index, symbols)
    return node


def _paths(node, conditions=()):
    if node.is_leaf:
        yield conditions, node.default
        return
    for value, child in sorted(node.children.items()):
        yield from _paths(child, conditions + ((node.feature, value),))


# -------------------------------------------------------------------------------------------------
# Rule statistics over bitsets
# -------------------------------------------------------------------------------------------------


def _bits(mask):
    return int.from_bytes(np.packbits(mask, bitorder="little").tobytes(), "little")


class _Coverage:
    """Covered-instance bitsets per (feature, value), combined with AND/OR."""

    def __init__(self, data):
        self.data = data
        self.everything = (1 << len(data.y)) - 1
        self.class_bits = {
            label: _bits(data.y == i) for i, label in enumerate(data.class_index.classes)
        }
        self._value_bits = {}

    def value(self, feature, symbol):
        key = (feature, symbol)
        if key not in self._value_bits:
            code = self.data.codec.code(symbol)
            self._value_bits[key] = _bits(self.data.X[:, feature] == code)
        return self._value_bits[key]

    def condition(self, feature, values):
        bits = 0
        for symbol in values:
            bits |= self.value(feature, symbol)
        return bits

    def stats(self, conditions, label):
        covered = self.everything
        for feature, values in conditions:
            covered &= self.condition(feature, values)
        n = covered.bit_count()
        return n, n - (covered & self.class_bits[label]).bit_count()


def _simplify(conditions, label, coverage):
    """Greedily drop conditions while the Laplace error does not increase."""
    conditions = list(conditions)
    current = laplace_error(*coverage.stats(conditions, label))
    while conditions:
        best = None
        for i in range(len(conditions)):
            trial = conditions[:i] + conditions[i + 1:]
            error = laplace_error(*coverage.stats(trial, label))
            if error <= current + EPSILON and (best is None or error < best[0] - EPSILON):
                best = (error, i)
        if best is None:
            break
        current = best[0]
        del conditions[best[1]]
    return tuple(conditions)


def _merge_value_sets(drafts, width):
    """Merge same-class rules that differ only in the values of one feature."""
    for feature in range(width):
        merged, slot = [], {}
        for conditions, label in drafts:
            values = dict(conditions)
            if feature not in values:
                merged.append((conditions, label))
                continue
            key = (label, tuple(c for c in conditions if c[0] != feature))
            if key in slot:
                i = slot[key]
                old_conditions, _ = merged[i]
                union = dict(old_conditions)[feature] | values[feature]
                merged[i] = (tuple(sorted(key[1] + ((feature, union),), key=lambda c: c[0])), label)
            else:
                slot[key] = len(merged)
                merged.append((conditions, label))
        drafts = merged
    return drafts


def _unique(drafts):
    seen, out = set(), []
    for draft in drafts:
        if draft not in seen:
            seen.add(draft)
            out.append(draft)
    return out


def train_tree_rules(instances, schema):
    data = prepare_training(instances, schema)
    class_index = data.class_index
    tree = _grow(data.X, data.y, np.arange(len(data.y)), frozenset(range(schema.width)),
                 class_index, data.codec.symbols)

    coverage = _Coverage(data)
    drafts = []
    for path, label in _paths(tree):
        conditions = tuple((f, frozenset([value])) for f, value in path)
        conditions = _simplify(conditions, label, coverage)
        if conditions:
            drafts.append((tuple(sorted(conditions, key=lambda c: c[0])), label))
    drafts = _unique(_merge_value_sets(_unique(drafts), schema.width))

    priors = dict(zip(class_index.classes, class_index.priors))
    rules = []
    for conditions, label in drafts:
        covered, misclassified = coverage.stats(conditions, label)
        if covered <= misclassified:
            continue
        lift = (1.0 - laplace_error(covered, misclassified)) / priors[label]
        rules.append(ProductionRule(conditions, label, covered, misclassified, lift))
    return RuleListModel(schema, class_index, sort_rules(rules), tree)

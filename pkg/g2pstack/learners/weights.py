"""Information gain and gain ratio over symbolic features."""

from dataclasses import dataclass

import numpy as np

from ..errors import ArgumentError, TrainingError

# values below this are considered zero
EPSILON = 1e-12


def entropy(counts):
    """Entropy in bits of a count vector."""
    counts = np.asarray(counts, dtype=float)
    total = counts.sum()
    if total <= 0:
        return 0.0
    p = counts[counts > 0] / total
    return float(-(p * np.log2(p)).sum())


def contingency(column, y, n_classes):
    """value x class count table for one feature column."""
    _, inverse = np.unique(column, return_inverse=True)
    inverse = inverse.reshape(-1)
    table = np.zeros((inverse.max() + 1, n_classes), dtype=np.int64)
    np.add.at(table, (inverse, y), 1)
    return table


def split_scores(table):
    """(information gain, split information) from a contingency table."""
    total = table.sum()
    class_entropy = entropy(table.sum(axis=0))
    value_totals = table.sum(axis=1)
    conditional = sum(
        (n / total) * entropy(row) for n, row in zip(value_totals, table) if n > 0
    )
    gain = max(class_entropy - conditional, 0.0)
    return gain, entropy(value_totals)


def ratio(gain, split_info):
    if split_info <= EPSILON or gain <= EPSILON:
        return 0.0
    return float(min(max(gain / split_info, 0.0), 1.0))


@dataclass(frozen=True)
class FeatureWeights:
    gain_ratio: tuple
    information_gain: tuple

    def vector(self, weighting="gainratio"):
        if weighting == "gainratio":
            return np.array(self.gain_ratio, dtype=float)
        if weighting == "ig":
            return np.array(self.information_gain, dtype=float)
        raise ArgumentError(f"unknown weighting '{weighting}'")


def feature_weights(X, y, n_classes):
    gains, ratios = [], []
    for f in range(X.shape[1]):
        gain, split_info = split_scores(contingency(X[:, f], y, n_classes))
        gains.append(gain)
        ratios.append(ratio(gain, split_info))
    return FeatureWeights(tuple(ratios), tuple(gains))


def gain_ratio(instances, feature):
    """IG(f) / SI(f) for one feature position; 0 for a constant feature."""
    instances = list(instances)
    if not instances:
        raise TrainingError("gain ratio of an empty instance set")
    values = [inst.features[feature] for inst in instances]
    labels = [inst.label for inst in instances]
    value_codes = {v: i for i, v in enumerate(sorted(set(values)))}
    class_codes = {c: i for i, c in enumerate(sorted(set(labels)))}
    column = np.array([value_codes[v] for v in values])
    y = np.array([class_codes[c] for c in labels])
    return ratio(*split_scores(contingency(column, y, len(class_codes))))

"""IGTREE: the instance memory compressed into a tree that tests features in
one global order of decreasing relevance."""

import numpy as np

from .base import Model, TreeNode, prepare_training
from .weights import FeatureWeights, feature_weights


class IGTreeModel(Model):
    kind = "igtree"

    def __init__(self, schema, class_index, feature_order, root, weights, weighting="gainratio"):
        super().__init__(schema, class_index)
        self.feature_order = tuple(feature_order)
        self.root = root
        self.weights = weights
        self.weighting = weighting

    def _classify(self, features):
        return self.root.classify(features)

    def to_dict(self):
        data = self._common_dict()
        data.update({
            "weighting": self.weighting,
            "feature_order": list(self.feature_order),
            "gain_ratio": list(self.weights.gain_ratio),
            "information_gain": list(self.weights.information_gain),
            "root": self.root.to_dict(),
        })
        return data

    @classmethod
    def from_dict(cls, data):
        schema, class_index = cls._common_from_dict(data)
        weights = FeatureWeights(tuple(data["gain_ratio"]), tuple(data["information_gain"]))
        return cls(schema, class_index, data["feature_order"], TreeNode.from_dict(data["root"]),
                   weights, data["weighting"])


def _grow(X, y, rows, order, depth, class_index, symbols):
    counts = np.bincount(y[rows], minlength=len(class_index))
    node = TreeNode(class_index.classes[class_index.best(counts)])
    if np.count_nonzero(counts) == 1 or depth == len(order):
        return node

    feature = order[depth]
    node.feature = feature
    column = X[rows, feature]
    for code in np.unique(column):
        child = _grow(X, y, rows[column == code], order, depth + 1, class_index, symbols)
        # a leaf that repeats the parent default adds nothing: a missing arc answers the same
        if child.is_leaf and child.default == node.default:
            continue
        node.children[symbols[code]] = child
    if not node.children:
        node.feature = None
    return node


def train_igtree(instances, schema, weighting="gainratio"):
    data = prepare_training(instances, schema)
    weights = feature_weights(data.X, data.y, len(data.class_index))
    relevance = weights.vector(weighting)
    # stable sort keeps equal-weight features in position order
    order = tuple(int(f) for f in np.argsort(-relevance, kind="stable"))
    root = _grow(data.X, data.y, np.arange(len(data.y)), order, 0, data.class_index, data.codec.symbols)
    return IGTreeModel(schema, data.class_index, order, root, weights, weighting)

"""IB1-IG: k-nearest-neighbour classification with a gain-ratio weighted
overlap metric over a deduplicated instance memory."""

import numpy as np

from ..errors import ArgumentError
from .base import Model, SymbolCodec, deduplicate, prepare_training
from .weights import FeatureWeights, feature_weights

# distances are rounded before comparison so equal weight sums tie exactly
DISTANCE_DECIMALS = 12


class IB1IGModel(Model):
    kind = "ib1ig"

    def __init__(self, schema, class_index, codec, memory, counts, weights, k=1, weighting="gainratio"):
        super().__init__(schema, class_index)
        if k < 1:
            raise ArgumentError("k must be at least 1")
        if len(weights.gain_ratio) != schema.width:
            raise ArgumentError("weights do not match the schema width")
        self.codec = codec
        self.memory = memory
        self.counts = counts
        self.weights = weights
        self.k = k
        self.weighting = weighting
        self._w = weights.vector(weighting)

    @property
    def memory_size(self):
        return len(self.memory)

    def distances(self, features):
        query = self.codec.encode(features)
        mismatch = self.memory != query
        return np.round(mismatch @ self._w, DISTANCE_DECIMALS)

    def _classify(self, features):
        dist = self.distances(features)
        nearest = np.unique(dist)[: self.k]
        votes = self.counts[dist <= nearest[-1]].sum(axis=0)
        return self.class_index.classes[self.class_index.best(votes)]

    def to_dict(self):
        data = self._common_dict()
        data.update({
            "k": self.k,
            "weighting": self.weighting,
            "gain_ratio": list(self.weights.gain_ratio),
            "information_gain": list(self.weights.information_gain),
            "memory": [
                [list(self._decode(row)), {c: int(n) for c, n in zip(self.classes, counts) if n}]
                for row, counts in zip(self.memory, self.counts)
            ],
        })
        return data

    def _decode(self, row):
        return tuple(self.codec.symbols[code] for code in row)

    @classmethod
    def from_dict(cls, data):
        schema, class_index = cls._common_from_dict(data)
        rows = [tuple(row) for row, _ in data["memory"]]
        codec = SymbolCodec.from_rows(rows)
        memory = codec.encode_rows(rows, schema.width)
        counts = np.zeros((len(rows), len(class_index)), dtype=np.int64)
        for i, (_, by_class) in enumerate(data["memory"]):
            for label, n in by_class.items():
                counts[i, class_index.index(label)] = n
        weights = FeatureWeights(tuple(data["gain_ratio"]), tuple(data["information_gain"]))
        return cls(schema, class_index, codec, memory, counts, weights, data["k"], data["weighting"])


def train_ib1ig(instances, schema, k=1, weighting="gainratio"):
    if k < 1:
        raise ArgumentError("k must be at least 1")
    data = prepare_training(instances, schema)
    n_classes = len(data.class_index)
    memory, counts = deduplicate(data.X, data.y, n_classes)
    weights = feature_weights(data.X, data.y, n_classes)
    return IB1IGModel(schema, data.class_index, data.codec, memory, counts, weights, k, weighting)

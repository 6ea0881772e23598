"""Shared plumbing for the symbolic learners: symbol codes, class ranking and
the train/classify contract every model honours."""

from abc import ABC, abstractmethod
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from ..errors import ArgumentError, TrainingError
from ..instances import InstanceSchema

UNSEEN = -1


class SymbolCodec:
    """Maps feature symbols to small ints; unseen symbols encode as -1."""

    def __init__(self, symbols):
        self.symbols = tuple(sorted(set(symbols)))
        self._code = {symbol: i for i, symbol in enumerate(self.symbols)}

    @classmethod
    def from_rows(cls, rows):
        return cls(symbol for row in rows for symbol in row)

    def __len__(self):
        return len(self.symbols)

    def code(self, symbol):
        return self._code.get(symbol, UNSEEN)

    def encode(self, row):
        return np.array([self._code.get(s, UNSEEN) for s in row], dtype=np.int64)

    def encode_rows(self, rows, width):
        matrix = np.empty((len(rows), width), dtype=np.int64)
        for i, row in enumerate(rows):
            matrix[i] = [self._code.get(s, UNSEEN) for s in row]
        return matrix


class ClassIndex:
    """Classes ordered by descending training frequency, then symbol.

    Index order is the tie-break order: wherever two classes score the same,
    the one with the lower index wins.
    """

    def __init__(self, counts):
        counts = Counter(counts)
        self.classes = tuple(sorted(counts, key=lambda c: (-counts[c], c)))
        self.counts = np.array([counts[c] for c in self.classes], dtype=np.int64)
        self._index = {c: i for i, c in enumerate(self.classes)}

    @classmethod
    def from_labels(cls, labels):
        return cls(Counter(labels))

    def __len__(self):
        return len(self.classes)

    def index(self, label):
        return self._index[label]

    def encode(self, labels):
        return np.array([self._index[label] for label in labels], dtype=np.int64)

    @property
    def majority(self):
        return self.classes[0]

    @property
    def priors(self):
        return self.counts / self.counts.sum()

    def best(self, scores):
        """Highest-scoring class index, ties to the better-ranked class."""
        scores = np.asarray(scores)
        return int(np.flatnonzero(scores == scores.max())[0])


@dataclass
class TrainingData:
    rows: list
    labels: list
    schema: InstanceSchema
    codec: SymbolCodec = field(init=False)
    class_index: ClassIndex = field(init=False)
    X: np.ndarray = field(init=False, repr=False)
    y: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.codec = SymbolCodec.from_rows(self.rows)
        self.class_index = ClassIndex.from_labels(self.labels)
        self.X = self.codec.encode_rows(self.rows, self.schema.width)
        self.y = self.class_index.encode(self.labels)


def prepare_training(instances, schema):
    rows, labels = [], []
    for inst in instances:
        if len(inst.features) != schema.width:
            raise ArgumentError(f"instance has {len(inst.features)} features, schema expects {schema.width}")
        rows.append(tuple(inst.features))
        labels.append(inst.label)
    if not rows:
        raise TrainingError("empty training set")
    return TrainingData(rows, labels, schema)


def deduplicate(X, y, n_classes):
    """Unique feature rows with a per-class count matrix."""
    unique, inverse = np.unique(X, axis=0, return_inverse=True)
    counts = np.zeros((len(unique), n_classes), dtype=np.int64)
    np.add.at(counts, (inverse.reshape(-1), y), 1)
    return unique, counts


@dataclass
class TreeNode:
    """A decision-tree node: majority default plus arcs keyed by feature value."""

    default: str
    feature: int = None
    children: dict = field(default_factory=dict)

    @property
    def is_leaf(self):
        return not self.children

    def classify(self, features):
        """Walk the arcs; a missing arc answers with the current node's default."""
        node = self
        while not node.is_leaf:
            child = node.children.get(features[node.feature])
            if child is None:
                return node.default
            node = child
        return node.default

    def to_dict(self):
        data = {"default": self.default}
        if self.children:
            data["feature"] = self.feature
            data["children"] = {value: child.to_dict() for value, child in sorted(self.children.items())}
        return data

    @classmethod
    def from_dict(cls, data):
        children = {value: cls.from_dict(child) for value, child in data.get("children", {}).items()}
        return cls(data["default"], data.get("feature"), children)


def schema_to_dict(schema):
    return {
        "left_context": schema.left_context,
        "right_context": schema.right_context,
        "extra_feature_names": list(schema.extra_feature_names),
        "pad_symbol": schema.pad_symbol,
        "with_window": schema.with_window,
    }


def schema_from_dict(data):
    return InstanceSchema(
        data["left_context"],
        data["right_context"],
        tuple(data["extra_feature_names"]),
        data["pad_symbol"],
        data["with_window"],
    )


class Model(ABC):
    """Common contract: classify is pure, classify_many memoizes repeated queries."""

    kind = None

    def __init__(self, schema, class_index):
        self.schema = schema
        self.class_index = class_index

    @property
    def classes(self):
        return self.class_index.classes

    @property
    def default_class(self):
        return self.class_index.majority

    def classify(self, features):
        features = tuple(features)
        if len(features) != self.schema.width:
            raise ArgumentError(f"query has {len(features)} features, model expects {self.schema.width}")
        return self._classify(features)

    def classify_many(self, rows):
        cache = {}
        out = []
        for row in rows:
            row = tuple(row)
            if row not in cache:
                cache[row] = self.classify(row)
            out.append(cache[row])
        return out

    def classify_instances(self, instances):
        return self.classify_many(inst.features for inst in instances)

    @abstractmethod
    def _classify(self, features):
        ...

    @abstractmethod
    def to_dict(self):
        ...

    def _common_dict(self):
        return {
            "schema": schema_to_dict(self.schema),
            "classes": {c: int(n) for c, n in zip(self.class_index.classes, self.class_index.counts)},
        }

    @staticmethod
    def _common_from_dict(data):
        return schema_from_dict(data["schema"]), ClassIndex(data["classes"])

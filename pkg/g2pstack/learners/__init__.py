"""Four symbolic learners behind one train/classify contract."""

from ..errors import ArgumentError
from .base import Model, TreeNode
from .ib1ig import IB1IGModel, train_ib1ig
from .igtree import IGTreeModel, train_igtree
from .maxent import MaxEntModel, predicate_moments, train_maxent_gis
from .serialization import dumps_model, loads_model
from .tree_rules import ProductionRule, RuleListModel, sort_rules, train_tree_rules
from .weights import FeatureWeights, feature_weights, gain_ratio

MODEL_CLASSES = {
    cls.kind: cls for cls in (IB1IGModel, IGTreeModel, RuleListModel, MaxEntModel)
}

_TRAINERS = {
    "ib1ig": train_ib1ig,
    "igtree": train_igtree,
    "tree_rules": train_tree_rules,
    "maxent": train_maxent_gis,
}


def learner_params(kind, settings):
    """The subset of Settings a learner kind understands."""
    if kind == "ib1ig":
        return {"k": settings.k, "weighting": settings.weighting}
    if kind == "igtree":
        return {"weighting": settings.weighting}
    if kind == "maxent":
        return {"max_iterations": settings.max_iterations, "tolerance": settings.tolerance}
    if kind == "tree_rules":
        return {}
    raise ArgumentError(f"unknown learner '{kind}'")


def train(kind, instances, schema, **params):
    try:
        trainer = _TRAINERS[kind]
    except KeyError:
        raise ArgumentError(f"unknown learner '{kind}'") from None
    return trainer(instances, schema, **params)


def save_model(model, path):
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(dumps_model(model))


def load_model(path):
    with open(path, encoding="utf-8") as handle:
        return loads_model(handle.read(), MODEL_CLASSES, source=str(path))


__all__ = [
    "FeatureWeights",
    "IB1IGModel",
    "IGTreeModel",
    "MODEL_CLASSES",
    "MaxEntModel",
    "Model",
    "ProductionRule",
    "RuleListModel",
    "TreeNode",
    "dumps_model",
    "feature_weights",
    "gain_ratio",
    "learner_params",
    "load_model",
    "loads_model",
    "predicate_moments",
    "save_model",
    "sort_rules",
    "train",
    "train_ib1ig",
    "train_igtree",
    "train_maxent_gis",
    "train_tree_rules",
]

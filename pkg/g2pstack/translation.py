"""Variant-to-variant translation with a classifier over phoneme windows.

Each variant-A phoneme is classified as '0' (keep) or as the variant-B
phoneme that replaces it; with the tree-rule learner this yields a readable
rule list to set beside the TBEDL program.
"""

from .errors import PairingError
from .instances import NO_CHANGE, InstanceSchema, translation_instances, window, window_sequence
from .learners import train
from .log import get_logger
from .tbedl import Overlap, measure_overlap, pair_sequences

logger = get_logger(__name__)


def _instances(pairs, schema):
    instances = []
    for word_id, (a, b) in enumerate(pairs):
        if hasattr(a, "orthography") and hasattr(b, "orthography"):
            instances += translation_instances(a, b, schema, word_id)
            continue
        a, b = tuple(a), tuple(b)
        if len(a) != len(b):
            raise PairingError(f"pair {word_id}: variant transcriptions differ in aligned length")
        labels = tuple(NO_CHANGE if x == y else y for x, y in zip(a, b))
        instances += window_sequence(a, labels, schema, word_id)
    return instances


def train_translator(pairs, learner="tree_rules", schema=None, **params):
    schema = schema or InstanceSchema()
    instances = _instances(pairs, schema)
    model = train(learner, instances, schema, **params)
    logger.info("trained %s translator on %d phoneme windows", learner, len(instances))
    return model


def translate(model, phonemes):
    phonemes = tuple(phonemes)
    classes = model.classify_many(window(phonemes, i, model.schema) for i in range(len(phonemes)))
    return tuple(p if c == NO_CHANGE else c for p, c in zip(phonemes, classes))


def translation_overlap(model, pairs):
    """Overlap between translated variant A and variant B."""
    sequences = pair_sequences(pairs)
    if not sequences:
        return Overlap(1.0, 1.0)
    return measure_overlap([translate(model, a) for a, _ in sequences], [b for _, b in sequences])

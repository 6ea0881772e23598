"""Windowed classification instances.

Each grapheme (or, for translation, each variant-A phoneme) becomes one
instance: the focus symbol with a fixed left and right context, padded with
'=' beyond the word edges.
"""

from dataclasses import dataclass, replace
from typing import NamedTuple

from .errors import AlignmentError, PairingError
from .lexicon import PAD_SYMBOL

NO_CHANGE = "0"


@dataclass(frozen=True)
class Instance:
    features: tuple
    label: str
    word_id: int = 0
    position: int = 0


@dataclass(frozen=True)
class InstanceSchema:
    left_context: int = 3
    right_context: int = 3
    extra_feature_names: tuple = ()
    pad_symbol: str = PAD_SYMBOL
    with_window: bool = True

    @property
    def window_width(self):
        return self.left_context + 1 + self.right_context if self.with_window else 0

    @property
    def width(self):
        return self.window_width + len(self.extra_feature_names)

    @property
    def feature_names(self):
        if not self.with_window:
            return tuple(self.extra_feature_names)
        window = [f"f-{d}" for d in range(self.left_context, 0, -1)]
        window.append("f")
        window += [f"f+{d}" for d in range(1, self.right_context + 1)]
        return tuple(window) + tuple(self.extra_feature_names)

    def extended(self, names):
        return replace(self, extra_feature_names=tuple(self.extra_feature_names) + tuple(names))

    def predictions_only(self, names):
        """Schema for instances made of prediction features alone."""
        return replace(self, extra_feature_names=tuple(names), with_window=False)


class PredictionStream(NamedTuple):
    """One predicted symbol per base instance, keyed by (word_id, position)."""

    name: str
    keys: tuple
    symbols: tuple


def window(symbols, position, schema):
    pad = schema.pad_symbol
    n = len(symbols)
    return tuple(
        symbols[i] if 0 <= i < n else pad
        for i in range(position - schema.left_context, position + schema.right_context + 1)
    )


def window_sequence(symbols, labels, schema, word_id=0):
    if len(symbols) != len(labels):
        raise AlignmentError("".join(symbols), "symbols and labels differ in length")
    return [
        Instance(window(symbols, i, schema), label, word_id, i)
        for i, label in enumerate(labels)
    ]


def window_instances(entry, schema, word_id=0):
    """Grapheme-window instances labelled with the aligned phonemes."""
    return window_sequence(entry.orthography, entry.phonemes, schema, word_id)


def augment_instances(base, predictions):
    """Append prediction symbols to each instance's features, in stream order."""
    base = list(base)
    if not predictions:
        return base
    keys = tuple((inst.word_id, inst.position) for inst in base)
    for stream in predictions:
        if len(stream.symbols) != len(base):
            raise AlignmentError(stream.name, f"{len(stream.symbols)} predictions for {len(base)} instances")
        if tuple(stream.keys) != keys:
            raise AlignmentError(stream.name, "prediction keys do not line up with the instances")
    return [
        replace(inst, features=inst.features + tuple(stream.symbols[i] for stream in predictions))
        for i, inst in enumerate(base)
    ]


def labels_to_transformation_classes(a, b):
    """'0' where both variants agree, otherwise the variant-B phoneme."""
    if a.orthography != b.orthography:
        raise PairingError(f"cannot pair '{a.word}' with '{b.word}'")
    if len(a.phonemes) != len(b.phonemes):
        raise PairingError(f"'{a.word}': aligned lengths differ")
    return tuple(NO_CHANGE if pa == pb else pb for pa, pb in zip(a.phonemes, b.phonemes))


def translation_instances(a, b, schema, word_id=0):
    """Phoneme-window instances over variant A labelled with transformation classes."""
    return window_sequence(a.phonemes, labels_to_transformation_classes(a, b), schema, word_id)


def phonemes_from_instances(instances):
    ordered = sorted(instances, key=lambda inst: inst.position)
    return tuple(inst.label for inst in ordered)


def format_instances(instances):
    """C4.5-style data lines: f1,...,fk,label."""
    return "".join(",".join(inst.features + (inst.label,)) + "\n" for inst in instances)

"""Transformation-based error-driven learning between two pronunciation variants.

The learner starts from the variant-A transcriptions and greedily adopts the
contextual substitution rule that fixes the most errors against variant B,
until no rule fixes at least `threshold` more errors than it introduces.
All rules of one pass read the string as it was before the pass.
"""

import re
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import NamedTuple

import numpy as np
import pandas as pd

from .errors import ArgumentError, ModelFormatError, PairingError
from .lexicon import PAD_SYMBOL
from .log import get_logger

logger = get_logger(__name__)

BOUNDARY = PAD_SYMBOL
DEFAULT_THRESHOLD = 15


class TemplateKind(Enum):
    PREV_EXACT = "PREV_EXACT"
    NEXT_EXACT = "NEXT_EXACT"
    PREV_WITHIN = "PREV_WITHIN"
    NEXT_WITHIN = "NEXT_WITHIN"
    WORD_START_WITHIN = "WORD_START_WITHIN"
    WORD_END_WITHIN = "WORD_END_WITHIN"

    @property
    def is_word_edge(self):
        return self in (TemplateKind.WORD_START_WITHIN, TemplateKind.WORD_END_WITHIN)


def _exact_value(seq, j):
    # the boundary sits one step past either edge; further out there is nothing to match
    if 0 <= j < len(seq):
        return (seq[j],)
    if j == -1 or j == len(seq):
        return (BOUNDARY,)
    return ()


@dataclass(frozen=True)
class ContextTemplate:
    kind: TemplateKind
    span: int

    def __post_init__(self):
        if not 1 <= self.span <= 3:
            raise ArgumentError(f"template span must be 1..3, got {self.span}")

    def values_at(self, seq, i):
        """Context values this template can be instantiated with at position i."""
        n = len(seq)
        kind, span = self.kind, self.span
        if kind is TemplateKind.PREV_EXACT:
            return _exact_value(seq, i - span)
        if kind is TemplateKind.NEXT_EXACT:
            return _exact_value(seq, i + span)
        if kind is TemplateKind.PREV_WITHIN:
            return tuple(sorted(set(seq[max(0, i - span):i])))
        if kind is TemplateKind.NEXT_WITHIN:
            return tuple(sorted(set(seq[i + 1:i + 1 + span])))
        if kind is TemplateKind.WORD_START_WITHIN:
            return (BOUNDARY,) if i < span else ()
        return (BOUNDARY,) if n - 1 - i < span else ()

    def matches(self, seq, i, value):
        if self.kind.is_word_edge:
            return bool(self.values_at(seq, i))
        return value in self.values_at(seq, i)


def default_templates():
    templates = []
    for kind in (TemplateKind.PREV_EXACT, TemplateKind.NEXT_EXACT):
        templates += [ContextTemplate(kind, span) for span in (1, 2, 3)]
    for kind in (TemplateKind.PREV_WITHIN, TemplateKind.NEXT_WITHIN):
        templates += [ContextTemplate(kind, span) for span in (2, 3)]
    for kind in (TemplateKind.WORD_START_WITHIN, TemplateKind.WORD_END_WITHIN):
        templates += [ContextTemplate(kind, span) for span in (1, 2)]
    return tuple(templates)


@dataclass(frozen=True)
class TransformationRule:
    source: str
    target: str
    template: ContextTemplate
    context_value: str = BOUNDARY
    good: int = 0
    bad: int = 0

    def __post_init__(self):
        if self.source == self.target:
            raise ArgumentError(f"rule rewrites /{self.source}/ into itself")
        if self.template.kind.is_word_edge and self.context_value != BOUNDARY:
            object.__setattr__(self, "context_value", BOUNDARY)

    @property
    def score(self):
        return self.good - self.bad

    def key(self):
        return f"{self.source} {self.target} {self.template.kind.value} {self.template.span} {self.context_value}"

    def render(self):
        return f"{self.key()} # good={self.good} bad={self.bad}"

    def apply(self, seq):
        """One simultaneous pass: every match is decided on the input string."""
        seq = tuple(seq)
        return tuple(
            self.target if s == self.source and self.template.matches(seq, i, self.context_value) else s
            for i, s in enumerate(seq)
        )


@dataclass(frozen=True)
class RuleProgram:
    rules: tuple = ()
    threshold: int = DEFAULT_THRESHOLD

    def __len__(self):
        return len(self.rules)


def apply_rules(program, phonemes):
    seq = tuple(phonemes)
    for rule in program.rules:
        seq = rule.apply(seq)
    return seq


# -------------------------------------------------------------------------------------------------
# Pairs
# -------------------------------------------------------------------------------------------------


def _sequence(item):
    return tuple(getattr(item, "phonemes", item))


def pair_sequences(pairs):
    out = []
    for a, b in pairs:
        seq_a, seq_b = _sequence(a), _sequence(b)
        if len(seq_a) != len(seq_b):
            word = getattr(a, "word", " ".join(seq_a))
            raise PairingError(f"'{word}': variant transcriptions differ in aligned length")
        out.append((seq_a, seq_b))
    return out


def corpus_pairs(corpus, words=None, target="b"):
    """(source, target) aligned entries per shared word, first alternative of each.

    ``target="b"`` learns A into B; ``target="a"`` reverses the direction.
    """
    if target not in ("a", "b"):
        raise ArgumentError(f"target must be 'a' or 'b', got {target!r}")
    words = corpus.shared_words if words is None else words
    source = corpus.variant("b" if target == "a" else "a")
    goal = corpus.variant(target)
    return [(source[w][0], goal[w][0]) for w in words]


def split_pairs(pairs, test_fraction=0.1, seed=7):
    """Single shuffled train/held-out split."""
    if not 0.0 <= test_fraction < 1.0:
        raise ArgumentError("test fraction must lie in [0, 1)")
    pairs = list(pairs)
    order = np.random.default_rng(seed).permutation(len(pairs))
    n_test = int(round(len(pairs) * test_fraction))
    if test_fraction > 0 and len(pairs) > 1:
        n_test = min(max(n_test, 1), len(pairs) - 1)
    test = {int(i) for i in order[:n_test]}
    return ([p for i, p in enumerate(pairs) if i not in test],
            [p for i, p in enumerate(pairs) if i in test])


# -------------------------------------------------------------------------------------------------
# Learning
# -------------------------------------------------------------------------------------------------


def _count_candidates(current, truth, templates):
    good = Counter()
    for seq, gold in zip(current, truth):
        for i, (s, g) in enumerate(zip(seq, gold)):
            if s == g:
                continue
            for template in templates:
                for value in template.values_at(seq, i):
                    good[s, g, template, value] += 1

    sources = {key[0] for key in good}
    bad = Counter()
    for seq, gold in zip(current, truth):
        for i, (s, g) in enumerate(zip(seq, gold)):
            if s != g or s not in sources:
                continue
            for template in templates:
                for value in template.values_at(seq, i):
                    bad[s, template, value] += 1
    return good, bad


def _best_candidate(good, bad):
    best, best_key = None, None
    for (source, target, template, value), fixed in good.items():
        broken = bad[source, template, value]
        rule = TransformationRule(source, target, template, value, fixed, broken)
        key = (-rule.score, -rule.good, rule.key())
        if best_key is None or key < best_key:
            best, best_key = rule, key
    return best


def learn_tbedl(pairs, templates=None, threshold=DEFAULT_THRESHOLD):
    """Greedy rule induction turning variant-A transcriptions into variant B."""
    if threshold < 1:
        raise ArgumentError("threshold must be at least 1")
    templates = tuple(templates) if templates is not None else default_templates()
    sequences = pair_sequences(pairs)
    current = [a for a, _ in sequences]
    truth = [b for _, b in sequences]

    rules = []
    while True:
        good, bad = _count_candidates(current, truth, templates)
        if not good:
            break
        rule = _best_candidate(good, bad)
        if rule.score < threshold:
            break
        rules.append(rule)
        current = [rule.apply(seq) for seq in current]
        logger.debug("rule %d: %s", len(rules), rule.render())
    logger.info("learned %d transformation rules (threshold %d)", len(rules), threshold)
    return RuleProgram(tuple(rules), threshold)


# -------------------------------------------------------------------------------------------------
# Measurement
# -------------------------------------------------------------------------------------------------


class Overlap(NamedTuple):
    word_overlap: float
    phoneme_overlap: float


class Recovery(NamedTuple):
    word_recovery: float
    phoneme_recovery: float
    differing_words: int
    differing_phonemes: int


def measure_overlap(predicted, truth):
    words = sum(p == t for p, t in zip(predicted, truth))
    positions = sum(len(t) for t in truth)
    matches = sum(sum(a == b for a, b in zip(p, t)) for p, t in zip(predicted, truth))
    return Overlap(words / len(truth) if truth else 1.0, matches / positions if positions else 1.0)


def overlap_report(pairs, program=None):
    """Word and phoneme overlap between (possibly transformed) variant A and variant B."""
    sequences = pair_sequences(pairs)
    predicted = [a if program is None else apply_rules(program, a) for a, _ in sequences]
    return measure_overlap(predicted, [b for _, b in sequences])


def difference_recovery(pairs, program):
    """Share of the initially differing words and phonemes that the program fixes."""
    sequences = pair_sequences(pairs)
    words_before = phonemes_before = words_fixed = phonemes_fixed = 0
    for a, b in sequences:
        if a == b:
            continue
        out = apply_rules(program, a)
        words_before += 1
        words_fixed += out == b
        for x, y, z in zip(a, out, b):
            if x != z:
                phonemes_before += 1
                phonemes_fixed += y == z
    return Recovery(
        words_fixed / words_before if words_before else 1.0,
        phonemes_fixed / phonemes_before if phonemes_before else 1.0,
        words_before,
        phonemes_before,
    )


def corpus_errors(predicted, truth):
    return sum(sum(a != b for a, b in zip(p, t)) for p, t in zip(predicted, truth))


def prefix_curve(pairs, program, step=1):
    """Overlap after the first k rules, for k = 0, step, 2*step, ... and the full program."""
    if step < 1:
        raise ArgumentError("step must be at least 1")
    sequences = pair_sequences(pairs)
    current = [a for a, _ in sequences]
    truth = [b for _, b in sequences]
    checkpoints = set(range(0, len(program) + 1, step)) | {len(program)}

    rows = []
    for k in range(len(program) + 1):
        if k > 0:
            rule = program.rules[k - 1]
            current = [rule.apply(seq) for seq in current]
        if k in checkpoints:
            overlap = measure_overlap(current, truth)
            rows.append({
                "rules": k,
                "word_overlap": overlap.word_overlap,
                "phoneme_overlap": overlap.phoneme_overlap,
                "errors": corpus_errors(current, truth),
            })
    return pd.DataFrame(rows, columns=["rules", "word_overlap", "phoneme_overlap", "errors"])


_EXPLANATIONS = {
    TemplateKind.PREV_EXACT: "when the phoneme {span} before it is {value}",
    TemplateKind.NEXT_EXACT: "when the phoneme {span} after it is {value}",
    TemplateKind.PREV_WITHIN: "when one of the {span} preceding phonemes is {value}",
    TemplateKind.NEXT_WITHIN: "when one of the {span} following phonemes is {value}",
    TemplateKind.WORD_START_WITHIN: "within the first {span} phoneme(s) of the word",
    TemplateKind.WORD_END_WITHIN: "within the last {span} phoneme(s) of the word",
}


def explain_rule(rule):
    value = "the word boundary" if rule.context_value == BOUNDARY else f"/{rule.context_value}/"
    context = _EXPLANATIONS[rule.template.kind].format(span=rule.template.span, value=value)
    return f"change /{rule.source}/ into /{rule.target}/ {context}"


# -------------------------------------------------------------------------------------------------
# Rule files
# -------------------------------------------------------------------------------------------------

_RULE_LINE = re.compile(
    r"^(?P<source>\S+) (?P<target>\S+) (?P<kind>[A-Z_]+) (?P<span>\d+) (?P<value>\S+)"
    r"(?:\s+#\s*good=(?P<good>\d+)\s+bad=(?P<bad>\d+))?\s*$"
)
_THRESHOLD_LINE = re.compile(r"^#\s*threshold=(\d+)\s*$")


def format_rules(program):
    lines = [f"# threshold={program.threshold}\n"]
    lines += [rule.render() + "\n" for rule in program.rules]
    return "".join(lines)


def parse_rules(lines, source="<rules>"):
    rules, threshold = [], DEFAULT_THRESHOLD
    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        header = _THRESHOLD_LINE.match(line)
        if header:
            threshold = int(header.group(1))
            continue
        if line.startswith("#"):
            continue
        match = _RULE_LINE.match(line)
        if not match:
            raise ModelFormatError(f"{source}:{line_no}: malformed rule line")
        try:
            template = ContextTemplate(TemplateKind(match["kind"]), int(match["span"]))
            rules.append(TransformationRule(
                match["source"], match["target"], template, match["value"],
                int(match["good"] or 0), int(match["bad"] or 0),
            ))
        except (ValueError, ArgumentError) as exc:
            raise ModelFormatError(f"{source}:{line_no}: {exc}") from None
    return RuleProgram(tuple(rules), threshold)


def save_rules(program, path):
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(format_rules(program))


def load_rules(path):
    path = Path(path)
    with open(path, encoding="utf-8") as handle:
        return parse_rules(handle, source=str(path))


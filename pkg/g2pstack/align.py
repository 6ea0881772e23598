"""Grapheme/phoneme alignment by null insertion and compound merging.

Association weights come from hard EM: a positional-band co-occurrence count
seeds the model, then each pass re-counts pairs from the current best
alignments. Alignment itself is a three-move dynamic program (match,
compound-match, null-insert) over an edit lattice without phoneme deletions.
"""

import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

from .errors import AlignmentError, ArgumentError
from .lexicon import (
    NULL_SYMBOL,
    LexiconEntry,
    ParallelLexicon,
    PhonemeInventory,
    filter_alignable,
    load_lexicon,
    parse_lexicon_lines,
)
from .log import get_logger

logger = get_logger(__name__)

DEFAULT_NULL_PENALTY = math.log(0.1)
DEFAULT_EM_ITERATIONS = 3

# Move ranks double as tie-break order
MATCH, COMPOUND, NULL = 0, 1, 2

_EPS = 1e-9


@dataclass(frozen=True)
class AssociationModel:
    score: dict
    null_penalty: float = DEFAULT_NULL_PENALTY
    floor: float = math.log(1e-6)

    def __post_init__(self):
        if self.null_penalty > 0:
            raise ArgumentError("null_penalty must be <= 0")
        for pair, weight in self.score.items():
            if not math.isfinite(weight):
                raise ArgumentError(f"non-finite association weight for {pair}")

    def weight(self, grapheme, phoneme):
        return self.score.get((grapheme, phoneme), self.floor)


@dataclass(frozen=True)
class AlignedEntry:
    orthography: tuple
    phonemes: tuple
    source: LexiconEntry = field(compare=False, repr=False)
    transcription_index: int = 0
    cost: float = field(default=0.0, compare=False)

    def __post_init__(self):
        if len(self.orthography) != len(self.phonemes):
            raise AlignmentError(self.word, "aligned sequences differ in length")

    @property
    def word(self):
        return "".join(self.orthography)

    @property
    def null_positions(self):
        return tuple(i for i, p in enumerate(self.phonemes) if p == NULL_SYMBOL)


class AlignmentResult(NamedTuple):
    aligned: list
    failures: list  # (word, transcription_index, message)


@dataclass(frozen=True)
class ParallelCorpus:
    """Both variants aligned, keyed by word; only words aligned in both are shared."""

    lexicon: ParallelLexicon
    variant_a: dict
    variant_b: dict
    shared_words: tuple

    def variant(self, name):
        return self.variant_a if name == "a" else self.variant_b


def _band_pairs(length_g, length_p):
    for i in range(length_g):
        centre = i * length_p / length_g
        for j in range(length_p):
            if abs(centre - j) <= 1:
                yield i, j


def _weights_from_counts(counts, vocabulary_size):
    totals = Counter()
    for (grapheme, _), count in counts.items():
        totals[grapheme] += count
    score = {
        pair: math.log((count + 1) / (totals[pair[0]] + vocabulary_size))
        for pair, count in counts.items()
    }
    largest = max(totals.values(), default=0)
    floor = math.log(1 / (largest + vocabulary_size))
    return score, floor


def estimate_associations(entries, iterations=DEFAULT_EM_ITERATIONS, *, inventory=None,
                          null_penalty=DEFAULT_NULL_PENALTY, floor=None):
    """Estimate grapheme/phoneme association weights by hard EM.

    iterations counts the initial band count as iteration 0, so
    iterations=3 means one band count followed by two re-alignment passes.
    """
    if iterations < 1:
        raise ArgumentError("iterations must be a positive integer")
    entries = list(entries)
    if not entries:
        raise ArgumentError("cannot estimate associations from an empty corpus")

    compounds = dict(inventory.compound_expansions) if inventory is not None else {}
    by_parts = {tuple(parts): symbol for symbol, parts in compounds.items()}
    phoneme_vocab = set(compounds)

    counts = Counter()
    for entry in entries:
        for transcription in entry.transcriptions:
            base = _base(transcription, compounds)
            phoneme_vocab.update(base)
            length_g, length_p = len(entry.orthography), len(base)
            if length_p == 0:
                continue
            for i, j in _band_pairs(length_g, length_p):
                grapheme = entry.orthography[i]
                counts[grapheme, base[j]] += 1
                for parts, symbol in by_parts.items():
                    if tuple(base[j:j + len(parts)]) == parts:
                        counts[grapheme, symbol] += 1

    vocabulary_size = max(len(phoneme_vocab), 1)
    score, default_floor = _weights_from_counts(counts, vocabulary_size)
    model = AssociationModel(score, null_penalty, default_floor if floor is None else floor)
    logger.debug("EM iteration 0: %d band pairs", len(counts))

    for iteration in range(1, iterations):
        counts = Counter()
        for entry in entries:
            for index, transcription in enumerate(entry.transcriptions):
                try:
                    path = _solve(entry.orthography, _base(transcription, compounds), model, by_parts)
                except AlignmentError:
                    continue
                for grapheme, symbol in zip(entry.orthography, path.phonemes):
                    if symbol != NULL_SYMBOL:
                        counts[grapheme, symbol] += 1
        score, default_floor = _weights_from_counts(counts, vocabulary_size)
        model = AssociationModel(score, null_penalty, default_floor if floor is None else floor)
        logger.debug("EM iteration %d: %d aligned pairs", iteration, sum(counts.values()))
    return model


def _base(transcription, compounds):
    out = []
    for symbol in transcription:
        if symbol == NULL_SYMBOL:
            continue
        out.extend(compounds.get(symbol, (symbol,)))
    return tuple(out)


class _Path(NamedTuple):
    phonemes: tuple
    cost: float


def _solve(orthography, base, model, by_parts, word=None):
    """Minimum-cost alignment of base phonemes onto the orthography.

    best[i][j] is the cheapest completion having consumed i graphemes and j
    phonemes; the forward read-out prefers match over compound over null at
    the earliest position where costs tie.
    """
    n_g, n_p = len(orthography), len(base)
    word = word or "".join(orthography)
    if n_p > n_g * max([1] + [len(p) for p in by_parts]):
        raise AlignmentError(word, "transcription longer than spelling")

    null_cost = -model.null_penalty
    best = np.full((n_g + 1, n_p + 1), np.inf)
    best[n_g, n_p] = 0.0

    def moves(i, j):
        grapheme = orthography[i]
        if j < n_p:
            yield MATCH, base[j], j + 1, -model.weight(grapheme, base[j])
        for parts, symbol in by_parts.items():
            k = len(parts)
            if j + k <= n_p and tuple(base[j:j + k]) == parts:
                yield COMPOUND, symbol, j + k, -model.weight(grapheme, symbol)
        yield NULL, NULL_SYMBOL, j, null_cost

    for i in range(n_g - 1, -1, -1):
        for j in range(n_p, -1, -1):
            candidates = [cost + best[i + 1, nj] for _, _, nj, cost in moves(i, j)]
            best[i, j] = min(candidates)

    if not math.isfinite(best[0, 0]):
        raise AlignmentError(word, "no legal alignment (transcription too long even with compounds)")

    phonemes, j = [], 0
    for i in range(n_g):
        chosen = None
        for _rank, symbol, nj, cost in moves(i, j):
            total = cost + best[i + 1, nj]
            if chosen is None or total < chosen[0] - _EPS:
                chosen = (total, symbol, nj)
        phonemes.append(chosen[1])
        j = chosen[2]
    return _Path(tuple(phonemes), float(best[0, 0]))


def path_cost(aligned, model):
    """Sum of move costs along an alignment."""
    total = 0.0
    for grapheme, symbol in zip(aligned.orthography, aligned.phonemes):
        if symbol == NULL_SYMBOL:
            total += -model.null_penalty
        else:
            total += -model.weight(grapheme, symbol)
    return total


def align_entry(entry, transcription_index, model, inventory):
    transcription = entry.transcriptions[transcription_index]
    # Provider-supplied alignments (nulls already placed) pass through untouched
    if NULL_SYMBOL in transcription and len(transcription) == len(entry.orthography):
        aligned = AlignedEntry(entry.orthography, tuple(transcription), entry, transcription_index)
        return replace(aligned, cost=path_cost(aligned, model))

    by_parts = {tuple(parts): symbol for symbol, parts in inventory.compound_expansions.items()}
    path = _solve(entry.orthography, inventory.base_form(transcription), model, by_parts, entry.word)
    return AlignedEntry(entry.orthography, path.phonemes, entry, transcription_index, path.cost)


def align_corpus(entries, model, inventory):
    """Align every (entry, transcription) pair; failures are reported, not raised."""
    aligned, failures = [], []
    for entry in entries:
        for index in range(len(entry.transcriptions)):
            try:
                aligned.append(align_entry(entry, index, model, inventory))
            except AlignmentError as exc:
                failures.append((entry.word, index, str(exc)))
    if failures:
        logger.warning("%d transcriptions could not be aligned", len(failures))
    return AlignmentResult(aligned, failures)


def unalignable_report(dropped, failures):
    """One ``word<TAB>transcription number<TAB>reason`` line per transcription left unaligned.

    `dropped` comes from `filter_alignable`, `failures` from `align_corpus`.
    """
    rows = []
    for entry in dropped:
        for index in range(len(entry.transcriptions)):
            rows.append((entry.word, index, "transcription longer than spelling"))
    rows += failures
    return "".join(f"{word}\t{index + 1}\t{reason}\n" for word, index, reason in rows)


def suggest_compounds(dropped, inventory, top=20):
    """Count adjacent phoneme pairs in unalignable entries as compound candidates."""
    candidates = Counter()
    for entry in dropped:
        for transcription in entry.transcriptions:
            base = inventory.base_form(transcription)
            if len(base) <= len(entry.orthography):
                continue
            for left, right in zip(base, base[1:]):
                candidates[left, right] += 1
    return candidates.most_common(top)


def group_by_word(aligned):
    grouped = defaultdict(list)
    for entry in aligned:
        grouped[entry.word].append(entry)
    return {word: tuple(sorted(group, key=lambda e: e.transcription_index)) for word, group in grouped.items()}


def align_parallel(lexicon, inventory_a, inventory_b, *, iterations=DEFAULT_EM_ITERATIONS,
                   null_penalty=DEFAULT_NULL_PENALTY):
    """Align both variants with independent association models."""
    grouped = {}
    for name, entries, inventory in (
        ("a", list(lexicon.variant_a.values()), inventory_a),
        ("b", list(lexicon.variant_b.values()), inventory_b),
    ):
        kept, _ = filter_alignable(entries, inventory)
        model = estimate_associations(kept, iterations, inventory=inventory, null_penalty=null_penalty)
        result = align_corpus(kept, model, inventory)
        failed = {word for word, _, _ in result.failures}
        grouped[name] = {w: g for w, g in group_by_word(result.aligned).items() if w not in failed}
        logger.info("variant %s: %d words aligned", name, len(grouped[name]))

    shared = tuple(w for w in lexicon.shared_words if w in grouped["a"] and w in grouped["b"])
    return ParallelCorpus(lexicon, grouped["a"], grouped["b"], shared)


def format_aligned(aligned):
    return "".join(f"{entry.word}\t{' '.join(entry.phonemes)}\n" for entry in aligned)


def save_aligned(aligned, path):
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(format_aligned(aligned))


def load_aligned(path, inventory=None):
    """Read an aligned TSV; repeated words become alternative transcriptions."""
    if inventory is None:
        with open(path, encoding="utf-8") as handle:
            lines = handle.readlines()
        symbols = {s for line in lines if "\t" in line and not line.startswith("#")
                   for s in line.split("\t", 1)[1].split()}
        inventory = PhonemeInventory.build("aligned", symbols)
        entries = parse_lexicon_lines(lines, inventory, source=str(path))
    else:
        entries = load_lexicon(path, inventory)

    aligned = []
    for entry in entries:
        for index, transcription in enumerate(entry.transcriptions):
            if len(transcription) != len(entry.orthography):
                raise AlignmentError(entry.word, f"{path}: aligned transcription length differs from spelling")
            aligned.append(AlignedEntry(entry.orthography, transcription, entry, index))
    return aligned


def parallel_from_aligned(aligned_a, aligned_b):
    """ParallelCorpus from already aligned entries of both variants."""
    grouped_a, grouped_b = group_by_word(aligned_a), group_by_word(aligned_b)
    lexicon = ParallelLexicon(
        {w: group[0].source for w, group in grouped_a.items()},
        {w: group[0].source for w, group in grouped_b.items()},
        tuple(sorted(grouped_a.keys() & grouped_b.keys())),
    )
    return ParallelCorpus(lexicon, grouped_a, grouped_b, lexicon.shared_words)

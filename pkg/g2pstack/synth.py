"""Synthetic dialect pairs for self-contained experiments.

Words are concatenations of stems drawn from a reused stem inventory,
transcribed into variant A by ordered spelling rules (each rule consumes one
or more graphemes and emits exactly one symbol per grapheme, so the gold
alignment comes for free), and rewritten into variant B by a TBEDL rule
program. Loan stems read their 'g' as /Z/ in variant A, so whether the
word-initial x->G rewrite fires is a property of the stem, not of the
spelling around it. A share of the words gets a second variant-B
transcription.
"""

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .align import AlignedEntry, save_aligned
from .errors import ArgumentError
from .lexicon import NULL_SYMBOL, LexiconEntry, PhonemeInventory, save_inventory, save_lexicon
from .log import get_logger
from .tbedl import ContextTemplate, RuleProgram, TemplateKind, TransformationRule, apply_rules, save_rules

logger = get_logger(__name__)

MIN_WORDS = 50
MAX_AMBIGUITY = 0.2
VOWELS = "aeiou"


@dataclass(frozen=True)
class SpellingRule:
    """Graphemes matched by `pattern` at the current position become `output`.

    An empty output copies the single matched grapheme.
    """

    pattern: str
    output: tuple = ()

    @property
    def regex(self):
        return re.compile(self.pattern)


_OPEN = r"(?=[^aeiou][aeiou]|$)"

DEFAULT_SPELLING_RULES = (
    SpellingRule(r"ch", ("x", NULL_SYMBOL)),
    SpellingRule(r"ng", ("N", NULL_SYMBOL)),
    SpellingRule(r"ie", ("i:", NULL_SYMBOL)),
    SpellingRule(r"aa", ("a:", NULL_SYMBOL)),
    SpellingRule(r"ee", ("e:", NULL_SYMBOL)),
    SpellingRule(r"oo", ("o:", NULL_SYMBOL)),
    SpellingRule(r"uu", ("y:", NULL_SYMBOL)),
    SpellingRule(r"e$", ("@",)),
    SpellingRule(r"a" + _OPEN, ("a:",)),
    SpellingRule(r"e" + _OPEN, ("e:",)),
    SpellingRule(r"i" + _OPEN, ("i:",)),
    SpellingRule(r"o" + _OPEN, ("o:",)),
    SpellingRule(r"u" + _OPEN, ("y:",)),
    SpellingRule(r"a", ("A",)),
    SpellingRule(r"e", ("E",)),
    SpellingRule(r"i", ("I",)),
    SpellingRule(r"o", ("O",)),
    SpellingRule(r"u", ("Y",)),
    # final devoicing
    SpellingRule(r"d$", ("t",)),
    SpellingRule(r"b$", ("p",)),
    SpellingRule(r"v$", ("f",)),
    SpellingRule(r"z$", ("s",)),
    SpellingRule(r"g", ("x",)),
    SpellingRule(r"x", ("K",)),
    SpellingRule(r"[bdfhjklmnprstvwz]"),
)

COMPOUNDS = {"K": ("k", "s")}
LOAN_SYMBOL = "Z"
# relative onset frequencies; unlisted onsets weigh 1
ONSET_WEIGHTS = {"g": 6.0}


def default_dialect_rules():
    return RuleProgram((
        TransformationRule("x", "G", ContextTemplate(TemplateKind.WORD_START_WITHIN, 2)),
        TransformationRule("i:", "I", ContextTemplate(TemplateKind.NEXT_WITHIN, 3), "x"),
        TransformationRule("j", "S", ContextTemplate(TemplateKind.PREV_EXACT, 1), "t"),
    ))


# second variant-B reading of the first vowel that has one
VOWEL_ALTERNATES = {"a:": "A", "A": "a:", "e:": "E", "E": "e:", "o:": "O", "O": "o:", "I": "i:", "i:": "I"}


@dataclass(frozen=True)
class SyntheticSpec:
    word_count: int = 5000
    alphabet: str = "abcdefghijklmnoprstuvwxz"
    base_rules: tuple = DEFAULT_SPELLING_RULES
    dialect_rules: RuleProgram = field(default_factory=default_dialect_rules)
    ambiguity_rate: float = 0.05
    loan_rate: float = 0.4
    stem_count: int = 0
    seed: int = 7

    def __post_init__(self):
        if self.word_count < MIN_WORDS:
            raise ArgumentError(f"word_count must be at least {MIN_WORDS}")
        if not 0.0 <= self.ambiguity_rate <= MAX_AMBIGUITY:
            raise ArgumentError(f"ambiguity_rate must lie in [0, {MAX_AMBIGUITY}]")
        if not 0.0 <= self.loan_rate <= 1.0:
            raise ArgumentError("loan_rate must lie in [0, 1]")
        if self.stem_count < 0:
            raise ArgumentError("stem_count must not be negative")
        if not self.alphabet:
            raise ArgumentError("alphabet is empty")

    @property
    def stems(self):
        """Size of the stem inventory; a stem_count of 0 sizes it to word_count."""
        return self.stem_count or self.word_count


class SyntheticCorpus(NamedTuple):
    lexicon_a: list
    lexicon_b: list
    aligned_a: list
    aligned_b: list
    inventory: PhonemeInventory
    rules: RuleProgram


def transcribe(word, rules=DEFAULT_SPELLING_RULES):
    """Aligned transcription: one symbol (possibly the null phoneme) per grapheme."""
    compiled = [(rule.regex, rule.output) for rule in rules]
    out, pos = [], 0
    while pos < len(word):
        for regex, output in compiled:
            match = regex.match(word, pos)
            if match is None or match.end() == pos:
                continue
            emitted = tuple(output) if output else (word[pos],)
            if len(emitted) != match.end() - pos:
                raise ArgumentError(f"spelling rule /{regex.pattern}/ emits {len(emitted)} symbols "
                                    f"for {match.end() - pos} graphemes")
            out.extend(emitted)
            pos = match.end()
            break
        else:
            raise ArgumentError(f"no spelling rule covers '{word[pos]}' in '{word}'")
    return tuple(out)


class _WordMaker:
    def __init__(self, alphabet, rng):
        letters = sorted(set(alphabet))
        self.vowels = [v for v in letters if v in VOWELS]
        if not self.vowels:
            raise ArgumentError("alphabet has no vowels")
        consonants = [c for c in letters if c not in VOWELS and c not in "cqy"]
        if not consonants:
            raise ArgumentError("alphabet has no usable consonants")
        self.onsets = list(consonants)
        if "c" in letters and "h" in letters:
            self.onsets.append("ch")
        if "t" in letters and "j" in letters:
            self.onsets.append("tj")
        weights = np.array([ONSET_WEIGHTS.get(onset, 1.0) for onset in self.onsets])
        self.onset_p = weights / weights.sum()
        self.codas = [c for c in consonants if c not in "hjvwz"]
        if "n" in letters and "g" in letters:
            self.codas.append("ng")
        self.doubled = [v + v for v in self.vowels if v != "i"]
        if "i" in letters and "e" in letters:
            self.doubled.append("ie")
        self.rng = rng

    def pick(self, options):
        return options[int(self.rng.integers(len(options)))]

    def syllable(self):
        parts = []
        if self.rng.random() < 0.9:
            parts.append(self.onsets[int(self.rng.choice(len(self.onsets), p=self.onset_p))])
        if self.doubled and self.rng.random() < 0.2:
            parts.append(self.pick(self.doubled))
        else:
            parts.append(self.pick(self.vowels))
        if self.codas and self.rng.random() < 0.4:
            parts.append(self.pick(self.codas))
        return "".join(parts)

    def stem(self):
        return "".join(self.syllable() for _ in range(1 + int(self.rng.integers(2))))

    def word(self, stems):
        """A word over the stem inventory: (spelling, indices of its stems)."""
        picked = tuple(int(i) for i in self.rng.integers(len(stems), size=1 + int(self.rng.integers(2))))
        word = "".join(stems[i] for i in picked)
        if "e" in self.vowels and word[-1] not in VOWELS and self.rng.random() < 0.15:
            word += "e"
        return word, picked


def _alternate(phonemes):
    for i, symbol in enumerate(phonemes):
        if symbol in VOWEL_ALTERNATES:
            return phonemes[:i] + (VOWEL_ALTERNATES[symbol],) + phonemes[i + 1:]
    return None


def _strip(phonemes):
    return tuple(p for p in phonemes if p != NULL_SYMBOL)


def _lend(phonemes, stems, picked, loans):
    """Variant-A reading with the 'g' of every loan stem as /Z/."""
    out, pos = list(phonemes), 0
    for index in picked:
        stem = stems[index]
        if index in loans:
            for j, grapheme in enumerate(stem, start=pos):
                if grapheme == "g" and out[j] == "x":
                    out[j] = LOAN_SYMBOL
        pos += len(stem)
    return tuple(out)


def generate_synthetic(spec):
    rng = np.random.default_rng(spec.seed)
    maker = _WordMaker(spec.alphabet, rng)

    stems = sorted({maker.stem() for _ in range(spec.stems)})
    loans = {i for i in range(len(stems)) if rng.random() < spec.loan_rate}

    # first composition of a spelling wins
    compositions, attempts = {}, 0
    while len(compositions) < spec.word_count:
        attempts += 1
        if attempts > spec.word_count * 50:
            raise ArgumentError(f"could only generate {len(compositions)} distinct words from this alphabet")
        word, picked = maker.word(stems)
        compositions.setdefault(word, picked)
    words = sorted(compositions)

    n_ambiguous = int(round(spec.ambiguity_rate * len(words)))
    ambiguous = {words[int(i)] for i in rng.permutation(len(words))[:n_ambiguous]}

    lexicon_a, lexicon_b, aligned_a, aligned_b = [], [], [], []
    symbols = set()
    for word in words:
        orthography = tuple(word)
        phon_a = _lend(transcribe(word, spec.base_rules), stems, compositions[word], loans)
        readings_b = [apply_rules(spec.dialect_rules, phon_a)]
        if word in ambiguous:
            extra = _alternate(readings_b[0])
            if extra is not None and extra != readings_b[0]:
                readings_b.append(extra)

        entry_a = LexiconEntry(orthography, (_strip(phon_a),))
        entry_b = LexiconEntry(orthography, tuple(_strip(r) for r in readings_b))
        lexicon_a.append(entry_a)
        lexicon_b.append(entry_b)
        aligned_a.append(AlignedEntry(orthography, phon_a, entry_a, 0))
        aligned_b += [AlignedEntry(orthography, r, entry_b, i) for i, r in enumerate(readings_b)]
        symbols.update(phon_a)
        for reading in readings_b:
            symbols.update(reading)

    base = {s for s in symbols if s != NULL_SYMBOL and s not in COMPOUNDS}
    compounds = {c: parts for c, parts in COMPOUNDS.items() if c in symbols}
    for parts in compounds.values():
        base.update(parts)
    inventory = PhonemeInventory.build("synthetic", sorted(base), compounds)
    logger.info("generated %d words (%d with two variant-B readings)",
                len(words), sum(len(e.transcriptions) > 1 for e in lexicon_b))
    return SyntheticCorpus(lexicon_a, lexicon_b, aligned_a, aligned_b, inventory, spec.dialect_rules)


def write_synthetic(corpus, out_dir):
    """Write a.tsv, b.tsv, inventory.txt, rules.txt and the gold alignments."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "a": out_dir / "a.tsv",
        "b": out_dir / "b.tsv",
        "inventory": out_dir / "inventory.txt",
        "rules": out_dir / "rules.txt",
        "aligned_a": out_dir / "a.aligned.tsv",
        "aligned_b": out_dir / "b.aligned.tsv",
    }
    save_lexicon(corpus.lexicon_a, paths["a"])
    save_lexicon(corpus.lexicon_b, paths["b"])
    save_inventory(corpus.inventory, paths["inventory"])
    save_rules(corpus.rules, paths["rules"])
    save_aligned(corpus.aligned_a, paths["aligned_a"])
    save_aligned(corpus.aligned_b, paths["aligned_b"])
    return paths

"""Pronunciation lexicons, phoneme inventories and variant pairing.

Phoneme sequences are tuples of symbol strings throughout the toolkit; the
inventory owns the Phoneme objects and knows which symbols are the null
phoneme or compounds.
"""

from dataclasses import dataclass, field
from pathlib import Path

from .errors import InventoryError, LexiconParseError
from .log import get_logger

logger = get_logger(__name__)

NULL_SYMBOL = "-"
PAD_SYMBOL = "="


@dataclass(frozen=True, order=True)
class Phoneme:
    symbol: str
    is_null: bool = False
    is_compound: bool = False
    parts: tuple = ()

    def __post_init__(self):
        if not self.symbol or any(ch.isspace() for ch in self.symbol):
            raise InventoryError(f"invalid phoneme symbol {self.symbol!r}")
        if self.is_null and (self.symbol != NULL_SYMBOL or self.parts):
            raise InventoryError("the null phoneme must be the bare symbol '-'")
        if self.is_compound:
            if len(self.parts) < 2:
                raise InventoryError(f"compound /{self.symbol}/ needs at least two parts")
            if NULL_SYMBOL in self.parts:
                raise InventoryError(f"compound /{self.symbol}/ cannot contain the null phoneme")
        elif self.parts:
            raise InventoryError(f"/{self.symbol}/ has parts but is not a compound")


@dataclass(frozen=True)
class PhonemeInventory:
    scheme_name: str
    symbols: frozenset
    compound_expansions: dict = field(default_factory=dict)

    def __post_init__(self):
        by_symbol = {}
        for phoneme in self.symbols:
            if phoneme.symbol in by_symbol:
                raise InventoryError(f"duplicate symbol /{phoneme.symbol}/ in {self.scheme_name}")
            by_symbol[phoneme.symbol] = phoneme
        nulls = [p for p in self.symbols if p.is_null]
        if len(nulls) != 1:
            raise InventoryError(f"inventory {self.scheme_name} must declare exactly one null phoneme")
        if PAD_SYMBOL in by_symbol:
            raise InventoryError(f"'{PAD_SYMBOL}' is reserved as the window pad symbol")
        for compound, parts in self.compound_expansions.items():
            if compound not in by_symbol or not by_symbol[compound].is_compound:
                raise InventoryError(f"compound /{compound}/ is not declared as a compound symbol")
            for part in parts:
                if part not in by_symbol or by_symbol[part].is_compound or by_symbol[part].is_null:
                    raise InventoryError(f"compound /{compound}/ uses undeclared base phoneme /{part}/")
        object.__setattr__(self, "_by_symbol", by_symbol)
        object.__setattr__(self, "_by_parts", {tuple(v): k for k, v in self.compound_expansions.items()})

    @classmethod
    def build(cls, scheme_name, base_symbols, compounds=None):
        """Build an inventory from base symbols and a compound → parts mapping.

        The null phoneme is always added.
        """
        compounds = {c: tuple(parts) for c, parts in (compounds or {}).items()}
        phonemes = {Phoneme(NULL_SYMBOL, is_null=True)}
        for symbol in base_symbols:
            if symbol != NULL_SYMBOL and symbol not in compounds:
                phonemes.add(Phoneme(symbol))
        for symbol, parts in compounds.items():
            phonemes.add(Phoneme(symbol, is_compound=True, parts=parts))
        return cls(scheme_name, frozenset(phonemes), dict(sorted(compounds.items())))

    def __contains__(self, symbol):
        return symbol in self._by_symbol

    def __len__(self):
        return len(self._by_symbol)

    def phoneme(self, symbol):
        return self._by_symbol[symbol]

    def sorted_symbols(self):
        return sorted(self._by_symbol)

    def is_compound(self, symbol):
        return symbol in self.compound_expansions

    def compound_for(self, parts):
        return self._by_parts.get(tuple(parts))

    @property
    def compound_lengths(self):
        return sorted({len(parts) for parts in self.compound_expansions.values()})

    def base_form(self, transcription):
        """Strip nulls and expand compounds."""
        out = []
        for symbol in transcription:
            if symbol == NULL_SYMBOL:
                continue
            out.extend(self.compound_expansions.get(symbol, (symbol,)))
        return tuple(out)

    def min_merged_length(self, transcription):
        """Shortest length the transcription can reach by merging into declared compounds."""
        base = self.base_form(transcription)
        best = [0] + [len(base) + 1] * len(base)
        for j in range(1, len(base) + 1):
            best[j] = best[j - 1] + 1
            for k in self.compound_lengths:
                if j >= k and tuple(base[j - k:j]) in self._by_parts:
                    best[j] = min(best[j], best[j - k] + 1)
        return best[len(base)]


@dataclass(frozen=True)
class LexiconEntry:
    orthography: tuple
    transcriptions: tuple

    @property
    def word(self):
        return "".join(self.orthography)


@dataclass(frozen=True)
class ParallelLexicon:
    variant_a: dict
    variant_b: dict
    shared_words: tuple


def load_inventory(path, scheme_name=None):
    """Read an inventory file: `<symbol>` or `<symbol>\\t<parts>` per line."""
    path = Path(path)
    base, compounds = [], {}
    has_null = False
    with open(path, encoding="utf-8") as handle:
        for line_no, raw in enumerate(handle, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            symbol, _, rest = line.partition("\t")
            symbol = symbol.strip()
            if symbol == NULL_SYMBOL:
                has_null = True
                continue
            parts = tuple(rest.split())
            if parts:
                compounds[symbol] = parts
            else:
                base.append(symbol)
    if not has_null:
        raise InventoryError(f"{path}: the null phoneme '-' is not declared")
    try:
        return PhonemeInventory.build(scheme_name or path.stem, base, compounds)
    except InventoryError as exc:
        raise InventoryError(f"{path}: {exc}") from None


def save_inventory(inventory, path):
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(f"{NULL_SYMBOL}\n")
        for symbol in inventory.sorted_symbols():
            phoneme = inventory.phoneme(symbol)
            if phoneme.is_null:
                continue
            if phoneme.is_compound:
                handle.write(f"{symbol}\t{' '.join(phoneme.parts)}\n")
            else:
                handle.write(f"{symbol}\n")


def parse_lexicon_lines(lines, inventory, source="<input>"):
    """Parse TSV lexicon lines into merged LexiconEntry values (first-occurrence order)."""
    merged = {}
    for line_no, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n").rstrip("\r")
        if not line.strip() or line.startswith("#"):
            continue
        word, tab, phones = line.partition("\t")
        if not tab:
            raise LexiconParseError(source, line_no, "expected <orthography>\\t<phonemes>")
        if not word:
            raise LexiconParseError(source, line_no, "empty orthography")
        transcription = tuple(phones.split())
        if not transcription:
            raise LexiconParseError(source, line_no, f"empty transcription for '{word}'")
        for symbol in transcription:
            if symbol not in inventory:
                raise LexiconParseError(source, line_no, f"unknown phoneme symbol '{symbol}'", symbol=symbol)
        transcriptions = merged.setdefault(word, [])
        if transcription in transcriptions:
            raise LexiconParseError(source, line_no, f"duplicate transcription for '{word}'")
        transcriptions.append(transcription)
    return [LexiconEntry(tuple(word), tuple(ts)) for word, ts in merged.items()]


def load_lexicon(path, inventory):
    with open(path, encoding="utf-8") as handle:
        entries = parse_lexicon_lines(handle, inventory, source=str(path))
    logger.debug("loaded %d entries from %s", len(entries), path)
    return entries


def format_lexicon(entries):
    return "".join(
        f"{entry.word}\t{' '.join(transcription)}\n"
        for entry in entries
        for transcription in entry.transcriptions
    )


def save_lexicon(entries, path):
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(format_lexicon(entries))


def filter_alignable(entries, inventory):
    """Split entries into (kept, dropped) by whether every transcription fits the spelling."""
    kept, dropped = [], []
    for entry in entries:
        limit = len(entry.orthography)
        if all(inventory.min_merged_length(t) <= limit for t in entry.transcriptions):
            kept.append(entry)
        else:
            dropped.append(entry)
    if dropped:
        logger.info("dropped %d unalignable entries (transcription longer than spelling)", len(dropped))
    return kept, dropped


def pair_lexicons(a, b):
    variant_a = {entry.word: entry for entry in a}
    variant_b = {entry.word: entry for entry in b}
    shared = tuple(sorted(variant_a.keys() & variant_b.keys()))
    return ParallelLexicon(variant_a, variant_b, shared)

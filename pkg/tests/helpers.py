"""Small builders shared by the test modules."""

from g2pstack.align import AlignedEntry
from g2pstack.instances import Instance
from g2pstack.lexicon import LexiconEntry

# alphabet without 'g': every null in the generated alignments has one gold position
UNAMBIGUOUS_ALPHABET = "abcdefhijklmnoprstuvwxz"


def aligned(word, phonemes, index=0):
    """AlignedEntry for a word and a space-separated aligned transcription."""
    orthography = tuple(word)
    transcription = tuple(phonemes.split())
    return AlignedEntry(orthography, transcription, LexiconEntry(orthography, (transcription,)), index)


def random_instances(rng, n, width, n_symbols=4, n_classes=3):
    symbols = [chr(ord("a") + i) for i in range(n_symbols)]
    classes = [chr(ord("A") + i) for i in range(n_classes)]
    rows = rng.integers(n_symbols, size=(n, width))
    labels = rng.integers(n_classes, size=n)
    return [
        Instance(tuple(symbols[v] for v in row), classes[c], i, 0)
        for i, (row, c) in enumerate(zip(rows, labels))
    ]

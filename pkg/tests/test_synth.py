import pytest

from g2pstack.align import load_aligned
from g2pstack.errors import ArgumentError
from g2pstack.lexicon import load_inventory, load_lexicon
from g2pstack.synth import SyntheticSpec, generate_synthetic, transcribe, write_synthetic
from g2pstack.tbedl import RuleProgram, apply_rules, load_rules


class TestTranscribe:
    @pytest.mark.parametrize("word, expected", [
        ("chaam", ("x", "-", "a:", "-", "m")),
        ("tjee", ("t", "j", "e:", "-")),
        ("bad", ("b", "A", "t")),
        ("bede", ("b", "e:", "d", "@")),
    ])
    def test_one_symbol_per_grapheme(self, word, expected):
        assert transcribe(word) == expected

    def test_uncovered_grapheme(self):
        with pytest.raises(ArgumentError, match="'q'"):
            transcribe("qa")


class TestSpecValidation:
    def test_too_few_words(self):
        with pytest.raises(ArgumentError):
            SyntheticSpec(word_count=10)

    def test_ambiguity_out_of_range(self):
        with pytest.raises(ArgumentError):
            SyntheticSpec(ambiguity_rate=0.3)

    def test_loan_rate_out_of_range(self):
        with pytest.raises(ArgumentError):
            SyntheticSpec(loan_rate=1.5)

    def test_empty_alphabet(self):
        with pytest.raises(ArgumentError):
            SyntheticSpec(alphabet="")


class TestGenerate:
    def test_same_seed_same_corpus(self):
        spec = SyntheticSpec(word_count=80, seed=3)
        assert generate_synthetic(spec) == generate_synthetic(spec)

    def test_variant_b_is_the_dialect_rewrite(self, small_synthetic):
        first_b = {entry.orthography: entry.phonemes for entry in small_synthetic.aligned_b if entry.transcription_index == 0}
        for entry in small_synthetic.aligned_a:
            assert first_b[entry.orthography] == apply_rules(small_synthetic.rules, entry.phonemes)

    def test_without_dialect_rules_the_variants_agree(self):
        corpus = generate_synthetic(SyntheticSpec(word_count=60, dialect_rules=RuleProgram(), ambiguity_rate=0.0))
        assert [e.phonemes for e in corpus.aligned_a] == [e.phonemes for e in corpus.aligned_b]

    def test_ambiguous_words_get_a_second_reading(self):
        corpus = generate_synthetic(SyntheticSpec(word_count=200, ambiguity_rate=0.2, seed=2))
        doubled = [e for e in corpus.lexicon_b if len(e.transcriptions) == 2]
        assert 0 < len(doubled) <= 40
        assert all(len(e.transcriptions) == 1 for e in corpus.lexicon_a)

    @pytest.mark.parametrize("loan_rate, absent", [(0.0, "Z"), (1.0, "x")])
    def test_loan_stems_read_g_as_z(self, loan_rate, absent):
        corpus = generate_synthetic(SyntheticSpec(word_count=200, loan_rate=loan_rate, seed=4))
        readings = {(g, p) for e in corpus.aligned_a for g, p in zip(e.orthography, e.phonemes) if g == "g"}
        assert ("g", absent) not in readings
        assert readings - {("g", "-")}

    def test_loan_reading_survives_the_dialect_rewrite(self):
        corpus = generate_synthetic(SyntheticSpec(word_count=300, loan_rate=0.5, seed=4))
        first_b = {e.orthography: e.phonemes for e in corpus.aligned_b if e.transcription_index == 0}
        loans = [e for e in corpus.aligned_a if e.phonemes[0] == "Z"]
        assert loans
        assert all(first_b[e.orthography][0] == "Z" for e in loans)

    def test_aligned_entries_fit_the_orthography(self, small_synthetic):
        for entry in small_synthetic.aligned_a + small_synthetic.aligned_b:
            assert len(entry.phonemes) == len(entry.orthography)
            assert all(symbol in small_synthetic.inventory for symbol in entry.phonemes)


class TestWrite:
    def test_files_load_back(self, tmp_path, small_synthetic):
        paths = write_synthetic(small_synthetic, tmp_path / "data")
        assert sorted(p.name for p in paths.values()) == [
            "a.aligned.tsv", "a.tsv", "b.aligned.tsv", "b.tsv", "inventory.txt", "rules.txt",
        ]
        inventory = load_inventory(paths["inventory"])
        assert len(load_lexicon(paths["a"], inventory)) == 300
        assert load_rules(paths["rules"]) == small_synthetic.rules
        assert len(load_aligned(paths["aligned_b"], inventory)) == len(small_synthetic.aligned_b)

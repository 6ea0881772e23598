import pytest

from g2pstack.errors import AlignmentError, PairingError
from g2pstack.instances import (
    NO_CHANGE,
    Instance,
    InstanceSchema,
    PredictionStream,
    augment_instances,
    format_instances,
    labels_to_transformation_classes,
    phonemes_from_instances,
    translation_instances,
    window,
    window_instances,
)

from tests.helpers import aligned


class TestWindowing:
    """Seven-symbol windows centred on each grapheme."""

    def test_eet_instances(self):
        instances = window_instances(aligned("eet", "e - t"), InstanceSchema())
        assert [inst.features for inst in instances] == [
            ("=", "=", "=", "e", "e", "t", "="),
            ("=", "=", "e", "e", "t", "=", "="),
            ("=", "e", "e", "t", "=", "=", "="),
        ]
        assert [inst.label for inst in instances] == ["e", "-", "t"]

    def test_eet_data_lines(self):
        text = format_instances(window_instances(aligned("eet", "e - t"), InstanceSchema()))
        assert text == "=,=,=,e,e,t,=,e\n=,=,e,e,t,=,=,-\n=,e,e,t,=,=,=,t\n"

    def test_one_instance_per_grapheme(self):
        entry = aligned("aalmoezenier", "a: - l m u: - z @ n i: - r")
        instances = window_instances(entry, InstanceSchema(), word_id=4)
        assert len(instances) == 12
        assert {inst.word_id for inst in instances} == {4}
        assert [inst.position for inst in instances] == list(range(12))
        assert phonemes_from_instances(reversed(instances)) == entry.phonemes

    def test_single_letter_word_is_mostly_padding(self):
        (inst,) = window_instances(aligned("u", "y:"), InstanceSchema())
        assert inst.features == ("=", "=", "=", "u", "=", "=", "=")

    def test_context_widths_are_configurable(self):
        schema = InstanceSchema(left_context=1, right_context=2)
        assert window(tuple("abc"), 0, schema) == ("=", "a", "b", "c")
        assert schema.feature_names == ("f-1", "f", "f+1", "f+2")


class TestSchema:
    def test_extended_appends_prediction_features(self):
        schema = InstanceSchema().extended(("pred_a", "pred_b"))
        assert schema.width == 9
        assert schema.feature_names[-2:] == ("pred_a", "pred_b")

    def test_predictions_only_drops_the_window(self):
        schema = InstanceSchema().predictions_only(("m0", "m1", "m2", "m3"))
        assert schema.window_width == 0
        assert schema.width == 4
        assert schema.feature_names == ("m0", "m1", "m2", "m3")


class TestAugment:
    def test_predictions_append_in_stream_order(self):
        base = window_instances(aligned("eet", "e - t"), InstanceSchema(), word_id=0)
        keys = tuple((0, i) for i in range(3))
        out = augment_instances(base, [
            PredictionStream("pred_a", keys, ("e:", "-", "t")),
            PredictionStream("pred_b", keys, ("e", "-", "d")),
        ])
        assert out[0].features[-2:] == ("e:", "e")
        assert out[2].features[-2:] == ("t", "d")
        assert all(len(inst.features) == 9 for inst in out)
        assert [inst.label for inst in out] == ["e", "-", "t"]

    def test_length_mismatch_is_an_alignment_error(self):
        base = window_instances(aligned("eet", "e - t"), InstanceSchema())
        with pytest.raises(AlignmentError):
            augment_instances(base, [PredictionStream("pred_a", ((0, 0), (0, 1)), ("e", "-"))])

    def test_misaligned_keys_are_rejected(self):
        base = [Instance(("a",), "x", 0, 0), Instance(("b",), "y", 0, 1)]
        with pytest.raises(AlignmentError):
            augment_instances(base, [PredictionStream("p", ((0, 1), (0, 0)), ("x", "y"))])

    def test_no_streams_is_identity(self):
        base = window_instances(aligned("eet", "e - t"), InstanceSchema())
        assert augment_instances(base, []) == base


class TestTransformationClasses:
    def test_agreeing_positions_become_no_change(self):
        a = aligned("tjee", "t j e: -")
        b = aligned("tjee", "t S e: -")
        assert labels_to_transformation_classes(a, b) == (NO_CHANGE, "S", NO_CHANGE, NO_CHANGE)

    def test_different_words_cannot_be_paired(self):
        with pytest.raises(PairingError):
            labels_to_transformation_classes(aligned("tak", "t A k"), aligned("tik", "t I k"))

    def test_translation_instances_window_the_variant_a_phonemes(self):
        a = aligned("tjee", "t j e: -")
        b = aligned("tjee", "t S e: -")
        instances = translation_instances(a, b, InstanceSchema())
        assert instances[1].features == ("=", "=", "t", "j", "e:", "-", "=")
        assert instances[1].label == "S"

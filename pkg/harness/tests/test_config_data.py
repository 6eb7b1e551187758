import pytest

from synth import make_degenerate_records, make_pair_records, write_jsonl
from verseharness.config import EvalConfig
from verseharness.data import cap_labels, read_instances, sense_inventory


class TestEvalConfig:
    def test_protocol_defaults(self):
        config = EvalConfig(model_id="m", task="pns")
        assert (config.learning_rate, config.batch_size, config.epochs,
                config.weight_decay) == (2e-5, 16, 10, 0.01)

    def test_sentence_mood_gets_twenty_epochs(self):
        assert EvalConfig(model_id="m", task="sm").epochs == 20
        assert EvalConfig(model_id="m", task="sm", epochs=5).epochs == 5

    def test_num_labels(self):
        assert EvalConfig(model_id="m", task="nmc").num_labels == 4
        assert EvalConfig(model_id="m", task="sm").num_labels == 3
        assert EvalConfig(model_id="m", task="ss").num_labels == 2

    def test_rejects_bad_values(self):
        with pytest.raises(ValueError):
            EvalConfig(model_id="m", task="nope")
        with pytest.raises(ValueError):
            EvalConfig(model_id="m", task="pns", batch_size=0)


class TestData:
    def test_read_instances(self, tmp_path):
        records = make_pair_records(5, seed=1)
        write_jsonl(tmp_path / "ss.train.jsonl", records)
        assert read_instances(tmp_path / "ss.train.jsonl") == records

    def test_missing_field_rejected(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"task": "sm", "verse_1": "MAT 1:1", "label": 0}\n')
        with pytest.raises(ValueError, match="text_1"):
            read_instances(path)

    def test_cap_labels_matches_capped_export(self, tmp_path):
        # The primary exports raw and capN files side by side; capping here
        # must agree with the capped file: label' = min(label, cap).
        raw = [{**rec, "label": i % 6} for i, rec in
               enumerate(make_degenerate_records(12))]
        capped_file = [{**rec, "label": min(rec["label"], 3)} for rec in raw]
        assert cap_labels(raw, 3) == capped_file
        assert cap_labels(cap_labels(raw, 3), 3) == cap_labels(raw, 3)

    def test_sense_inventory_sorted_distinct(self):
        train = make_pair_records(30, seed=2)
        test = make_pair_records(30, seed=3)
        inventory = sense_inventory(train, test)
        assert inventory == sorted(set(inventory))
        assert set(inventory) == {rec["sense"] for rec in train + test}

    def test_sense_inventory_ignores_single_verse(self):
        assert sense_inventory(make_degenerate_records(4)) == []

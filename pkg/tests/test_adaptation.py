import json
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lecturekit.adaptation import (
    AdaptationConfig,
    Stage,
    StageManifest,
    UtteranceRecord,
    adaptation_schedule,
    balanced_batches,
    read_records,
    split_adaptation_set,
    write_records,
    write_schedule,
)


def make_records(per_speaker_counts):
    records = []
    for speaker, count in per_speaker_counts.items():
        for i in range(count):
            records.append(
                UtteranceRecord(
                    id=f"{speaker}-{i:03d}",
                    speaker=speaker,
                    duration=2.5,
                    transcript="hello world",
                    audio_path=f"audio/{speaker}-{i:03d}.wav",
                )
            )
    return records


def speaker_counts(batch):
    return Counter(r.speaker for r in batch)


class TestUtteranceRecord:
    def test_invalid_duration(self):
        with pytest.raises(ValueError, match="duration"):
            UtteranceRecord("u1", "spk", 0.0, "hi", "a.wav")

    def test_empty_speaker(self):
        with pytest.raises(ValueError, match="speaker"):
            UtteranceRecord("u1", "", 1.0, "hi", "a.wav")


class TestBalancedBatches:
    def test_three_speakers_eight_each(self):
        records = make_records({"a": 8, "b": 8, "c": 8})
        batches = balanced_batches(records, batch_size=6, seed=0)
        assert len(batches) == 4
        for batch in batches:
            assert len(batch) == 6
            assert speaker_counts(batch) == {"a": 2, "b": 2, "c": 2}

    def test_single_speaker_plain_batches(self):
        records = make_records({"solo": 10})
        batches = balanced_batches(records, batch_size=4, seed=1)
        assert [len(b) for b in batches] == [4, 4, 2]
        assert {r.id for b in batches for r in b} == {r.id for r in records}

    def test_three_speakers_batch_of_four(self):
        records = make_records({"a": 8, "b": 8, "c": 8})
        batches = balanced_batches(records, batch_size=4, seed=2)
        for batch in batches:
            if len(batch) == 4:
                counts = speaker_counts(batch)
                assert set(counts.values()) <= {1, 2}
                assert max(counts.values()) - min(counts.values()) <= 1

    def test_covers_each_record_exactly_once(self):
        records = make_records({"a": 7, "b": 5, "c": 9})
        batches = balanced_batches(records, batch_size=5, seed=3)
        seen = [r.id for b in batches for r in b]
        assert sorted(seen) == sorted(r.id for r in records)

    def test_deterministic(self):
        records = make_records({"a": 6, "b": 6})
        one = balanced_batches(records, batch_size=4, seed=9)
        two = balanced_batches(records, batch_size=4, seed=9)
        assert [[r.id for r in b] for b in one] == [[r.id for r in b] for b in two]

    def test_no_records_error(self):
        with pytest.raises(ValueError, match="at least one speaker"):
            balanced_batches([], batch_size=4, seed=0)

    @given(
        counts=st.dictionaries(
            st.sampled_from([f"spk{i}" for i in range(16)]),
            st.integers(1, 12),
            min_size=2,
            max_size=16,
        ),
        batch_size=st.integers(1, 24),
        seed=st.integers(0, 1000),
    )
    @settings(max_examples=120)
    def test_full_batches_balanced(self, counts, batch_size, seed):
        records = make_records(counts)
        batches = balanced_batches(records, batch_size, seed)
        for batch in batches:
            if len(batch) == batch_size:
                per_speaker = speaker_counts(batch)
                observed = [per_speaker.get(s, 0) for s in counts]
                assert max(observed) - min(observed) <= 1
        seen = [r.id for b in batches for r in b]
        assert len(seen) == len(set(seen))  # nothing sampled twice


class TestSplit:
    def test_forty_records_twenty_percent(self):
        records = make_records({"spk": 40})
        adapt, test = split_adaptation_set(records, 0.2, seed=0)
        assert len(test) == 8
        assert len(adapt) == 32

    def test_two_records_half(self):
        records = make_records({"spk": 2})
        adapt, test = split_adaptation_set(records, 0.5, seed=0)
        assert len(adapt) == 1 and len(test) == 1

    def test_round_half_to_even(self):
        records = make_records({"spk": 10})
        adapt, test = split_adaptation_set(records, 0.25, seed=0)
        assert len(test) == 2  # round(2.5) -> 2
        assert len(adapt) == 8

    @given(
        n=st.integers(2, 60),
        fraction=st.floats(0.05, 0.95),
        seed=st.integers(0, 500),
    )
    def test_partition(self, n, fraction, seed):
        records = make_records({"spk": n})
        adapt, test = split_adaptation_set(records, fraction, seed)
        assert len(test) == round(fraction * n)
        ids = sorted(r.id for r in adapt + test)
        assert ids == sorted(r.id for r in records)
        assert not {r.id for r in adapt} & {r.id for r in test}

    def test_deterministic(self):
        records = make_records({"spk": 12})
        assert split_adaptation_set(records, 0.25, 7) == split_adaptation_set(records, 0.25, 7)

    @pytest.mark.parametrize("fraction", [0.0, 1.0, -0.1])
    def test_bad_fraction(self, fraction):
        with pytest.raises(ValueError):
            split_adaptation_set(make_records({"s": 4}), fraction, 0)

    def test_too_few_records(self):
        with pytest.raises(ValueError, match="at least 2"):
            split_adaptation_set(make_records({"s": 1}), 0.5, 0)


class TestSchedule:
    def test_default_stages(self):
        schedule = adaptation_schedule()
        assert [m.stage for m in schedule] == [
            Stage.BASE_TRAIN,
            Stage.DECODER_ADAPT,
            Stage.VOCODER_ADAPT,
        ]
        base, decoder, vocoder = schedule
        assert base.frozen == frozenset()
        assert base.steps == 120_000
        assert base.lr_policy == "step"
        assert decoder.frozen == frozenset({"encoder"})
        assert decoder.steps == 2000
        assert decoder.learning_rate == 3e-5
        assert decoder.attention_penalty_enabled
        assert vocoder.frozen == frozenset({"encoder", "decoder"})
        assert vocoder.steps == 2000
        assert vocoder.assumptions  # mirrored defaults are flagged

    def test_monotone_freezing(self):
        schedule = adaptation_schedule()
        for earlier, later in zip(schedule, schedule[1:]):
            assert earlier.frozen < later.frozen

    def test_zero_steps_rejected(self):
        with pytest.raises(ValueError, match="steps"):
            adaptation_schedule(AdaptationConfig(decoder_steps=0))

    def test_explicit_vocoder_values_not_flagged(self):
        schedule = adaptation_schedule(
            AdaptationConfig(vocoder_steps=500, vocoder_lr=1e-5)
        )
        assert schedule[2].steps == 500
        assert schedule[2].learning_rate == 1e-5
        assert schedule[2].assumptions == ()

    def test_bad_frozen_set_rejected(self):
        with pytest.raises(ValueError, match="frozen"):
            StageManifest(
                stage=Stage.DECODER_ADAPT,
                frozen=frozenset(),
                steps=10,
                learning_rate=1e-4,
                attention_penalty_enabled=True,
            )

    def test_schedule_json(self, tmp_path):
        path = tmp_path / "schedule.json"
        write_schedule(path, adaptation_schedule())
        data = json.loads(path.read_text())
        assert [d["stage"] for d in data] == ["base_train", "decoder_adapt", "vocoder_adapt"]
        assert data[1]["frozen"] == ["encoder"]
        assert data[2]["frozen"] == ["decoder", "encoder"]


class TestRecordsIo:
    def test_roundtrip(self, tmp_path):
        records = make_records({"a": 3, "b": 2})
        path = tmp_path / "records.jsonl"
        write_records(path, records)
        assert read_records(path) == records

    def test_bad_line_reports_number(self, tmp_path):
        path = tmp_path / "records.jsonl"
        good = json.dumps(
            {"id": "x", "speaker": "s", "duration": 1.0, "transcript": "t",
             "audio_path": "a.wav"}
        )
        path.write_text(good + "\n{\"id\": \"broken\"}\n")
        with pytest.raises(ValueError, match=":2:"):
            read_records(path)

"""Acceptance suite: one test per quantitative criterion, one PASS/FAIL line each.

Run with `pytest tests/test_acceptance.py -s` to see the per-criterion lines.
"""

import math
import random
import time
from contextlib import contextmanager

import numpy as np
import scipy.stats

from lecturekit.adaptation import balanced_batches, split_adaptation_set
from lecturekit.attention import attention_loss, penalty_matrix
from lecturekit.deck import parse_deck
from lecturekit.frameplan import AugmentParams, plan, validate_plan
from lecturekit.frontend import TokenKind, encode_infer, encode_train
from lecturekit.mel import (
    DEFAULT_CONFIG,
    Waveform,
    band_centers,
    frame_count,
    mel_spectrogram,
)
from lecturekit.metrics import (
    EMBEDDING_DIM,
    MosSample,
    SpeakerEmbedding,
    cosine_similarity,
    format_mos,
    mean_speaker_similarity,
    mos_with_ci,
)
from lecturekit.pipeline import run_pipeline, validate_manifest

from conftest import OOV_WORDS, make_deck_file
from test_frameplan import plan_by_array_reversal
from test_pipeline import write_config


@contextmanager
def criterion(name):
    try:
        yield
    except Exception:
        print(f"FAIL: {name}")
        raise
    print(f"PASS: {name}")


def test_algorithm1_gap_freedom():
    with criterion("Algorithm 1 gap-freedom over 1000 random parameter sets in < 5 s"):
        rng = random.Random(20260808)
        cases = []
        for _ in range(1000):
            t = rng.randint(10, 2000)
            r = rng.uniform(0.1, 0.4)
            cases.append(AugmentParams(
                ref_len=t, target_len=10 * t, ratio=r, seed=rng.randrange(2**32)
            ))
        started = time.perf_counter()
        for params in cases:
            diagnostics = validate_plan(plan(params), params)
            assert diagnostics == [], diagnostics[:3]
        elapsed = time.perf_counter() - started
        assert elapsed < 5.0, f"took {elapsed:.2f} s"


def test_algorithm1_oracle_equivalence():
    with criterion("Algorithm 1 matches the array-reversing reference on 200 cases"):
        rng = random.Random(31337)
        for _ in range(200):
            t = rng.randint(3, 50)
            r = rng.uniform(max(0.101, 1.0 / t), 0.45)
            t_prime = rng.randint(0, 400)
            seed = rng.randrange(2**32)
            params = AugmentParams(ref_len=t, target_len=t_prime, ratio=r, seed=seed)
            assert list(plan(params).indices) == plan_by_array_reversal(t, t_prime, r, seed)


def test_penalty_matrix_criteria():
    with criterion("penalty diagonal zero, offset value, diagonal loss, gradient"):
        pen = penalty_matrix(64, 64, 3.5)
        assert np.all(np.abs(np.diag(pen)) <= 1e-12)

        half_offset = penalty_matrix(2, 2, 3.5)[1, 0]
        assert abs(half_offset - (1.0 - math.exp(-3.0625))) <= 1e-9

        assert attention_loss(np.eye(64), pen) == 0.0

        n_enc, n_dec = 7, 11
        pen_small = penalty_matrix(n_enc, n_dec, 3.5)
        rng = np.random.default_rng(5)
        att = rng.random((n_enc, n_dec))
        h = 1e-4
        for i in range(n_enc):
            for j in range(n_dec):
                bump = np.zeros_like(att)
                bump[i, j] = h
                fd = (
                    attention_loss(att + bump, pen_small)
                    - attention_loss(att - bump, pen_small)
                ) / (2 * h)
                analytic = pen_small[i, j] / (n_enc * n_dec)
                if analytic == 0.0:
                    assert abs(fd) <= 1e-12
                else:
                    assert abs(fd - analytic) / abs(analytic) <= 1e-6


def test_frontend_criteria(lexicon, lexicon_words):
    with criterion("front-end: infer==train(p=1) x20 seeds, rate in [0.48,0.52], OOV chars"):
        rng = random.Random(8080)
        corpus = " ".join(
            rng.choice(lexicon_words if rng.random() < 0.7 else OOV_WORDS)
            for _ in range(1000)
        )
        infer = encode_infer(corpus, lexicon)
        for seed in range(20):
            assert encode_train(corpus, lexicon, p=1.0, seed=seed).tokens == infer.tokens

        in_lex = " ".join(rng.choice(lexicon_words) for _ in range(10_000))
        seq = encode_train(in_lex, lexicon, p=0.5, seed=123)
        word_kinds = []
        current = None
        for tok in seq.tokens:
            if tok.kind is TokenKind.WORD_BOUNDARY:
                current = None
            elif current is None:
                word_kinds.append(tok.kind)
                current = tok.kind
        assert len(word_kinds) == 10_000
        rate = word_kinds.count(TokenKind.PHONEME) / len(word_kinds)
        assert 0.48 <= rate <= 0.52, f"replacement rate {rate}"

        oov_tokens = [t for t in infer.tokens if t.kind is TokenKind.PHONEME]
        oov_text = " ".join(OOV_WORDS)
        assert all(
            t.kind is not TokenKind.PHONEME
            for t in encode_infer(oov_text, lexicon).tokens
        )
        assert oov_tokens  # in-lexicon words in the corpus did become phonemes


def test_balanced_batches_criteria():
    from lecturekit.adaptation import UtteranceRecord

    with criterion("balanced batches over 500 random datasets; 40-record split -> 8 test"):
        rng = random.Random(777)
        for _ in range(500):
            n_speakers = rng.randint(2, 16)
            records = []
            for s in range(n_speakers):
                for i in range(rng.randint(1, 12)):
                    records.append(UtteranceRecord(
                        id=f"s{s}-{i}", speaker=f"s{s}", duration=1.0,
                        transcript="x", audio_path="x.wav",
                    ))
            batch_size = rng.randint(1, 24)
            batches = balanced_batches(records, batch_size, seed=rng.randrange(2**31))
            for batch in batches:
                if len(batch) == batch_size:
                    counts = [0] * n_speakers
                    for record in batch:
                        counts[int(record.speaker[1:])] += 1
                    assert max(counts) - min(counts) <= 1, (batch_size, counts)

        forty = [
            UtteranceRecord(id=f"u{i}", speaker="spk", duration=7.5,
                            transcript="x", audio_path="x.wav")
            for i in range(40)
        ]
        adapt, test = split_adaptation_set(forty, 0.2, seed=0)
        assert len(test) == 8 and len(adapt) == 32


def test_mel_criteria():
    with criterion("mel: silence at floor, 440 Hz peak band, log-2 shift, frame counts"):
        silence = Waveform(np.zeros(16000, dtype=np.float32), 16000)
        assert np.all(mel_spectrogram(silence).values == DEFAULT_CONFIG.log_floor)

        t = np.arange(16000) / 16000.0
        tone = Waveform(
            (0.4 * np.sin(2 * np.pi * 440.0 * t)).astype(np.float32), 16000
        )
        values = mel_spectrogram(tone).values
        analytic_band = int(np.argmin(np.abs(band_centers(DEFAULT_CONFIG) - 440.0)))
        for row in values[1:-1]:
            assert abs(int(np.argmax(row)) - analytic_band) <= 1

        quiet = Waveform(tone.samples * 0.5, 16000)
        a = mel_spectrogram(quiet).values
        b = mel_spectrogram(Waveform(quiet.samples * 2.0, 16000)).values
        above = a > DEFAULT_CONFIG.log_floor
        assert above.any()
        assert np.max(np.abs((b - a)[above] - math.log(2.0))) <= 1e-4

        rng = random.Random(606)
        for _ in range(100):
            win = rng.randrange(2, 1200)
            hop = rng.randrange(1, 500)
            n = rng.randrange(win, 30000)
            brute = sum(1 for i in range(n) if i * hop + win <= n)
            assert frame_count(n, win, hop) == brute


def test_evalkit_criteria():
    with criterion("evalkit: cosine oracle 1e-9, self-similarity 1.000, t-interval oracle"):
        rng = np.random.default_rng(99)
        for _ in range(1000):
            a = rng.standard_normal(EMBEDDING_DIM)
            b = rng.standard_normal(EMBEDDING_DIM)
            brute = (
                sum(float(x) * float(y) for x, y in zip(a, b))
                / math.sqrt(sum(float(x) ** 2 for x in a))
                / math.sqrt(sum(float(y) ** 2 for y in b))
            )
            got = cosine_similarity(SpeakerEmbedding(a), SpeakerEmbedding(b))
            assert abs(got - brute) <= 1e-9

        embeddings = [SpeakerEmbedding(rng.standard_normal(EMBEDDING_DIM)) for _ in range(25)]
        self_similarity = mean_speaker_similarity(embeddings, embeddings)
        assert self_similarity == 1.0
        assert f"{self_similarity:.3f}" == "1.000"

        pyrng = random.Random(41)
        for _ in range(100):
            n = pyrng.randrange(2, 80)
            scores = [pyrng.randrange(1, 6) for _ in range(n)]
            confidence = pyrng.choice([0.9, 0.95, 0.99])
            samples = [MosSample(f"r{i}", "item", s) for i, s in enumerate(scores)]
            mean, half = mos_with_ci(samples, confidence)
            oracle_mean = sum(scores) / n
            sd = math.sqrt(sum((x - oracle_mean) ** 2 for x in scores) / (n - 1))
            oracle_half = scipy.stats.t.ppf((1 + confidence) / 2, n - 1) * sd / math.sqrt(n)
            assert abs(mean - oracle_mean) <= 1e-9
            assert abs(half - oracle_half) <= 1e-9

        import re

        assert re.fullmatch(r"\d+\.\d{2}±\d+\.\d{2}", format_mos(4.0, 0.031))


def test_end_to_end_criteria(tmp_path, lexicon_file, frames_dir):
    from lecturekit.pipeline import load_config

    with criterion("end-to-end: byte-identical manifests, contiguity 1e-6, < 10 s"):
        deck = parse_deck(make_deck_file(tmp_path))
        serial = load_config(write_config(tmp_path, lexicon_file, frames_dir, workers=1))
        threaded = load_config(write_config(tmp_path, lexicon_file, frames_dir, workers=8))

        started = time.perf_counter()
        manifest = run_pipeline(deck, serial, seed=42, out_dir=tmp_path / "run1")
        run_pipeline(deck, serial, seed=42, out_dir=tmp_path / "run2")
        run_pipeline(deck, threaded, seed=42, out_dir=tmp_path / "run8")
        elapsed = time.perf_counter() - started

        one = (tmp_path / "run1" / "manifest.json").read_bytes()
        two = (tmp_path / "run2" / "manifest.json").read_bytes()
        eight = (tmp_path / "run8" / "manifest.json").read_bytes()
        assert one == two == eight

        clock = 0.0
        for entry in manifest.entries:
            assert abs(entry.start_time - clock) <= 1e-6
            clock += entry.audio_duration
        assert abs(clock - manifest.total_duration) <= 1e-6
        validate_manifest(manifest, tmp_path / "run1")

        assert elapsed < 10.0, f"three pipeline runs took {elapsed:.2f} s"

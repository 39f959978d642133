"""Evaluation metrics: speaker-embedding cosine similarity and MOS aggregation.

Embeddings are 256-dimensional speaker feature vectors produced by an
external extractor; this module only consumes embedding files.  MOS scores
aggregate to a mean with a Student-t confidence interval, formatted like
``4.00±0.03``.  The t quantile is computed in-module (regularized incomplete
beta inverted by bisection) so the test suite can check it against an
independent implementation.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from . import matio

EMBEDDING_DIM = 256


@dataclass(frozen=True, eq=False)
class SpeakerEmbedding:
    vector: np.ndarray

    def __post_init__(self):
        vector = np.asarray(self.vector, dtype=np.float64)
        if vector.shape != (EMBEDDING_DIM,):
            raise ValueError(
                f"speaker embedding must have dimension {EMBEDDING_DIM}, "
                f"got shape {vector.shape}"
            )
        if not np.all(np.isfinite(vector)):
            raise ValueError("speaker embedding contains non-finite entries")
        if not np.any(vector):
            raise ValueError("speaker embedding has zero norm")
        object.__setattr__(self, "vector", vector)


class Pairing(Enum):
    PAIRED = "paired"
    MEAN_CENTROID = "centroid"


def cosine_similarity(a: SpeakerEmbedding, b: SpeakerEmbedding) -> float:
    """dot(a, b) / (|a| * |b|), clamped to [-1, 1].

    Identical (or exactly opposite) vectors compare at exactly +/-1.0 so the
    ground-truth-vs-itself row reproduces 1.000 without float drift.
    """
    va, vb = a.vector, b.vector
    if np.array_equal(va, vb):
        return 1.0
    if np.array_equal(va, -vb):
        return -1.0
    denominator = math.sqrt(float(va @ va) * float(vb @ vb))
    if denominator == 0.0:
        raise ValueError("cosine undefined for zero-norm vectors")
    return float(np.clip((va @ vb) / denominator, -1.0, 1.0))


def mean_speaker_similarity(
    truth: list[SpeakerEmbedding],
    synth: list[SpeakerEmbedding],
    pairing: Pairing = Pairing.PAIRED,
) -> float:
    """Similarity between ground-truth and synthesized embedding sets.

    PAIRED averages per-pair cosines over aligned lists; MEAN_CENTROID
    compares the two set centroids and tolerates unequal sizes.
    """
    if not truth or not synth:
        raise ValueError("embedding sets must be non-empty")
    if pairing is Pairing.PAIRED:
        if len(truth) != len(synth):
            raise ValueError(
                f"paired mode needs equal set sizes, got {len(truth)} and {len(synth)}"
            )
        return sum(cosine_similarity(a, b) for a, b in zip(truth, synth)) / len(truth)
    centroid_truth = np.mean(np.stack([e.vector for e in truth]), axis=0)
    centroid_synth = np.mean(np.stack([e.vector for e in synth]), axis=0)
    return cosine_similarity(
        SpeakerEmbedding(centroid_truth), SpeakerEmbedding(centroid_synth)
    )


@dataclass(frozen=True)
class MosSample:
    rater: str
    item: str
    score: int

    def __post_init__(self):
        if not isinstance(self.score, int) or not 1 <= self.score <= 5:
            raise ValueError(f"MOS score must be an integer in [1, 5], got {self.score!r}")


def mos_with_ci(samples: list[MosSample], confidence: float = 0.95) -> tuple[float, float]:
    """Mean opinion score with a Student-t interval half-width.

    half_width = t_{n-1,(1+confidence)/2} * s / sqrt(n) with the sample
    standard deviation s.
    """
    if len(samples) < 2:
        raise ValueError(f"need at least 2 MOS samples, got {len(samples)}")
    if not 0.0 < confidence < 1.0:
        raise ValueError(f"confidence must be in (0, 1), got {confidence}")
    scores = [s.score for s in samples]
    n = len(scores)
    mean = sum(scores) / n
    variance = sum((x - mean) ** 2 for x in scores) / (n - 1)
    std = math.sqrt(variance)
    half_width = student_t_ppf((1.0 + confidence) / 2.0, n - 1) * std / math.sqrt(n)
    return mean, half_width


def format_mos(mean: float, half_width: float) -> str:
    """Table-style rendering, two decimals on both fields: "4.00±0.03"."""
    return f"{mean:.2f}±{half_width:.2f}"


def student_t_ppf(p: float, df: int) -> float:
    """Quantile of the Student-t distribution with ``df`` degrees of freedom."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must be in (0, 1), got {p}")
    if df < 1:
        raise ValueError(f"degrees of freedom must be >= 1, got {df}")
    if p == 0.5:
        return 0.0
    if p < 0.5:
        return -student_t_ppf(1.0 - p, df)

    def cdf(x: float) -> float:
        # F(x) = 1 - I_z(df/2, 1/2)/2 with z = df/(df + x^2), for x >= 0
        z = df / (df + x * x)
        return 1.0 - 0.5 * _reg_incomplete_beta(df / 2.0, 0.5, z)

    lo, hi = 0.0, 1.0
    while cdf(hi) < p:
        lo = hi
        hi *= 2.0
        if hi > 1e300:
            raise ArithmeticError("t quantile bracketing failed")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if cdf(mid) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _reg_incomplete_beta(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b) via the standard continued fraction."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    # The continued fraction converges fastest for x below the split point.
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cf(a, b, x) / a
    return 1.0 - front * _beta_cf(b, a, 1.0 - x) / b


def _beta_cf(a: float, b: float, x: float) -> float:
    # Modified Lentz evaluation of the incomplete-beta continued fraction.
    tiny = 1e-300
    eps = 1e-16
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, 400):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < eps:
            return h
    raise ArithmeticError("incomplete beta continued fraction did not converge")


def read_mos_csv(path: str | Path) -> list[MosSample]:
    """CSV rows `rater,item,score`; a literal header row is skipped."""
    samples = []
    with open(path, newline="", encoding="utf-8") as f:
        for lineno, row in enumerate(csv.reader(f), 1):
            if not row or all(not cell.strip() for cell in row):
                continue
            if lineno == 1 and [c.strip().lower() for c in row] == ["rater", "item", "score"]:
                continue
            if len(row) != 3:
                raise ValueError(f"{path}:{lineno}: expected rater,item,score")
            rater, item, score_text = (cell.strip() for cell in row)
            try:
                score = int(score_text)
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: score must be an integer") from exc
            samples.append(MosSample(rater=rater, item=item, score=score))
    return samples


def read_embedding_file(path: str | Path) -> SpeakerEmbedding:
    return SpeakerEmbedding(matio.read_embedding(path))


def write_embedding_file(path: str | Path, embedding: SpeakerEmbedding) -> None:
    matio.write_embedding(path, embedding.vector)


def load_embedding_dir(directory: str | Path) -> dict[str, SpeakerEmbedding]:
    """All `*.emb` files of a directory keyed by file stem."""
    directory = Path(directory)
    if not directory.is_dir():
        raise ValueError(f"not a directory: {directory}")
    files = sorted(directory.glob("*.emb"))
    if not files:
        raise ValueError(f"no .emb files in {directory}")
    return {f.stem: read_embedding_file(f) for f in files}

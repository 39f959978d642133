"""Data and schedule plumbing for few-shot speaker adaptation.

This module never runs gradient descent: it produces balanced multi-speaker
batches, adaptation/test splits, and declarative stage manifests (base
training, then decoder fine-tuning with the encoder frozen, then vocoder
fine-tuning) for an external trainer to consume.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from enum import Enum
from pathlib import Path


@dataclass(frozen=True)
class UtteranceRecord:
    id: str
    speaker: str
    duration: float
    transcript: str
    audio_path: str

    def __post_init__(self):
        if self.duration <= 0:
            raise ValueError(f"utterance {self.id!r}: duration must be positive")
        if not self.speaker:
            raise ValueError(f"utterance {self.id!r}: speaker must be non-empty")


class Stage(Enum):
    BASE_TRAIN = "base_train"
    DECODER_ADAPT = "decoder_adapt"
    VOCODER_ADAPT = "vocoder_adapt"


# Component sets each stage keeps frozen; nested so adaptation only ever
# narrows what still trains.
STAGE_FROZEN = {
    Stage.BASE_TRAIN: frozenset(),
    Stage.DECODER_ADAPT: frozenset({"encoder"}),
    Stage.VOCODER_ADAPT: frozenset({"encoder", "decoder"}),
}


@dataclass(frozen=True)
class StageManifest:
    stage: Stage
    frozen: frozenset[str]
    steps: int
    learning_rate: float
    attention_penalty_enabled: bool
    attention_penalty_weight: float = 1.0
    lr_policy: str | None = None
    assumptions: tuple[str, ...] = ()

    def __post_init__(self):
        if self.steps <= 0:
            raise ValueError(f"{self.stage.value}: steps must be positive, got {self.steps}")
        if self.learning_rate <= 0:
            raise ValueError(f"{self.stage.value}: learning rate must be positive")
        if self.frozen != STAGE_FROZEN[self.stage]:
            raise ValueError(
                f"{self.stage.value}: frozen set must be {sorted(STAGE_FROZEN[self.stage])}"
            )

    def to_dict(self) -> dict:
        return {
            "stage": self.stage.value,
            "frozen": sorted(self.frozen),
            "steps": self.steps,
            "learning_rate": self.learning_rate,
            "attention_penalty_enabled": self.attention_penalty_enabled,
            "attention_penalty_weight": self.attention_penalty_weight,
            "lr_policy": self.lr_policy,
            "assumptions": list(self.assumptions),
        }


@dataclass(frozen=True)
class AdaptationConfig:
    """Step counts and learning rates for the three-stage schedule.

    Vocoder values default to the decoder-adaptation values; the emitted
    manifest flags them as assumptions.
    """

    base_steps: int = 120_000
    base_lr: float = 1e-3
    base_lr_policy: str = "step"
    decoder_steps: int = 2000
    decoder_lr: float = 3e-5
    vocoder_steps: int | None = None
    vocoder_lr: float | None = None
    attention_penalty_weight: float = 1.0


def adaptation_schedule(config: AdaptationConfig = AdaptationConfig()) -> list[StageManifest]:
    """The ordered stage list: base train, decoder adapt, vocoder adapt."""
    assumptions = []
    if config.vocoder_steps is None:
        assumptions.append("vocoder steps mirror the decoder adaptation stage")
    if config.vocoder_lr is None:
        assumptions.append("vocoder learning rate mirrors the decoder adaptation stage")
    return [
        StageManifest(
            stage=Stage.BASE_TRAIN,
            frozen=STAGE_FROZEN[Stage.BASE_TRAIN],
            steps=config.base_steps,
            learning_rate=config.base_lr,
            attention_penalty_enabled=False,
            lr_policy=config.base_lr_policy,
        ),
        StageManifest(
            stage=Stage.DECODER_ADAPT,
            frozen=STAGE_FROZEN[Stage.DECODER_ADAPT],
            steps=config.decoder_steps,
            learning_rate=config.decoder_lr,
            attention_penalty_enabled=True,
            attention_penalty_weight=config.attention_penalty_weight,
        ),
        StageManifest(
            stage=Stage.VOCODER_ADAPT,
            frozen=STAGE_FROZEN[Stage.VOCODER_ADAPT],
            steps=config.vocoder_steps if config.vocoder_steps is not None else config.decoder_steps,
            learning_rate=config.vocoder_lr if config.vocoder_lr is not None else config.decoder_lr,
            attention_penalty_enabled=False,
            assumptions=tuple(assumptions),
        ),
    ]


def balanced_batches(
    records: list[UtteranceRecord], batch_size: int, seed: int
) -> list[list[UtteranceRecord]]:
    """Batches whose per-speaker counts differ by at most one.

    Speakers with the most remaining records receive the remainder slots, so
    full batches keep coming as long as every speaker can meet its quota.
    Whatever is left afterwards is emitted in trailing batches strictly
    smaller than ``batch_size`` (normally a single partial batch); no record
    is ever used twice.
    """
    if not records:
        raise ValueError("need at least one speaker with records")
    if batch_size < 1:
        raise ValueError(f"batch size must be positive, got {batch_size}")
    rng = random.Random(seed)
    queues: dict[str, list[UtteranceRecord]] = {}
    for record in records:
        queues.setdefault(record.speaker, []).append(record)
    speakers = sorted(queues)
    for speaker in speakers:
        rng.shuffle(queues[speaker])

    base, extra = divmod(batch_size, len(speakers))
    batches: list[list[UtteranceRecord]] = []
    while True:
        by_remaining = sorted(speakers, key=lambda s: (-len(queues[s]), s))
        quotas = {s: base for s in speakers}
        for s in by_remaining[:extra]:
            quotas[s] += 1
        if any(len(queues[s]) < quotas[s] for s in speakers):
            break
        batch = []
        for s in speakers:
            for _ in range(quotas[s]):
                batch.append(queues[s].pop())
        rng.shuffle(batch)
        batches.append(batch)

    leftover = [record for s in speakers for record in queues[s]]
    rng.shuffle(leftover)
    chunk = batch_size - 1
    while leftover:
        batches.append(leftover[:chunk])
        leftover = leftover[chunk:]
    return batches


def split_adaptation_set(
    records: list[UtteranceRecord], test_fraction: float, seed: int
) -> tuple[list[UtteranceRecord], list[UtteranceRecord]]:
    """Disjoint (adaptation, test) split; the test size is round-half-to-even."""
    if not 0.0 < test_fraction < 1.0:
        raise ValueError(f"test fraction must be in (0, 1), got {test_fraction}")
    if len(records) < 2:
        raise ValueError(f"need at least 2 records to split, got {len(records)}")
    shuffled = list(records)
    random.Random(seed).shuffle(shuffled)
    n_test = round(test_fraction * len(records))
    return shuffled[n_test:], shuffled[:n_test]


def write_records(path: str | Path, records: list[UtteranceRecord]) -> None:
    """Records manifest: JSON-lines, one utterance per line."""
    with open(path, "w", encoding="utf-8") as f:
        for r in records:
            f.write(json.dumps({
                "id": r.id,
                "speaker": r.speaker,
                "duration": r.duration,
                "transcript": r.transcript,
                "audio_path": r.audio_path,
            }) + "\n")


def read_records(path: str | Path) -> list[UtteranceRecord]:
    records = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            data = json.loads(line)
            records.append(UtteranceRecord(
                id=data["id"],
                speaker=data["speaker"],
                duration=float(data["duration"]),
                transcript=data["transcript"],
                audio_path=data["audio_path"],
            ))
        except (KeyError, ValueError, json.JSONDecodeError) as exc:
            raise ValueError(f"{path}:{lineno}: bad record ({exc})") from exc
    return records


def write_schedule(path: str | Path, schedule: list[StageManifest]) -> None:
    payload = [m.to_dict() for m in schedule]
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")

"""Model adapters: external-process contracts plus deterministic in-tree stubs.

Neural inference (translation, TTS, lip generation, speaker embedding, frame
extraction) happens behind file-based adapters.  Stubs make the whole
pipeline runnable and byte-reproducible with no models: the TTS stub emits
0.1 s of silence per token plus a valid mel, the lip-generation stub passes
plan-applied frames through, translation is identity, and embeddings are
hash-derived.
"""

from __future__ import annotations

import hashlib
import shlex
import shutil
import subprocess
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from . import matio
from .audio_io import read_wav, write_wav
from .frontend import parse_token_dump
from .frameplan import frame_filename, list_frame_files
from .mel import MelConfig, mel_spectrogram, write_mel
from .metrics import EMBEDDING_DIM

STUB_INVOCATION = "stub"
SILENCE_SECONDS_PER_TOKEN = 0.1


class AdapterKind(Enum):
    TRANSLATION = "translation"
    TTS = "tts"
    LIP_GEN = "lip_gen"
    EMBEDDING = "embedding"
    FRAME_EXTRACT = "frame_extract"


class AdapterError(RuntimeError):
    """Failure inside an adapter, tagged with the pipeline stage and slide."""

    def __init__(self, stage: str, slide_id: str | None, message: str):
        self.stage = stage
        self.slide_id = slide_id
        where = f"stage {stage}" + (f", slide {slide_id!r}" if slide_id else "")
        super().__init__(f"{where}: {message}")


@dataclass(frozen=True)
class AdapterContract:
    """Declared adapter: a stub name or an external command template.

    Command templates are split with shell quoting rules and receive
    ``{input}``/``{output}`` (and ``{mel}`` for lip generation) per argument.
    ``io`` records the declared file formats for auditing.
    """

    kind: AdapterKind
    invocation: str = STUB_INVOCATION
    io: dict = field(default_factory=dict)


def default_contracts() -> dict[AdapterKind, AdapterContract]:
    return {kind: AdapterContract(kind=kind) for kind in AdapterKind}


def _run_command(template: str, substitutions: dict, stage: str, slide_id: str | None):
    argv = [arg.format_map(substitutions) for arg in shlex.split(template)]
    try:
        proc = subprocess.run(argv, capture_output=True, text=True)
    except OSError as exc:
        raise AdapterError(stage, slide_id, f"cannot launch {argv[0]!r}: {exc}") from exc
    if proc.returncode != 0:
        tail = proc.stderr.strip().splitlines()[-1:] or ["(no stderr)"]
        raise AdapterError(
            stage, slide_id, f"{argv[0]} exited {proc.returncode}: {tail[0]}"
        )


class TranslationStub:
    """Identity translation."""

    def run(self, in_text: Path, out_text: Path, slide_id: str | None = None) -> None:
        out_text.write_bytes(Path(in_text).read_bytes())


class TranslationExternal:
    def __init__(self, command: str):
        self.command = command

    def run(self, in_text: Path, out_text: Path, slide_id: str | None = None) -> None:
        _run_command(
            self.command,
            {"input": str(in_text), "output": str(out_text)},
            "translation",
            slide_id,
        )
        if not Path(out_text).exists():
            raise AdapterError("translation", slide_id, f"no output at {out_text}")


class TtsStub:
    """Silence synthesis: 0.1 s per token, plus a valid mel next to the wav."""

    def __init__(self, mel_config: MelConfig):
        self.mel_config = mel_config

    def run(self, in_tokens: Path, out_wav: Path, slide_id: str | None = None) -> None:
        tokens = parse_token_dump(Path(in_tokens).read_text(encoding="utf-8"))
        if not tokens:
            raise AdapterError("tts", slide_id, "token sequence is empty")
        sr = self.mel_config.sample_rate
        samples_per_token = int(sr * SILENCE_SECONDS_PER_TOKEN)
        samples = np.zeros(samples_per_token * len(tokens), dtype=np.float32)
        write_wav(out_wav, samples, sr)
        mel = mel_spectrogram(read_wav(out_wav), self.mel_config)
        write_mel(mel_path_for(out_wav), mel)


class TtsExternal:
    def __init__(self, command: str):
        self.command = command

    def run(self, in_tokens: Path, out_wav: Path, slide_id: str | None = None) -> None:
        _run_command(
            self.command,
            {"input": str(in_tokens), "output": str(out_wav)},
            "tts",
            slide_id,
        )
        if not Path(out_wav).exists():
            raise AdapterError("tts", slide_id, f"no output at {out_wav}")


class LipGenStub:
    """Copies plan-applied frames through unchanged."""

    def run(
        self,
        in_frames: Path,
        in_mel: Path,
        out_frames: Path,
        slide_id: str | None = None,
    ) -> None:
        out_frames = Path(out_frames)
        out_frames.mkdir(parents=True, exist_ok=True)
        for i, source in enumerate(list_frame_files(in_frames)):
            shutil.copyfile(source, out_frames / frame_filename(i))


class LipGenExternal:
    def __init__(self, command: str):
        self.command = command

    def run(self, in_frames, in_mel, out_frames, slide_id=None) -> None:
        Path(out_frames).mkdir(parents=True, exist_ok=True)
        _run_command(
            self.command,
            {"input": str(in_frames), "mel": str(in_mel), "output": str(out_frames)},
            "lip_gen",
            slide_id,
        )


class EmbeddingStub:
    """Deterministic 256-dim vector derived from the audio bytes by hashing."""

    def run(self, in_wav: Path, out_emb: Path, slide_id: str | None = None) -> None:
        data = Path(in_wav).read_bytes()
        values: list[float] = []
        counter = 0
        while len(values) < EMBEDDING_DIM:
            digest = hashlib.sha256(data + counter.to_bytes(4, "little")).digest()
            for off in range(0, 32, 4):
                word = int.from_bytes(digest[off : off + 4], "little")
                values.append(word / 2**31 - 1.0)
            counter += 1
        vector = np.array(values[:EMBEDDING_DIM], dtype=np.float32)
        if not vector.any():
            vector[0] = 1.0
        matio.write_embedding(out_emb, vector)


class EmbeddingExternal:
    def __init__(self, command: str):
        self.command = command

    def run(self, in_wav, out_emb, slide_id=None) -> None:
        _run_command(
            self.command,
            {"input": str(in_wav), "output": str(out_emb)},
            "embedding",
            slide_id,
        )


class FrameExtractStub:
    """Reference video arrives as a pre-extracted frames directory."""

    def run(self, source: Path, out_dir: Path | None = None) -> Path:
        files = list_frame_files(source)
        if len(files) < 2:
            raise AdapterError(
                "frame_extract", None, f"{source}: need at least 2 reference frames"
            )
        return Path(source)


class FrameExtractExternal:
    def __init__(self, command: str):
        self.command = command

    def run(self, source: Path, out_dir: Path | None = None) -> Path:
        if out_dir is None:
            raise AdapterError("frame_extract", None, "external extraction needs an output dir")
        Path(out_dir).mkdir(parents=True, exist_ok=True)
        _run_command(
            self.command,
            {"input": str(source), "output": str(out_dir)},
            "frame_extract",
            None,
        )
        return Path(out_dir)


_STUBS = {
    AdapterKind.TRANSLATION: lambda mel_config: TranslationStub(),
    AdapterKind.TTS: lambda mel_config: TtsStub(mel_config),
    AdapterKind.LIP_GEN: lambda mel_config: LipGenStub(),
    AdapterKind.EMBEDDING: lambda mel_config: EmbeddingStub(),
    AdapterKind.FRAME_EXTRACT: lambda mel_config: FrameExtractStub(),
}

_EXTERNALS = {
    AdapterKind.TRANSLATION: TranslationExternal,
    AdapterKind.TTS: TtsExternal,
    AdapterKind.LIP_GEN: LipGenExternal,
    AdapterKind.EMBEDDING: EmbeddingExternal,
    AdapterKind.FRAME_EXTRACT: FrameExtractExternal,
}


def build_adapter(contract: AdapterContract, mel_config: MelConfig):
    """Instantiate a stub or external wrapper, checking declared formats.

    A contract declaring ``mel_sidecar`` io must match the pipeline's mel
    configuration; mismatches are rejected up front instead of at read time.
    """
    declared = contract.io.get("mel_sidecar")
    if declared is not None and declared != mel_config.sidecar():
        raise ValueError(
            f"{contract.kind.value} adapter declares a mel sidecar that does not "
            f"match the pipeline mel configuration"
        )
    if contract.invocation == STUB_INVOCATION:
        return _STUBS[contract.kind](mel_config)
    return _EXTERNALS[contract.kind](contract.invocation)


def mel_path_for(wav_path: str | Path) -> Path:
    return Path(f"{wav_path}.mel")

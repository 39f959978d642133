"""End-to-end orchestration: deck in, timeline manifest out.

Per slide: normalize the annotation, translate when a different target
language is set, encode to mixed tokens, synthesize audio through the TTS
adapter, validate or compute the mel, build a frame plan sized to the audio,
run lip generation, and record a manifest entry.  All randomness derives
from the run seed xor a stable per-slide hash, so slide-level parallelism
cannot change any output byte.
"""

from __future__ import annotations

import json
import shlex
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .adapters import (
    AdapterContract,
    AdapterKind,
    build_adapter,
    default_contracts,
    mel_path_for,
)
from .audio_io import read_wav
from .deck import SlideDeck
from .frameplan import (
    AugmentParams,
    apply_plan,
    frame_filename,
    list_frame_files,
    plan,
    read_plan,
    write_plan,
)
from .frontend import encode_infer, format_token_dump, load_lexicon
from .mel import MelConfig, mel_spectrogram, read_mel, validate_sidecar, write_mel
from .textnorm import load_abbreviations, normalize

DEFAULT_FPS = 25.0


class PipelineError(ValueError):
    pass


@dataclass
class PipelineConfig:
    lexicon_path: str
    reference_frames: str
    fps: float = DEFAULT_FPS
    constrain_ratio: float = 0.2
    workers: int = 1
    media_tool: str = "ffmpeg"
    abbreviations_path: str | None = None
    mel: MelConfig = field(default_factory=MelConfig)
    adapters: dict[AdapterKind, AdapterContract] = field(default_factory=default_contracts)

    def __post_init__(self):
        if self.fps <= 0:
            raise PipelineError(f"fps must be positive, got {self.fps}")
        if self.workers < 1:
            raise PipelineError(f"workers must be >= 1, got {self.workers}")


def load_config(path: str | Path) -> PipelineConfig:
    """Read a TOML or JSON config with per-module sections."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".toml":
        try:
            import tomllib as toml_reader  # Python >= 3.11
        except ModuleNotFoundError:
            import tomli as toml_reader
        data = toml_reader.loads(text)
    else:
        data = json.loads(text)
    return config_from_dict(data, source=str(path))


def config_from_dict(data: dict, source: str = "<config>") -> PipelineConfig:
    pipeline = data.get("pipeline", {})
    frontend = data.get("frontend", {})
    textnorm = data.get("textnorm", {})
    video = data.get("video", {})
    mel_section = data.get("mel", {})
    lexicon_path = frontend.get("lexicon")
    if not lexicon_path:
        raise PipelineError(f"{source}: missing frontend.lexicon")
    reference = video.get("reference_frames")
    if not reference:
        raise PipelineError(f"{source}: missing video.reference_frames")
    try:
        mel_config = MelConfig(**mel_section)
    except TypeError as exc:
        raise PipelineError(f"{source}: bad mel section ({exc})") from exc
    adapters = default_contracts()
    for name, spec in data.get("adapters", {}).items():
        try:
            kind = AdapterKind(name)
        except ValueError as exc:
            raise PipelineError(f"{source}: unknown adapter kind {name!r}") from exc
        if isinstance(spec, str):
            adapters[kind] = AdapterContract(kind=kind, invocation=spec)
        elif isinstance(spec, dict):
            adapters[kind] = AdapterContract(
                kind=kind,
                invocation=spec.get("invocation", "stub"),
                io=spec.get("io", {}),
            )
        else:
            raise PipelineError(f"{source}: adapter {name!r} must be a string or table")
    return PipelineConfig(
        lexicon_path=lexicon_path,
        reference_frames=reference,
        fps=pipeline.get("fps", DEFAULT_FPS),
        constrain_ratio=video.get("constrain_ratio", 0.2),
        workers=pipeline.get("workers", 1),
        media_tool=pipeline.get("media_tool", "ffmpeg"),
        abbreviations_path=textnorm.get("abbreviations"),
        mel=mel_config,
        adapters=adapters,
    )


@dataclass(frozen=True)
class TimelineEntry:
    slide_id: str
    slide_asset: str
    audio_path: str
    audio_duration: float
    mel_path: str
    frame_plan_path: str
    talking_head_frames_path: str
    start_time: float

    def to_dict(self) -> dict:
        return {
            "slide_id": self.slide_id,
            "slide_asset": self.slide_asset,
            "audio_path": self.audio_path,
            "audio_duration": self.audio_duration,
            "mel_path": self.mel_path,
            "frame_plan_path": self.frame_plan_path,
            "talking_head_frames_path": self.talking_head_frames_path,
            "start_time": self.start_time,
        }


@dataclass(frozen=True)
class TimelineManifest:
    fps: float
    total_duration: float
    entries: tuple[TimelineEntry, ...]

    def to_dict(self) -> dict:
        return {
            "fps": self.fps,
            "total_duration": self.total_duration,
            "entries": [e.to_dict() for e in self.entries],
        }


def write_manifest(path: str | Path, manifest: TimelineManifest) -> None:
    Path(path).write_text(
        json.dumps(manifest.to_dict(), indent=2) + "\n", encoding="utf-8"
    )


def read_manifest(path: str | Path) -> TimelineManifest:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    entries = tuple(TimelineEntry(**entry) for entry in data["entries"])
    return TimelineManifest(
        fps=data["fps"], total_duration=data["total_duration"], entries=entries
    )


def slide_seed(run_seed: int, slide_id: str) -> int:
    """Per-slide seed: run seed xor a platform-stable hash of the slide id."""
    return run_seed ^ zlib.crc32(slide_id.encode("utf-8"))


def run_pipeline(
    deck: SlideDeck,
    config: PipelineConfig,
    seed: int,
    out_dir: str | Path,
) -> TimelineManifest:
    if not deck.slides:
        raise PipelineError("empty deck")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    lexicon = load_lexicon(config.lexicon_path)
    abbreviations = (
        load_abbreviations(config.abbreviations_path)
        if config.abbreviations_path
        else None
    )
    translate = build_adapter(config.adapters[AdapterKind.TRANSLATION], config.mel)
    tts = build_adapter(config.adapters[AdapterKind.TTS], config.mel)
    lip_gen = build_adapter(config.adapters[AdapterKind.LIP_GEN], config.mel)
    frame_extract = build_adapter(config.adapters[AdapterKind.FRAME_EXTRACT], config.mel)

    frames_dir = frame_extract.run(Path(config.reference_frames), out_dir / "reference")
    reference_files = list_frame_files(frames_dir)
    reference_payloads = [f.read_bytes() for f in reference_files]
    ref_len = len(reference_payloads)
    if ref_len < 2 or config.constrain_ratio * ref_len < 1.0:
        raise PipelineError(
            f"reference video of {ref_len} frames is too short for "
            f"constrain ratio {config.constrain_ratio}"
        )

    translation_enabled = (
        deck.target_language is not None and deck.target_language != deck.language
    )

    def rel(path: Path) -> str:
        return path.relative_to(out_dir).as_posix()

    def process_slide(slide) -> tuple[TimelineEntry, float]:
        slide_dir = out_dir / "slides" / slide.slide_id
        slide_dir.mkdir(parents=True, exist_ok=True)

        normalized = normalize(slide.annotation, abbreviations)
        text = normalized.text
        if translation_enabled:
            source_txt = slide_dir / "text_source.txt"
            translated_txt = slide_dir / "text_translated.txt"
            source_txt.write_text(text, encoding="utf-8")
            translate.run(source_txt, translated_txt, slide_id=slide.slide_id)
            text = translated_txt.read_text(encoding="utf-8")

        tokens = encode_infer(text, lexicon)
        if not tokens.tokens:
            raise PipelineError(
                f"slide {slide.slide_id!r}: annotation produced no tokens"
            )
        tokens_path = slide_dir / "tokens.txt"
        tokens_path.write_text(format_token_dump(tokens), encoding="utf-8")

        wav_path = slide_dir / "audio.wav"
        tts.run(tokens_path, wav_path, slide_id=slide.slide_id)
        waveform = read_wav(wav_path)
        duration = waveform.duration

        mel_path = slide_dir / "mel.bin"
        adapter_mel = mel_path_for(wav_path)
        if adapter_mel.exists():
            provided = read_mel(adapter_mel)
            validate_sidecar(provided.sidecar, config.mel)
            write_mel(mel_path, provided)
        else:
            write_mel(mel_path, mel_spectrogram(waveform, config.mel))

        n_frames = round(duration * config.fps)
        params = AugmentParams(
            ref_len=ref_len,
            target_len=n_frames,
            ratio=config.constrain_ratio,
            seed=slide_seed(seed, slide.slide_id),
        )
        frame_plan = plan(params)
        plan_path = slide_dir / "plan.json"
        write_plan(plan_path, frame_plan)

        applied_dir = slide_dir / "applied"
        applied_dir.mkdir(exist_ok=True)
        for i, payload in enumerate(apply_plan(frame_plan, reference_payloads)):
            (applied_dir / frame_filename(i)).write_bytes(payload)

        head_dir = slide_dir / "frames"
        lip_gen.run(applied_dir, mel_path, head_dir, slide_id=slide.slide_id)

        entry = TimelineEntry(
            slide_id=slide.slide_id,
            slide_asset=slide.asset_path,
            audio_path=rel(wav_path),
            audio_duration=duration,
            mel_path=rel(mel_path),
            frame_plan_path=rel(plan_path),
            talking_head_frames_path=rel(head_dir),
            start_time=0.0,  # assigned after all slides are done
        )
        return entry, duration

    if config.workers == 1:
        results = [process_slide(slide) for slide in deck.slides]
    else:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(process_slide, deck.slides))

    entries = []
    clock = 0.0
    for entry, duration in results:
        entries.append(
            TimelineEntry(**{**entry.to_dict(), "start_time": clock})
        )
        clock += duration
    manifest = TimelineManifest(
        fps=config.fps, total_duration=clock, entries=tuple(entries)
    )
    write_manifest(out_dir / "manifest.json", manifest)
    return manifest


def validate_manifest(manifest: TimelineManifest, root: str | Path) -> None:
    """Check timeline invariants: contiguity, duration additivity, plan sizing."""
    root = Path(root)
    clock = 0.0
    for entry in manifest.entries:
        if abs(entry.start_time - clock) > 1e-6:
            raise PipelineError(
                f"slide {entry.slide_id!r}: start time {entry.start_time} is not "
                f"contiguous with running total {clock}"
            )
        clock += entry.audio_duration
        frame_plan = read_plan(root / entry.frame_plan_path)
        expected = round(entry.audio_duration * manifest.fps)
        if len(frame_plan.indices) != expected:
            raise PipelineError(
                f"slide {entry.slide_id!r}: plan length {len(frame_plan.indices)} "
                f"!= round(duration * fps) = {expected}"
            )
    if abs(clock - manifest.total_duration) > 1e-6:
        raise PipelineError(
            f"total duration {manifest.total_duration} != sum of entries {clock}"
        )


class LayoutError(ValueError):
    pass


@dataclass(frozen=True)
class CompositionLayout:
    """Where the talking head sits on the slide canvas, in pixels."""

    x: int
    y: int
    width: int
    height: int
    slide_width: int = 1920
    slide_height: int = 1080

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise LayoutError("overlay size must be positive")
        if self.x < 0 or self.y < 0:
            raise LayoutError(f"overlay position must be nonnegative, got ({self.x}, {self.y})")
        if self.x + self.width > self.slide_width or self.y + self.height > self.slide_height:
            raise LayoutError(
                f"overlay ({self.x}+{self.width}, {self.y}+{self.height}) exceeds "
                f"slide bounds {self.slide_width}x{self.slide_height}"
            )


def compose_command(
    manifest: TimelineManifest,
    layout: CompositionLayout,
    media_tool: str = "ffmpeg",
) -> str:
    """Emit a composition script: per slide one overlay and one mux command,
    then a single concatenation when there is more than one slide.

    The script is plain text, one argv-quoted command per line, fully
    determined by the manifest and layout.
    """
    lines = ["# lecture composition script: one command per line"]
    segments = []
    for entry in manifest.entries:
        seg_video = f"seg_{entry.slide_id}_video.mp4"
        seg_av = f"seg_{entry.slide_id}.mp4"
        overlay = [
            media_tool, "-y",
            "-loop", "1", "-framerate", f"{manifest.fps:g}", "-i", entry.slide_asset,
            "-framerate", f"{manifest.fps:g}", "-i",
            f"{entry.talking_head_frames_path}/frame_%06d.png",
            "-filter_complex",
            f"[1:v]scale={layout.width}:{layout.height}[head];"
            f"[0:v][head]overlay={layout.x}:{layout.y}",
            "-t", f"{entry.audio_duration:.6f}",
            seg_video,
        ]
        mux = [
            media_tool, "-y", "-i", seg_video, "-i", entry.audio_path,
            "-c:v", "copy", "-shortest", seg_av,
        ]
        lines.append(shlex.join(overlay))
        lines.append(shlex.join(mux))
        segments.append(seg_av)
    if len(segments) > 1:
        concat = [media_tool, "-y"]
        for seg in segments:
            concat += ["-i", seg]
        concat += [
            "-filter_complex",
            f"concat=n={len(segments)}:v=1:a=1",
            "lecture.mp4",
        ]
        lines.append(shlex.join(concat))
    return "\n".join(lines) + "\n"

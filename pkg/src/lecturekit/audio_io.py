"""Minimal RIFF WAVE reader/writer: mono PCM 16-bit or IEEE float 32-bit."""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .mel import Waveform

_PCM16 = 1
_FLOAT32 = 3


def write_wav(
    path: str | Path,
    samples: np.ndarray,
    sample_rate: int,
    encoding: str = "pcm16",
) -> None:
    samples = np.asarray(samples, dtype=np.float64)
    if samples.ndim != 1:
        raise ValueError(f"expected mono samples, got shape {samples.shape}")
    if encoding == "pcm16":
        fmt, bits = _PCM16, 16
        payload = np.clip(np.round(samples * 32767.0), -32768, 32767).astype("<i2").tobytes()
    elif encoding == "float32":
        fmt, bits = _FLOAT32, 32
        payload = samples.astype("<f4").tobytes()
    else:
        raise ValueError(f"unsupported encoding {encoding!r}")
    block_align = bits // 8
    header = b"".join(
        [
            b"RIFF",
            struct.pack("<I", 36 + len(payload)),
            b"WAVE",
            b"fmt ",
            struct.pack(
                "<IHHIIHH",
                16, fmt, 1, sample_rate,
                sample_rate * block_align, block_align, bits,
            ),
            b"data",
            struct.pack("<I", len(payload)),
        ]
    )
    Path(path).write_bytes(header + payload)


def read_wav(path: str | Path) -> Waveform:
    raw = Path(path).read_bytes()
    if len(raw) < 12 or raw[:4] != b"RIFF" or raw[8:12] != b"WAVE":
        raise ValueError(f"{path}: not a RIFF WAVE file")
    fmt_chunk = None
    data = None
    offset = 12
    while offset + 8 <= len(raw):
        chunk_id = raw[offset : offset + 4]
        (size,) = struct.unpack_from("<I", raw, offset + 4)
        body = raw[offset + 8 : offset + 8 + size]
        if chunk_id == b"fmt ":
            fmt_chunk = body
        elif chunk_id == b"data":
            data = body
        offset += 8 + size + (size & 1)  # chunks are word-aligned
    if fmt_chunk is None or data is None:
        raise ValueError(f"{path}: missing fmt or data chunk")
    fmt, channels, sample_rate, _, _, bits = struct.unpack_from("<HHIIHH", fmt_chunk)
    if channels != 1:
        raise ValueError(f"{path}: only mono audio is supported, got {channels} channels")
    if fmt == _PCM16 and bits == 16:
        samples = np.frombuffer(data, dtype="<i2").astype(np.float32) / 32768.0
    elif fmt == _FLOAT32 and bits == 32:
        samples = np.frombuffer(data, dtype="<f4").astype(np.float32)
    else:
        raise ValueError(
            f"{path}: unsupported format (tag {fmt}, {bits}-bit); "
            "expected PCM 16-bit or float 32-bit"
        )
    return Waveform(samples=samples, sample_rate=sample_rate)

"""Log-mel spectrograms: the interchange between speech synthesis and lip generation.

Frames start at sample 0 with no center padding, so the frame count is exactly
``1 + (len - win) // hop``.  Magnitudes are floored before the natural log, so
silence maps to a constant ``log(floor)`` and doubling the amplitude shifts
every above-floor entry by ``log 2``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import matio


@dataclass(frozen=True)
class MelConfig:
    """Analysis parameters.  Defaults: 80 mel bands over 0-8 kHz at 16 kHz,
    50 ms Hann window, 12.5 ms hop, magnitude floor 1e-5 before the log."""

    sample_rate: int = 16000
    n_fft: int = 1024
    win_length: int = 800
    hop_length: int = 200
    n_mels: int = 80
    fmin: float = 0.0
    fmax: float = 8000.0
    floor: float = 1e-5

    def __post_init__(self):
        if self.sample_rate <= 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")
        if self.hop_length <= 0 or self.win_length <= 0:
            raise ValueError("win_length and hop_length must be positive")
        if self.win_length > self.n_fft:
            raise ValueError(
                f"win_length {self.win_length} exceeds n_fft {self.n_fft}"
            )
        if not 0 <= self.fmin < self.fmax <= self.sample_rate / 2:
            raise ValueError(
                f"need 0 <= fmin < fmax <= sample_rate/2, got "
                f"fmin={self.fmin}, fmax={self.fmax}, sample_rate={self.sample_rate}"
            )
        if self.n_mels < 1:
            raise ValueError(f"n_mels must be >= 1, got {self.n_mels}")
        if self.floor <= 0:
            raise ValueError(f"floor must be positive, got {self.floor}")

    @property
    def log_floor(self) -> float:
        return math.log(self.floor)

    def sidecar(self) -> dict:
        return {
            "sample_rate": self.sample_rate,
            "hop": self.hop_length,
            "win": self.win_length,
            "n_fft": self.n_fft,
            "bands": self.n_mels,
            "log_floor": self.log_floor,
        }


DEFAULT_CONFIG = MelConfig()


@dataclass(frozen=True, eq=False)
class Waveform:
    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float32)
        if samples.ndim != 1:
            raise ValueError(f"waveform must be 1-D, got shape {samples.shape}")
        if self.sample_rate <= 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")
        if not np.all(np.isfinite(samples)):
            raise ValueError("waveform contains non-finite samples")
        object.__setattr__(self, "samples", samples)

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate


@dataclass(frozen=True, eq=False)
class MelSpectrogram:
    """F x B matrix of log-magnitudes plus the sidecar describing its analysis."""

    values: np.ndarray
    sidecar: dict


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(
    n_mels: int, n_fft: int, sample_rate: int, fmin: float, fmax: float
) -> np.ndarray:
    """Triangular filters on the mel scale, shape (n_mels, n_fft//2 + 1).

    Filter m rises from mel point m to m+1 and falls to m+2; peaks are left
    at height 1 (no area normalization).
    """
    if n_mels < 1:
        raise ValueError(f"n_mels must be >= 1, got {n_mels}")
    if n_fft < 2:
        raise ValueError(f"n_fft must be >= 2, got {n_fft}")
    if sample_rate <= 0:
        raise ValueError(f"sample_rate must be positive, got {sample_rate}")
    if not 0 <= fmin < fmax <= sample_rate / 2:
        raise ValueError(
            f"need 0 <= fmin < fmax <= sample_rate/2, got fmin={fmin}, fmax={fmax}"
        )
    n_bins = n_fft // 2 + 1
    fft_freqs = np.linspace(0.0, sample_rate / 2.0, n_bins)
    hz_points = mel_to_hz(np.linspace(hz_to_mel(fmin), hz_to_mel(fmax), n_mels + 2))
    weights = np.zeros((n_mels, n_bins), dtype=np.float64)
    for m in range(n_mels):
        lower, center, upper = hz_points[m], hz_points[m + 1], hz_points[m + 2]
        rising = (fft_freqs - lower) / (center - lower)
        falling = (upper - fft_freqs) / (upper - center)
        weights[m] = np.maximum(0.0, np.minimum(rising, falling))
    return weights


def band_centers(config: MelConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Center frequency in Hz of each mel band."""
    pts = mel_to_hz(
        np.linspace(hz_to_mel(config.fmin), hz_to_mel(config.fmax), config.n_mels + 2)
    )
    return pts[1:-1]


def frame_count(n_samples: int, win_length: int, hop_length: int) -> int:
    if n_samples < win_length:
        raise ValueError(
            f"waveform of {n_samples} samples is shorter than the window ({win_length})"
        )
    return 1 + (n_samples - win_length) // hop_length


def _hann(win_length: int) -> np.ndarray:
    i = np.arange(win_length, dtype=np.float64)
    return 0.5 - 0.5 * np.cos(2.0 * np.pi * i / win_length)


def mel_spectrogram(waveform: Waveform, config: MelConfig = DEFAULT_CONFIG) -> MelSpectrogram:
    """STFT magnitude -> mel filterbank projection -> floored natural log."""
    samples = waveform.samples.astype(np.float64)
    n_frames = frame_count(len(samples), config.win_length, config.hop_length)
    window = _hann(config.win_length)
    frames = np.stack(
        [
            samples[i * config.hop_length : i * config.hop_length + config.win_length]
            for i in range(n_frames)
        ]
    )
    spectrum = np.abs(np.fft.rfft(frames * window, n=config.n_fft, axis=1))
    fb = mel_filterbank(
        config.n_mels, config.n_fft, config.sample_rate, config.fmin, config.fmax
    )
    mel = spectrum @ fb.T
    values = np.log(np.maximum(mel, config.floor))
    return MelSpectrogram(values=values, sidecar=config.sidecar())


def write_mel(path: str | Path, mel: MelSpectrogram) -> None:
    """Binary matrix plus a `<path>.json` sidecar."""
    matio.write_matrix(path, mel.values)
    Path(f"{path}.json").write_text(
        json.dumps(mel.sidecar, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def read_mel(path: str | Path) -> MelSpectrogram:
    values = matio.read_matrix(path)
    sidecar_path = Path(f"{path}.json")
    if not sidecar_path.exists():
        raise ValueError(f"missing mel sidecar {sidecar_path}")
    sidecar = json.loads(sidecar_path.read_text(encoding="utf-8"))
    return MelSpectrogram(values=values, sidecar=sidecar)


def validate_sidecar(sidecar: dict, config: MelConfig) -> None:
    """Reject mels whose analysis parameters differ from the expected config."""
    expected = config.sidecar()
    mismatched = sorted(
        key
        for key in expected.keys() | sidecar.keys()
        if sidecar.get(key) != expected.get(key)
    )
    if mismatched:
        detail = ", ".join(
            f"{key}: got {sidecar.get(key)!r}, expected {expected.get(key)!r}"
            for key in mismatched
        )
        raise ValueError(f"mel sidecar mismatch: {detail}")

"""Gap-free frame-index plans for stretching a short reference portrait video.

A plan walks the source frame indices back and forth: the walk starts near
the beginning, runs to a randomly chosen end point near the end, reverses,
and picks a fresh turn point after every reversal.  Consecutive plan entries
always differ by exactly one source frame, so the looped video never jumps.

Turn points are constrained by a ratio ``r``: with ``m = ref_len - 1``,
walk starts and lower turns stay in ``[0, floor(r*m)]`` and upper turns in
``[ceil((1-r)*m), m]``.  Indices are 0-based; a reversal maps position ``j``
to ``m - j`` so the turning frame is emitted exactly once.
"""

from __future__ import annotations

import json
import math
import random
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

DEFAULT_CONSTRAIN_RATIO = 0.2
# Recommended ratio ranges: short reference videos vs long ones.
SHORT_REFERENCE_RATIO_RANGE = (0.1, 0.3)
LONG_REFERENCE_RATIO_RANGE = (0.1, 0.4)

FRAME_FILE_PATTERN = "frame_{:06d}.png"
_FRAME_FILE_RE = re.compile(r"frame_(\d{6})\.png$")


@dataclass(frozen=True)
class AugmentParams:
    """Plan parameters: reference length, target length, constrain ratio, seed."""

    ref_len: int
    target_len: int
    ratio: float = DEFAULT_CONSTRAIN_RATIO
    seed: int = 0

    def __post_init__(self):
        if self.ref_len < 2:
            raise ValueError(f"reference video needs at least 2 frames, got {self.ref_len}")
        if self.target_len < 0:
            raise ValueError(f"target length must be nonnegative, got {self.target_len}")
        if not 0.0 < self.ratio < 0.5:
            raise ValueError(f"constrain ratio must be in (0, 0.5), got {self.ratio}")
        if self.ratio * self.ref_len < 1.0:
            raise ValueError(
                f"constrain ratio {self.ratio} too small for {self.ref_len} frames "
                "(ratio * ref_len must be >= 1)"
            )

    @property
    def low_zone_max(self) -> int:
        return math.floor(self.ratio * (self.ref_len - 1))

    @property
    def high_zone_min(self) -> int:
        return math.ceil((1.0 - self.ratio) * (self.ref_len - 1))


@dataclass(frozen=True)
class FramePlan:
    ref_len: int
    target_len: int
    ratio: float
    seed: int
    indices: tuple[int, ...]


def plan(params: AugmentParams) -> FramePlan:
    """Build a deterministic gap-free frame plan of length ``target_len``.

    Equivalent to walking a repeatedly-reversed copy of the frame array, but
    implemented as a direction flip on indices so nothing is mutated.  Each
    sampled end point is resampled until it lies strictly above the current
    position.
    """
    rng = random.Random(params.seed)
    last = params.ref_len - 1
    high_min = params.high_zone_min

    def sample_end(current: int) -> int:
        end = rng.randint(high_min, last)
        while end <= current:
            end = rng.randint(high_min, last)
        return end

    pos = rng.randint(0, params.low_zone_max)  # walk coordinate in the current orientation
    end = sample_end(pos)
    flipped = False
    indices: list[int] = []
    while len(indices) < params.target_len:
        take = min(end - pos, params.target_len - len(indices))
        if flipped:
            start = last - pos
            indices.extend(range(start, start - take, -1))
        else:
            indices.extend(range(pos, pos + take))
        pos += take
        if pos == end:
            flipped = not flipped
            pos = last - pos
            end = sample_end(pos)
    return FramePlan(
        ref_len=params.ref_len,
        target_len=params.target_len,
        ratio=params.ratio,
        seed=params.seed,
        indices=tuple(indices),
    )


def apply_plan(frame_plan: FramePlan, frames):
    """Materialize a plan over frame payloads: output[i] = frames[indices[i]]."""
    if len(frames) != frame_plan.ref_len:
        raise ValueError(
            f"plan was built for {frame_plan.ref_len} frames, got {len(frames)}"
        )
    for position, index in enumerate(frame_plan.indices):
        if not 0 <= index < frame_plan.ref_len:
            raise ValueError(f"index {index} out of range at position {position}")
    return [frames[i] for i in frame_plan.indices]


def validate_plan(frame_plan: FramePlan, params: AugmentParams | None = None) -> list[str]:
    """Diagnostics for a plan; an empty list means the plan is valid.

    Reports length mismatches, out-of-range indices, any step whose delta is
    not exactly +/-1, and interior turning points outside their zones.
    """
    ref_len = params.ref_len if params else frame_plan.ref_len
    target_len = params.target_len if params else frame_plan.target_len
    ratio = params.ratio if params else frame_plan.ratio
    low_max = math.floor(ratio * (ref_len - 1))
    high_min = math.ceil((1.0 - ratio) * (ref_len - 1))

    diags: list[str] = []
    idx = np.asarray(frame_plan.indices, dtype=np.int64)
    if idx.size != target_len:
        diags.append(f"length {idx.size} != t_prime {target_len}")
    out = np.nonzero((idx < 0) | (idx >= ref_len))[0]
    for pos in out:
        diags.append(f"index {idx[pos]} out of range at position {pos}")
    if idx.size >= 2:
        deltas = np.diff(idx)
        for pos in np.nonzero(np.abs(deltas) != 1)[0]:
            diags.append(f"gap at position {pos + 1} (delta {deltas[pos]})")
    if idx.size >= 3:
        inner = idx[1:-1]
        rising = idx[:-2] < inner
        falling = inner > idx[2:]
        for pos in np.nonzero(rising & falling & (inner < high_min))[0]:
            diags.append(
                f"turn outside high zone at position {pos + 1} (index {inner[pos]})"
            )
        lower = (idx[:-2] > inner) & (inner < idx[2:])
        for pos in np.nonzero(lower & (inner > low_max))[0]:
            diags.append(
                f"turn outside low zone at position {pos + 1} (index {inner[pos]})"
            )
    return diags


def write_plan(path: str | Path, frame_plan: FramePlan) -> None:
    payload = {
        "t": frame_plan.ref_len,
        "t_prime": frame_plan.target_len,
        "r": frame_plan.ratio,
        "seed": frame_plan.seed,
        "indices": list(frame_plan.indices),
    }
    Path(path).write_text(json.dumps(payload) + "\n", encoding="utf-8")


def read_plan(path: str | Path) -> FramePlan:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    try:
        return FramePlan(
            ref_len=int(data["t"]),
            target_len=int(data["t_prime"]),
            ratio=float(data["r"]),
            seed=int(data["seed"]),
            indices=tuple(int(i) for i in data["indices"]),
        )
    except KeyError as exc:
        raise ValueError(f"{path}: plan file missing field {exc}") from exc


def frame_filename(index: int) -> str:
    return FRAME_FILE_PATTERN.format(index)


def list_frame_files(directory: str | Path) -> list[Path]:
    """Frame files of a directory in index order, validated as 0..n-1."""
    directory = Path(directory)
    if not directory.is_dir():
        raise ValueError(f"not a frames directory: {directory}")
    found = {}
    for entry in directory.iterdir():
        m = _FRAME_FILE_RE.fullmatch(entry.name)
        if m:
            found[int(m.group(1))] = entry
    if not found:
        raise ValueError(f"no frame_%06d.png files in {directory}")
    expected = range(len(found))
    if sorted(found) != list(expected):
        raise ValueError(f"{directory}: frame files are not contiguous from 000000")
    return [found[i] for i in expected]

"""Matrix, embedding, and plain-text exchange formats shared across the toolkit.

Binary matrix layout: little-endian header ``u32 rows, u32 cols`` followed by
``rows * cols`` 32-bit floats in row-major order.  Embedding files use a
``u32 dim`` header followed by ``dim`` 32-bit floats.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

_HEADER = struct.Struct("<II")


def write_matrix(path: str | Path, values: np.ndarray) -> None:
    m = np.asarray(values, dtype=np.float32)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {m.shape}")
    rows, cols = m.shape
    with open(path, "wb") as f:
        f.write(_HEADER.pack(rows, cols))
        f.write(np.ascontiguousarray(m).tobytes())


def read_matrix(path: str | Path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise ValueError(f"{path}: truncated matrix header")
    rows, cols = _HEADER.unpack_from(raw)
    expected = _HEADER.size + rows * cols * 4
    if len(raw) != expected:
        raise ValueError(f"{path}: expected {expected} bytes for {rows}x{cols}, got {len(raw)}")
    data = np.frombuffer(raw, dtype="<f4", offset=_HEADER.size)
    return data.reshape(rows, cols).copy()


def write_matrix_text(path: str | Path, values: np.ndarray) -> None:
    """Plain-text debug format: `rows cols` on the first line, one row per line."""
    m = np.asarray(values, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {m.shape}")
    lines = [f"{m.shape[0]} {m.shape[1]}"]
    for row in m:
        lines.append(" ".join(f"{v:.9g}" for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_matrix_text(path: str | Path) -> np.ndarray:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise ValueError(f"{path}: empty matrix file")
    try:
        rows, cols = (int(v) for v in lines[0].split())
    except ValueError as exc:
        raise ValueError(f"{path}: bad header line {lines[0]!r}") from exc
    if len(lines) != rows + 1:
        raise ValueError(f"{path}: expected {rows} rows, got {len(lines) - 1}")
    m = np.array([[float(v) for v in line.split()] for line in lines[1:]], dtype=np.float64)
    if m.size and m.shape != (rows, cols):
        raise ValueError(f"{path}: row width does not match header {rows}x{cols}")
    return m.reshape(rows, cols)


def write_embedding(path: str | Path, vector: np.ndarray) -> None:
    v = np.asarray(vector, dtype=np.float32)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got shape {v.shape}")
    with open(path, "wb") as f:
        f.write(struct.pack("<I", v.size))
        f.write(np.ascontiguousarray(v).tobytes())


def read_embedding(path: str | Path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if len(raw) < 4:
        raise ValueError(f"{path}: truncated embedding header")
    (dim,) = struct.unpack_from("<I", raw)
    if len(raw) != 4 + dim * 4:
        raise ValueError(f"{path}: expected {4 + dim * 4} bytes for dim {dim}, got {len(raw)}")
    return np.frombuffer(raw, dtype="<f4", offset=4).copy()

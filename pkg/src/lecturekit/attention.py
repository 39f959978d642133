"""Attention penalty matrix, penalty-weighted loss, and a diagonality diagnostic.

The penalty grows away from the locus where the normalized encoder position
equals the normalized decoder position, pushing attention toward a diagonal
alignment during adaptation.  Entries use 1-based normalized coordinates
``n/N`` and ``t/T`` so the exact diagonal is hit whenever one length divides
the other.
"""

from __future__ import annotations

import numpy as np

DEFAULT_SHARPNESS = 3.5
DEFAULT_LOSS_WEIGHT = 1.0


def penalty_matrix(n_enc: int, n_dec: int, sharpness: float = DEFAULT_SHARPNESS) -> np.ndarray:
    """Penalty value ``1 - exp(-sharpness^2 * (n/N - t/T)^2)`` on an N x T grid.

    Rows index encoder positions n in 1..N, columns decoder steps t in 1..T.
    Values lie in [0, 1) and vanish exactly where n/N == t/T.
    """
    if n_enc < 1 or n_dec < 1:
        raise ValueError(f"matrix dimensions must be positive, got {n_enc}x{n_dec}")
    if sharpness <= 0:
        raise ValueError(f"sharpness must be positive, got {sharpness}")
    n = np.arange(1, n_enc + 1, dtype=np.float64)[:, None] / n_enc
    t = np.arange(1, n_dec + 1, dtype=np.float64)[None, :] / n_dec
    return 1.0 - np.exp(-(sharpness**2) * (n - t) ** 2)


def attention_loss(
    attention: np.ndarray,
    penalty: np.ndarray,
    weight: float = DEFAULT_LOSS_WEIGHT,
) -> float:
    """Mean elementwise product of attention weights and penalty values.

    The mean reduction keeps the magnitude independent of sequence lengths so
    the term composes with other losses; ``weight`` rescales it.  Zero iff all
    attention mass sits on the zero-penalty locus.
    """
    att = np.asarray(attention, dtype=np.float64)
    pen = np.asarray(penalty, dtype=np.float64)
    if att.shape != pen.shape:
        raise ValueError(f"shape mismatch: attention {att.shape} vs penalty {pen.shape}")
    return weight * float(np.mean(att * pen))


def diagonality_score(attention: np.ndarray) -> float:
    """How diagonal an attention matrix is, in [0, 1].

    Per decoder step the attention column is a distribution over encoder
    positions; its expected normalized distance |n/N - t/T| is averaged over
    columns and scaled by the worst achievable average for the same shape.
    1.0 means all mass on the diagonal locus, 0.0 the farthest possible drift.
    """
    att = np.asarray(attention, dtype=np.float64)
    n_enc, n_dec = att.shape
    n = np.arange(1, n_enc + 1, dtype=np.float64)[:, None] / n_enc
    t = np.arange(1, n_dec + 1, dtype=np.float64)[None, :] / n_dec
    distance = np.abs(n - t)
    expected = np.sum(att * distance, axis=0)
    worst = distance.max(axis=0)
    if worst.mean() == 0.0:
        return 1.0
    return 1.0 - float(expected.mean() / worst.mean())


def validate_attention(attention: np.ndarray, tol: float = 1e-6) -> None:
    """Check attention-matrix invariants: nonnegative, columns sum to one."""
    att = np.asarray(attention, dtype=np.float64)
    if att.ndim != 2:
        raise ValueError(f"attention must be 2-D, got shape {att.shape}")
    if np.any(att < 0):
        raise ValueError("attention weights must be nonnegative")
    sums = att.sum(axis=0)
    bad = np.nonzero(np.abs(sums - 1.0) > tol)[0]
    if bad.size:
        raise ValueError(
            f"attention columns must sum to 1 within {tol}: "
            f"column {bad[0]} sums to {sums[bad[0]]:.8f}"
        )

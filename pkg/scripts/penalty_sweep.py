#!/usr/bin/env python3
"""Show how the attention penalty separates good and bad alignments as the
sharpness parameter grows: loss for a perfect diagonal, a slightly wandering
diagonal, uniform attention, and attention stuck on one encoder position.

Usage: python scripts/penalty_sweep.py [--n 64] [--t 128]
"""

import argparse
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from lecturekit.attention import attention_loss, diagonality_score, penalty_matrix


def diagonal(n_enc, n_dec):
    att = np.zeros((n_enc, n_dec))
    for t in range(n_dec):
        att[min(int(round(t * n_enc / n_dec)), n_enc - 1), t] = 1.0
    return att


def wandering(n_enc, n_dec, seed=0):
    rng = np.random.default_rng(seed)
    att = np.zeros((n_enc, n_dec))
    for t in range(n_dec):
        center = int(round(t * n_enc / n_dec)) + rng.integers(-2, 3)
        att[min(max(center, 0), n_enc - 1), t] = 1.0
    return att


def stuck(n_enc, n_dec):
    att = np.zeros((n_enc, n_dec))
    att[-1, :] = 1.0
    return att


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=64, help="encoder length")
    parser.add_argument("--t", type=int, default=128, help="decoder length")
    args = parser.parse_args()

    cases = {
        "diagonal": diagonal(args.n, args.t),
        "wandering": wandering(args.n, args.t),
        "uniform": np.full((args.n, args.t), 1.0 / args.n),
        "stuck": stuck(args.n, args.t),
    }
    print("diagonality scores:")
    for name, att in cases.items():
        print(f"  {name:>9}: {diagonality_score(att):.4f}")

    header = "  ".join(f"{name:>10}" for name in cases)
    print(f"\n{'k':>5}  {header}")
    for sharpness in (0.5, 1.0, 2.0, 3.5, 5.0, 8.0):
        pen = penalty_matrix(args.n, args.t, sharpness)
        losses = "  ".join(f"{attention_loss(att, pen):10.6f}" for att in cases.values())
        print(f"{sharpness:5.1f}  {losses}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

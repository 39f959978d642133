#!/usr/bin/env python3
"""Measure the realized phoneme-replacement rate of the training front-end
as the replacement probability sweeps 0.0 .. 1.0, over a large sampled corpus.

Usage: python scripts/replacement_rate_sweep.py [--words 20000] [--seed 0]
"""

import argparse
import random
import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from lecturekit.frontend import TokenKind, encode_train, load_lexicon

LEXICON = """\
HELLO  HH AH0 L OW1
WORLD  W ER1 L D
THE  DH AH0
AND  AE1 N D
LECTURE  L EH1 K CH ER0
VIDEO  V IH1 D IY0 OW0
SPEECH  S P IY1 CH
MODEL  M AA1 D AH0 L
TEACHER  T IY1 CH ER0
STUDENT  S T UW1 D AH0 N T
"""


def word_kinds(seq):
    kinds = []
    current = None
    for tok in seq.tokens:
        if tok.kind is TokenKind.WORD_BOUNDARY:
            current = None
        elif current is None:
            kinds.append(tok.kind)
            current = tok.kind
    return kinds


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--words", type=int, default=20000)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    with tempfile.TemporaryDirectory() as tmp:
        lex_path = Path(tmp) / "lexicon.txt"
        lex_path.write_text(LEXICON, encoding="utf-8")
        lexicon = load_lexicon(lex_path)

    rng = random.Random(args.seed)
    vocabulary = sorted(lexicon.entries)
    text = " ".join(rng.choice(vocabulary) for _ in range(args.words))

    print(f"{'p':>5}  {'replaced':>9}  {'rate':>7}")
    for step in range(11):
        p = step / 10.0
        kinds = word_kinds(encode_train(text, lexicon, p=p, seed=args.seed))
        replaced = kinds.count(TokenKind.PHONEME)
        print(f"{p:5.1f}  {replaced:9d}  {replaced / len(kinds):7.4f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

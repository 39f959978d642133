"""Dual-channel front-end: spoken text to mixed character/phoneme sequences.

Training mode replaces each in-lexicon word by its phoneme sequence with a
fixed probability (one seeded draw per word); inference mode replaces every
in-lexicon word and falls back to characters for anything out of vocabulary,
so neologisms remain encodable.
"""

from __future__ import annotations

import logging
import random
import re
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from pathlib import Path

logger = logging.getLogger(__name__)

ARPABET_CONSONANTS = frozenset(
    "B CH D DH F G HH JH K L M N NG P R S SH T TH V W Y Z ZH".split()
)
ARPABET_VOWELS = frozenset(
    "AA AE AH AO AW AY EH ER EY IH IY OW OY UH UW".split()
)
STRESS_DIGITS = "012"

CHARACTER_SYMBOLS = tuple(sorted("abcdefghijklmnopqrstuvwxyz'-"))
WORD_BOUNDARY_SYMBOL = "<wb>"
PUNCTUATION_SYMBOLS = (".", ",", "?", "!")

DEFAULT_REPLACE_PROBABILITY = 0.5

_UNIT_RE = re.compile(r"[A-Za-z]+(?:['-][A-Za-z]+)*|[.,?!]")


def default_phoneme_alphabet() -> frozenset[str]:
    """ARPAbet symbols; vowels may carry an optional stress digit 0/1/2."""
    symbols = set(ARPABET_CONSONANTS) | set(ARPABET_VOWELS)
    symbols.update(v + d for v in ARPABET_VOWELS for d in STRESS_DIGITS)
    return frozenset(symbols)


class LexiconError(ValueError):
    pass


class TokenKind(Enum):
    CHARACTER = "CHARACTER"
    PHONEME = "PHONEME"
    WORD_BOUNDARY = "WORD_BOUNDARY"
    PUNCTUATION = "PUNCTUATION"


class Mode(Enum):
    TRAIN = "train"
    INFER = "infer"


@dataclass(frozen=True)
class MixedToken:
    kind: TokenKind
    symbol: str
    id: int


@dataclass(frozen=True)
class MixedTokenSeq:
    tokens: tuple[MixedToken, ...]
    mode: Mode

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)


@dataclass(frozen=True)
class Lexicon:
    """Immutable word -> phoneme-sequence map with a fixed phoneme alphabet."""

    entries: dict[str, tuple[str, ...]]
    alphabet: frozenset[str]

    def lookup(self, word: str) -> tuple[str, ...] | None:
        return self.entries.get(word.upper())

    def __contains__(self, word: str) -> bool:
        return word.upper() in self.entries

    def __len__(self) -> int:
        return len(self.entries)


def load_lexicon(path: str | Path, alphabet: frozenset[str] | None = None) -> Lexicon:
    """Load a two-column lexicon file: `WORD  PH PH PH`, `#`/`;;;` comments.

    The first pronunciation of a duplicated word wins; later ones are logged
    and ignored.  A symbol outside the phoneme alphabet fails with the
    offending line number.
    """
    valid = alphabet if alphabet is not None else default_phoneme_alphabet()
    entries: dict[str, tuple[str, ...]] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#") or stripped.startswith(";;;"):
            continue
        fields = stripped.split()
        if len(fields) < 2:
            raise LexiconError(f"{path}:{lineno}: expected WORD followed by phonemes")
        word, phonemes = fields[0].upper(), tuple(fields[1:])
        for symbol in phonemes:
            if symbol not in valid:
                raise LexiconError(
                    f"{path}:{lineno}: symbol {symbol!r} not in phoneme alphabet"
                )
        if word in entries:
            logger.warning("%s:%d: duplicate word %s, keeping first pronunciation",
                           path, lineno, word)
            continue
        entries[word] = phonemes
    if not entries:
        raise LexiconError(f"{path}: empty lexicon")
    return Lexicon(entries=entries, alphabet=valid)


@lru_cache(maxsize=None)
def build_vocabulary(alphabet: frozenset[str]) -> dict[tuple[TokenKind, str], int]:
    """Unified token vocabulary: characters first, then phonemes, then specials.

    Each block is sorted by symbol so ids are stable across runs for a given
    phoneme alphabet, and the character/phoneme id ranges never overlap.
    """
    vocab: dict[tuple[TokenKind, str], int] = {}
    for symbol in CHARACTER_SYMBOLS:
        vocab[(TokenKind.CHARACTER, symbol)] = len(vocab)
    for symbol in sorted(alphabet):
        vocab[(TokenKind.PHONEME, symbol)] = len(vocab)
    specials = sorted(
        [(TokenKind.PUNCTUATION, s) for s in PUNCTUATION_SYMBOLS]
        + [(TokenKind.WORD_BOUNDARY, WORD_BOUNDARY_SYMBOL)],
        key=lambda pair: pair[1],
    )
    for kind, symbol in specials:
        vocab[(kind, symbol)] = len(vocab)
    return vocab


def encode_train(
    text: str,
    lexicon: Lexicon,
    p: float = DEFAULT_REPLACE_PROBABILITY,
    seed: int = 0,
) -> MixedTokenSeq:
    """Encode spoken text for training with randomized phoneme replacement.

    Every word consumes exactly one draw from a generator seeded by ``seed``,
    so the replacement pattern is reproducible across platforms.  A word is
    emitted as phonemes when it is in the lexicon and its draw falls below
    ``p``; otherwise it is emitted as characters.  Replacement is per-word:
    a single word never mixes characters and phonemes.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"replacement probability must be in [0, 1], got {p}")
    rng = random.Random(seed)
    return _encode(text, lexicon, Mode.TRAIN, lambda: rng.random() < p)


def encode_infer(text: str, lexicon: Lexicon) -> MixedTokenSeq:
    """Deterministic inference encoding: phonemes whenever the lexicon knows the word."""
    return _encode(text, lexicon, Mode.INFER, lambda: True)


def _encode(text, lexicon, mode, should_replace) -> MixedTokenSeq:
    vocab = build_vocabulary(lexicon.alphabet)
    tokens: list[MixedToken] = []
    prev_was_word = False
    for m in _UNIT_RE.finditer(text):
        unit = m.group()
        if unit in PUNCTUATION_SYMBOLS:
            tokens.append(_token(vocab, TokenKind.PUNCTUATION, unit))
            prev_was_word = False
            continue
        if prev_was_word:
            tokens.append(_token(vocab, TokenKind.WORD_BOUNDARY, WORD_BOUNDARY_SYMBOL))
        replace = should_replace()  # one draw per word, in-lexicon or not
        phonemes = lexicon.lookup(unit)
        if phonemes is not None and replace:
            tokens.extend(_token(vocab, TokenKind.PHONEME, ph) for ph in phonemes)
        else:
            tokens.extend(
                _token(vocab, TokenKind.CHARACTER, ch)
                for ch in unit.lower()
                if (TokenKind.CHARACTER, ch) in vocab
            )
        prev_was_word = True
    return MixedTokenSeq(tokens=tuple(tokens), mode=mode)


def _token(vocab, kind, symbol) -> MixedToken:
    return MixedToken(kind=kind, symbol=symbol, id=vocab[(kind, symbol)])


def format_token_dump(seq: MixedTokenSeq) -> str:
    """One token per line: `KIND<TAB>SYMBOL<TAB>ID` (golden-test format)."""
    return "".join(f"{t.kind.value}\t{t.symbol}\t{t.id}\n" for t in seq.tokens)


def parse_token_dump(text: str) -> list[tuple[str, str, int]]:
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise ValueError(f"token dump line {lineno}: expected KIND<TAB>SYMBOL<TAB>ID")
        rows.append((fields[0], fields[1], int(fields[2])))
    return rows

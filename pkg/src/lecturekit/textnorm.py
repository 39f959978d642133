"""Written-to-spoken text normalization for the synthesis front-end.

Expands numerals, decimals, ordinals, percentages, currency amounts, and
user-registered abbreviations into plain spoken words.  Symbols that cannot
be expanded are dropped (with a diagnostic) so the downstream token alphabet
stays closed.  Output contains only letters, apostrophes, hyphens, spaces,
and the sentence punctuation ``. , ? !``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

SpokenText = str

SENTENCE_PUNCTUATION = ".,?!"

_ONES = [
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight",
    "nine", "ten", "eleven", "twelve", "thirteen", "fourteen", "fifteen",
    "sixteen", "seventeen", "eighteen", "nineteen",
]
_TENS = {
    2: "twenty", 3: "thirty", 4: "forty", 5: "fifty",
    6: "sixty", 7: "seventy", 8: "eighty", 9: "ninety",
}
_SCALES = ((10**9, "billion"), (10**6, "million"), (10**3, "thousand"))

MAX_NUMBER = 10**12

_ORDINAL_SPECIAL = {
    "one": "first", "two": "second", "three": "third", "five": "fifth",
    "eight": "eighth", "nine": "ninth", "twelve": "twelfth",
}

_CURRENCY = {"$": ("dollar", "dollars"), "€": ("euro", "euros"), "£": ("pound", "pounds")}

# Standalone symbols with a registered spoken form.  Everything else is dropped.
_SYMBOLS = {
    "$": "dollar",
    "€": "euro",
    "£": "pound",
    "%": "percent",
    "&": "and",
    "+": "plus",
    "=": "equals",
    "@": "at",
}

_EXPANSION_RE = re.compile(r"[A-Za-z]+(?:[' -][A-Za-z]+)*")

_TOKEN_RE = re.compile(
    r"""
      (?P<currency>[$€£]\ ?\d+(?:\.\d+)?)
    | (?P<percent>\d+(?:\.\d+)?%)
    | (?P<ordinal>\d+(?i:st|nd|rd|th)\b)
    | (?P<decimal>\d+\.\d+)
    | (?P<integer>\d+)
    | (?P<word>[A-Za-z]+(?:['’-][A-Za-z]+)*)
    | (?P<punct>[.,?!])
    | (?P<space>\s+)
    | (?P<other>.)
    """,
    re.VERBOSE,
)


def number_to_words(n: int) -> SpokenText:
    """English cardinal words for 0 <= n < 10**12; space separated, no "and"."""
    if not isinstance(n, int) or isinstance(n, bool):
        raise ValueError(f"expected an integer, got {n!r}")
    if n < 0 or n >= MAX_NUMBER:
        raise ValueError(f"number out of range [0, 10^12): {n}")
    if n == 0:
        return "zero"
    words: list[str] = []
    for scale, name in _SCALES:
        group, n = divmod(n, scale)
        if group:
            words.extend(_under_thousand(group))
            words.append(name)
    if n:
        words.extend(_under_thousand(n))
    return " ".join(words)


def _under_thousand(n: int) -> list[str]:
    words = []
    hundreds, rest = divmod(n, 100)
    if hundreds:
        words.extend([_ONES[hundreds], "hundred"])
    if rest:
        if rest < 20:
            words.append(_ONES[rest])
        else:
            tens, ones = divmod(rest, 10)
            words.append(_TENS[tens])
            if ones:
                words.append(_ONES[ones])
    return words


def ordinal_to_words(n: int) -> SpokenText:
    """English ordinal words ("21" -> "twenty first")."""
    cardinal = number_to_words(n).split()
    last = cardinal[-1]
    if last in _ORDINAL_SPECIAL:
        cardinal[-1] = _ORDINAL_SPECIAL[last]
    elif last.endswith("ty"):
        cardinal[-1] = last[:-1] + "ieth"
    else:
        cardinal[-1] = last + "th"
    return " ".join(cardinal)


def load_abbreviations(path: str | Path) -> dict[str, str]:
    """Parse an abbreviation table: UTF-8 lines `WRITTEN<TAB>spoken form`, `#` comments.

    Keys are matched case-insensitively against word tokens.  Spoken forms may
    contain only letters, apostrophes, hyphens, and spaces.
    """
    table: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "\t" not in stripped:
            raise ValueError(f"{path}:{lineno}: expected WRITTEN<TAB>spoken form")
        written, spoken = stripped.split("\t", 1)
        written, spoken = written.strip(), spoken.strip()
        if not written or not spoken:
            raise ValueError(f"{path}:{lineno}: empty written or spoken form")
        if _EXPANSION_RE.fullmatch(spoken) is None:
            raise ValueError(
                f"{path}:{lineno}: spoken form may contain only letters, "
                f"apostrophes, hyphens, and spaces: {spoken!r}"
            )
        table[written.upper()] = spoken
    return table


@dataclass
class NormResult:
    """Normalized text plus diagnostics for anything that could not expand."""

    text: SpokenText
    warnings: list[str] = field(default_factory=list)


def normalize(raw: str, abbreviations: dict[str, str] | None = None) -> NormResult:
    """Convert written-style text to spoken-style text.

    Deterministic and idempotent: running the output through ``normalize``
    again returns it unchanged.  The result contains no digits and no
    currency or math symbols.
    """
    abbrev = abbreviations or {}
    pieces: list[str] = []
    warnings: list[str] = []

    def emit_words(text: str) -> None:
        pieces.extend(text.split())

    def emit_punct(mark: str) -> None:
        if pieces:
            pieces[-1] += mark
        else:
            pieces.append(mark)

    for m in _TOKEN_RE.finditer(raw):
        kind = m.lastgroup
        tok = m.group()
        if kind == "space":
            continue
        if kind == "currency":
            symbol = tok[0]
            amount = tok[1:].strip()
            singular, plural = _CURRENCY[symbol]
            unit = singular if amount == "1" else plural
            emit_words(f"{_amount_words(amount)} {unit}")
        elif kind == "percent":
            emit_words(f"{_amount_words(tok[:-1])} percent")
        elif kind == "ordinal":
            emit_words(ordinal_to_words(int(tok[:-2])))
        elif kind == "decimal":
            emit_words(_amount_words(tok))
        elif kind == "integer":
            emit_words(_integer_words(tok))
        elif kind == "word":
            word = tok.replace("’", "'")
            expansion = abbrev.get(word.upper())
            emit_words(expansion if expansion is not None else word)
        elif kind == "punct":
            emit_punct(tok)
        else:
            replacement = _SYMBOLS.get(tok)
            if replacement is not None:
                emit_words(replacement)
            else:
                warnings.append(f"dropped unknown symbol {tok!r}")
    return NormResult(" ".join(pieces), warnings)


def _amount_words(text: str) -> str:
    """Spoken form of a plain or decimal digit string ("3.50" -> "three point five zero")."""
    if "." in text:
        whole, frac = text.split(".", 1)
        digits = " ".join(_ONES[int(d)] for d in frac)
        return f"{_integer_words(whole)} point {digits}"
    return _integer_words(text)


def _integer_words(digits: str) -> str:
    # Leading zeros and out-of-range magnitudes are spoken digit by digit.
    if (len(digits) > 1 and digits[0] == "0") or int(digits) >= MAX_NUMBER:
        return " ".join(_ONES[int(d)] for d in digits)
    return number_to_words(int(digits))

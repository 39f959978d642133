import json
import random

import pytest

from lecturekit.frontend import load_lexicon

FIXTURE_LEXICON = """\
# hand-written fixture lexicon (two-column word / phoneme-list format)
HELLO  HH AH0 L OW1
WORLD  W ER1 L D
THE  DH AH0
AND  AE1 N D
TO  T UW1
OF  AH1 V
A  AH0
IN  IH0 N
IS  IH1 Z
IT  IH1 T
YOU  Y UW1
THAT  DH AE1 T
HE  HH IY1
WAS  W AA1 Z
FOR  F AO1 R
ON  AA1 N
ARE  AA1 R
WITH  W IH1 DH
AS  AE1 Z
THIS  DH IH1 S
LECTURE  L EH1 K CH ER0
VIDEO  V IH1 D IY0 OW0
SPEECH  S P IY1 CH
MODEL  M AA1 D AH0 L
SLIDE  S L AY1 D
AUDIO  AO1 D IY0 OW0
TEACHER  T IY1 CH ER0
STUDENT  S T UW1 D AH0 N T
COURSE  K AO1 R S
LESSON  L EH1 S AH0 N
NUMBER  N AH1 M B ER0
DOLLAR  D AA1 L ER0
DOLLARS  D AA1 L ER0 Z
POINT  P OY1 N T
FIVE  F AY1 V
FORTY  F AO1 R T IY0
TWO  T UW1
ZERO  Z IH1 R OW0
ONE  W AH1 N
HUNDRED  HH AH1 N D R AH0 D
"""

OOV_WORDS = ["zorblat", "quux", "fnord", "blargh", "xylozap", "wibble"]


@pytest.fixture(scope="session")
def lexicon_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("lexicon") / "lexicon.txt"
    path.write_text(FIXTURE_LEXICON, encoding="utf-8")
    return path


@pytest.fixture(scope="session")
def lexicon(lexicon_file):
    return load_lexicon(lexicon_file)


@pytest.fixture(scope="session")
def lexicon_words(lexicon):
    return sorted(lexicon.entries)


def make_frames_dir(root, count, tag="ref"):
    """Create a directory of fake frame payloads following frame_%06d.png naming."""
    frames = root / f"{tag}_frames"
    frames.mkdir(parents=True, exist_ok=True)
    for i in range(count):
        (frames / f"frame_{i:06d}.png").write_bytes(f"{tag}-frame-{i}".encode())
    return frames


@pytest.fixture
def frames_dir(tmp_path):
    return make_frames_dir(tmp_path, 12)


DECK_SLIDES = [
    ("s1", "Hello world. This lecture costs $5."),
    ("s2", "The model is 42% done, see slide 2."),
    ("s3", "Speech and video for the student!"),
]


def make_deck_file(root, slides=None, language="en", target_language=None, name="deck.json"):
    slides = slides if slides is not None else DECK_SLIDES
    assets = root / "assets"
    assets.mkdir(parents=True, exist_ok=True)
    deck = {"language": language, "slides": []}
    if target_language is not None:
        deck["target_language"] = target_language
    for slide_id, annotation in slides:
        asset = assets / f"{slide_id}.png"
        asset.write_bytes(f"slide-{slide_id}".encode())
        deck["slides"].append(
            {"id": slide_id, "asset": asset.as_posix(), "annotation": annotation}
        )
    path = root / name
    path.write_text(json.dumps(deck, indent=2), encoding="utf-8")
    return path


@pytest.fixture
def deck_file(tmp_path):
    return make_deck_file(tmp_path)


def random_word(rng: random.Random, words):
    return words[rng.randrange(len(words))]

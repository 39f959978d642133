#!/usr/bin/env python3
"""Build a tiny self-contained demo (deck, lexicon, reference frames), run the
full pipeline with stub adapters, and print the manifest plus the composition
script.  Everything is deterministic for a given --seed.

Usage: python scripts/demo_pipeline.py [--out demo_out] [--seed 0]
"""

import argparse
import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from lecturekit.deck import parse_deck
from lecturekit.pipeline import (
    CompositionLayout,
    compose_command,
    load_config,
    run_pipeline,
)

LEXICON = """\
HELLO  HH AH0 L OW1
WORLD  W ER1 L D
THIS  DH IH1 S
IS  IH1 Z
A  AH0
DEMO  D EH1 M OW0
LECTURE  L EH1 K CH ER0
ABOUT  AH0 B AW1 T
SPEECH  S P IY1 CH
AND  AE1 N D
VIDEO  V IH1 D IY0 OW0
"""

SLIDES = [
    ("intro", "Hello world. This is a demo lecture."),
    ("body", "It costs $0 and is 100% synthetic speech and video."),
    ("outro", "Thanks!"),
]


def build_inputs(work: Path) -> tuple[Path, Path]:
    (work / "assets").mkdir(parents=True, exist_ok=True)
    frames = work / "reference_frames"
    frames.mkdir(exist_ok=True)
    for i in range(24):
        (frames / f"frame_{i:06d}.png").write_bytes(f"demo-frame-{i}".encode())
    (work / "lexicon.txt").write_text(LEXICON, encoding="utf-8")

    deck = {"language": "en", "slides": []}
    for slide_id, annotation in SLIDES:
        asset = work / "assets" / f"{slide_id}.png"
        asset.write_bytes(f"slide-{slide_id}".encode())
        deck["slides"].append(
            {"id": slide_id, "asset": asset.as_posix(), "annotation": annotation}
        )
    deck_path = work / "deck.json"
    deck_path.write_text(json.dumps(deck, indent=2), encoding="utf-8")

    config = {
        "pipeline": {"fps": 25.0, "workers": 2},
        "frontend": {"lexicon": (work / "lexicon.txt").as_posix()},
        "video": {"reference_frames": frames.as_posix(), "constrain_ratio": 0.2},
    }
    config_path = work / "config.json"
    config_path.write_text(json.dumps(config, indent=2), encoding="utf-8")
    return deck_path, config_path


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="demo_out")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    out = Path(args.out)
    deck_path, config_path = build_inputs(out / "inputs")
    manifest = run_pipeline(
        parse_deck(deck_path), load_config(config_path), args.seed, out / "run"
    )

    print(f"manifest: {out / 'run' / 'manifest.json'}")
    for entry in manifest.entries:
        print(
            f"  {entry.slide_id}: {entry.audio_duration:.2f} s "
            f"starting at {entry.start_time:.2f} s"
        )
    print(f"total: {manifest.total_duration:.2f} s at {manifest.fps:g} fps")

    layout = CompositionLayout(x=1400, y=700, width=480, height=320)
    script = compose_command(manifest, layout)
    script_path = out / "compose.txt"
    script_path.write_text(script, encoding="utf-8")
    print(f"composition script: {script_path} ({len(script.splitlines()) - 1} commands)")
    return 0


if __name__ == "__main__":
    sys.exit(main())

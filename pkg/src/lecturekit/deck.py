"""Annotated slide decks: the pipeline input format.

Deck JSON: ``{"language": tag, "target_language"?: tag,
"slides": [{"id": str, "asset": path, "annotation": text}]}``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path


class DeckError(ValueError):
    pass


@dataclass(frozen=True)
class Slide:
    slide_id: str
    asset_path: str
    annotation: str


@dataclass(frozen=True)
class SlideDeck:
    slides: tuple[Slide, ...]
    language: str
    target_language: str | None = None


def parse_deck(path: str | Path) -> SlideDeck:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DeckError(f"{path}: invalid JSON ({exc})") from exc
    return parse_deck_dict(data, source=str(path))


def parse_deck_dict(data: dict, source: str = "<deck>") -> SlideDeck:
    if not isinstance(data, dict):
        raise DeckError(f"{source}: deck must be a JSON object")
    language = data.get("language")
    if not language or not isinstance(language, str):
        raise DeckError(f"{source}: missing language tag")
    target = data.get("target_language")
    if target is not None and (not target or not isinstance(target, str)):
        raise DeckError(f"{source}: target_language must be a non-empty string")
    raw_slides = data.get("slides")
    if not isinstance(raw_slides, list):
        raise DeckError(f"{source}: missing slides list")
    slides = []
    seen: set[str] = set()
    for position, raw in enumerate(raw_slides):
        if not isinstance(raw, dict):
            raise DeckError(f"{source}: slide #{position} must be an object")
        slide_id = raw.get("id")
        if not slide_id or not isinstance(slide_id, str):
            raise DeckError(f"{source}: slide #{position} has no id")
        if slide_id in seen:
            raise DeckError(f"{source}: duplicate slide id {slide_id!r}")
        seen.add(slide_id)
        asset = raw.get("asset")
        if not asset or not isinstance(asset, str):
            raise DeckError(f"{source}: slide {slide_id!r}: missing asset")
        annotation = raw.get("annotation")
        if not annotation or not isinstance(annotation, str):
            raise DeckError(f"{source}: slide {slide_id!r}: empty annotation")
        slides.append(Slide(slide_id=slide_id, asset_path=asset, annotation=annotation))
    return SlideDeck(slides=tuple(slides), language=language, target_language=target)

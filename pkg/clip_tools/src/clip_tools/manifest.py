"""Scoring manifest: which images to score against which triplet texts.

Manifest JSON schema:

    { "entries": [ { "image": "photos/0001.jpg",
                     "image_id": "img-0001",
                     "triplets": [ {"subject": "sign", "relation": "on",
                                    "object": "pole"}, ... ] } ] }

Relative image paths resolve against the manifest file's directory.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path


class ManifestError(ValueError):
    """Raised when a manifest fails parsing or validation."""


@dataclass(frozen=True)
class TripletText:
    subject: str
    relation: str
    object: str

    def phrase(self) -> str:
        """Space-joined rendering used as the text-encoder prompt."""
        return f"{self.subject} {self.relation} {self.object}"


@dataclass(frozen=True)
class ManifestEntry:
    image_path: Path
    image_id: str
    triplets: tuple[TripletText, ...]


@dataclass(frozen=True)
class ScoringManifest:
    entries: tuple[ManifestEntry, ...]


def _triplet_from_json(obj, where: str) -> TripletText:
    if not isinstance(obj, dict):
        raise ManifestError(f"{where}: triplet must be an object")
    values = []
    for key in ("subject", "relation", "object"):
        value = obj.get(key)
        if not isinstance(value, str) or not value:
            raise ManifestError(f"{where}: field '{key}' must be a non-empty string")
        values.append(value)
    return TripletText(*values)


def load_manifest(path: str | Path) -> ScoringManifest:
    """Load and validate a manifest; image files must exist."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ManifestError(f"parse error in {path}: {exc}") from None
    if not isinstance(raw, dict) or "entries" not in raw:
        raise ManifestError(f"{path}: top level must be an object with 'entries'")
    if not isinstance(raw["entries"], list):
        raise ManifestError(f"{path}: 'entries' must be a list")
    entries = []
    seen: set[str] = set()
    for i, obj in enumerate(raw["entries"]):
        where = f"entries[{i}]"
        if not isinstance(obj, dict):
            raise ManifestError(f"{where}: entry must be an object")
        for key in ("image", "image_id", "triplets"):
            if key not in obj:
                raise ManifestError(f"{where}: missing '{key}'")
        image_id = obj["image_id"]
        if not isinstance(image_id, str) or not image_id:
            raise ManifestError(f"{where}: image_id must be a non-empty string")
        if image_id in seen:
            raise ManifestError(f"{where}: duplicate image_id {image_id!r}")
        seen.add(image_id)
        image_path = Path(obj["image"])
        if not image_path.is_absolute():
            image_path = path.parent / image_path
        if not image_path.is_file():
            raise ManifestError(f"{where}: missing image file {image_path}")
        if not isinstance(obj["triplets"], list) or not obj["triplets"]:
            raise ManifestError(f"{where}: 'triplets' must be a non-empty list")
        triplets = tuple(
            _triplet_from_json(t, f"{where}.triplets[{j}]")
            for j, t in enumerate(obj["triplets"])
        )
        entries.append(ManifestEntry(image_path, image_id, triplets))
    return ScoringManifest(tuple(entries))

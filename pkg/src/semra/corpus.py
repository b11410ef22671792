"""Semantic corpus data model: images, their triplets, and importance scores.

A corpus is a list of image records; each record carries an ordered list of
subject-relation-object triplets with a per-triplet importance score in
[0, 1]. Triplet order within a record is stable and defines the index used
by allocators and the quality metric.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

PROVENANCE_KINDS = ("synthetic", "scored")

# Vocabulary for synthetic triplet text. Content is cosmetic; importances
# carry all the signal used downstream.
_SUBJECTS = ("sign", "dog", "car", "tree", "person", "building", "bird", "boat")
_RELATIONS = ("on", "near", "behind", "under", "beside", "in front of")
_OBJECTS = ("pole", "street", "grass", "roof", "water", "bench", "wall", "hill")


class CorpusError(ValueError):
    """Raised when corpus data fails parsing or validation."""


@dataclass(frozen=True)
class SemanticTriplet:
    subject: str
    relation: str
    object: str
    importance: float

    def __post_init__(self):
        for name in ("subject", "relation", "object"):
            value = getattr(self, name)
            if not isinstance(value, str) or not value:
                raise CorpusError(f"triplet field '{name}' must be a non-empty string")
        imp = self.importance
        if isinstance(imp, bool) or not isinstance(imp, (int, float)):
            raise CorpusError(f"importance must be a number, got {imp!r}")
        if not np.isfinite(imp) or not 0.0 <= imp <= 1.0:
            raise CorpusError(f"importance out of range [0, 1]: {imp!r}")
        object.__setattr__(self, "importance", float(imp))

    def phrase(self) -> str:
        """Space-joined text form, e.g. 'sign on pole'."""
        return f"{self.subject} {self.relation} {self.object}"


@dataclass(frozen=True)
class ImageRecord:
    image_id: str
    triplets: tuple[SemanticTriplet, ...]

    def __post_init__(self):
        if not isinstance(self.image_id, str) or not self.image_id:
            raise CorpusError("image_id must be a non-empty string")
        object.__setattr__(self, "triplets", tuple(self.triplets))
        if len(self.triplets) < 1:
            raise CorpusError(f"record '{self.image_id}' has no triplets")

    @property
    def n(self) -> int:
        return len(self.triplets)

    def importances(self) -> np.ndarray:
        return np.array([t.importance for t in self.triplets], dtype=float)


@dataclass(frozen=True)
class Provenance:
    kind: str
    note: str = ""

    def __post_init__(self):
        if self.kind not in PROVENANCE_KINDS:
            raise CorpusError(f"provenance kind must be one of {PROVENANCE_KINDS}, got {self.kind!r}")


@dataclass(frozen=True)
class Corpus:
    records: tuple[ImageRecord, ...]
    provenance: Provenance = field(default_factory=lambda: Provenance("synthetic"))

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))
        seen: set[str] = set()
        for rec in self.records:
            if rec.image_id in seen:
                raise CorpusError(f"duplicate image_id: {rec.image_id!r}")
            seen.add(rec.image_id)

    @property
    def max_triplets(self) -> int:
        return max((rec.n for rec in self.records), default=0)


def normalize_importance(raw: float) -> float:
    """Map a raw cosine similarity in [-1, 1] to an importance in [0, 1].

    Negative scores clamp to zero: a triplet anti-correlated with its image
    contributes nothing. Idempotent on [0, 1].
    """
    raw = float(raw)
    if not np.isfinite(raw) or not -1.0 <= raw <= 1.0:
        raise ValueError(f"raw cosine score out of range [-1, 1]: {raw!r}")
    return max(raw, 0.0)


def _triplet_from_json(obj, where: str) -> SemanticTriplet:
    if not isinstance(obj, dict):
        raise CorpusError(f"{where}: triplet must be an object, got {type(obj).__name__}")
    for key in ("subject", "relation", "object", "importance"):
        if key not in obj:
            raise CorpusError(f"{where}: missing triplet field '{key}'")
    extra = set(obj) - {"subject", "relation", "object", "importance"}
    if extra:
        raise CorpusError(f"{where}: unknown triplet fields {sorted(extra)}")
    try:
        return SemanticTriplet(obj["subject"], obj["relation"], obj["object"], obj["importance"])
    except CorpusError as exc:
        raise CorpusError(f"{where}: {exc}") from None


def _record_from_json(obj, index: int) -> ImageRecord:
    where = f"records[{index}]"
    if not isinstance(obj, dict):
        raise CorpusError(f"{where}: record must be an object")
    if "image_id" not in obj or "triplets" not in obj:
        raise CorpusError(f"{where}: missing 'image_id' or 'triplets'")
    image_id = obj["image_id"]
    triplets_json = obj["triplets"]
    if not isinstance(triplets_json, list):
        raise CorpusError(f"{where}: 'triplets' must be a list")
    triplets = tuple(
        _triplet_from_json(t, f"{where}.triplets[{j}]") for j, t in enumerate(triplets_json)
    )
    try:
        return ImageRecord(image_id, triplets)
    except CorpusError as exc:
        raise CorpusError(f"{where}: {exc}") from None


def load_corpus(path: str | Path) -> Corpus:
    """Load and validate a corpus JSON file.

    Raises :class:`CorpusError` on malformed JSON or on the first record or
    field that violates an invariant.
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise CorpusError(f"parse error in {path}: {exc}") from None
    if not isinstance(raw, dict):
        raise CorpusError(f"{path}: top level must be an object")
    if "provenance" not in raw or "records" not in raw:
        raise CorpusError(f"{path}: missing 'provenance' or 'records'")
    prov_json = raw["provenance"]
    if not isinstance(prov_json, dict) or "kind" not in prov_json:
        raise CorpusError(f"{path}: provenance must be an object with a 'kind'")
    provenance = Provenance(prov_json["kind"], str(prov_json.get("note", "")))
    records_json = raw["records"]
    if not isinstance(records_json, list):
        raise CorpusError(f"{path}: 'records' must be a list")
    records = tuple(_record_from_json(r, i) for i, r in enumerate(records_json))
    return Corpus(records, provenance)


def corpus_to_json(corpus: Corpus) -> dict:
    return {
        "provenance": {"kind": corpus.provenance.kind, "note": corpus.provenance.note},
        "records": [
            {
                "image_id": rec.image_id,
                "triplets": [
                    {
                        "subject": t.subject,
                        "relation": t.relation,
                        "object": t.object,
                        "importance": t.importance,
                    }
                    for t in rec.triplets
                ],
            }
            for rec in corpus.records
        ],
    }


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    """Write a corpus as JSON. Round-trips exactly through :func:`load_corpus`."""
    Path(path).write_text(json.dumps(corpus_to_json(corpus), indent=2) + "\n")


def synth_corpus(num_images: int, triplets_per_image: int, seed: int) -> Corpus:
    """Generate a deterministic synthetic corpus.

    Importances are Beta(2, 2) draws sorted descending within each record,
    giving each image a mix of important and filler triplets. Texts are
    sampled from a small fixed vocabulary.
    """
    if num_images < 1 or triplets_per_image < 1:
        raise ValueError("num_images and triplets_per_image must be >= 1")
    rng = np.random.default_rng(seed)
    records = []
    for i in range(num_images):
        importances = np.sort(rng.beta(2.0, 2.0, size=triplets_per_image))[::-1]
        triplets = tuple(
            SemanticTriplet(
                subject=str(rng.choice(_SUBJECTS)),
                relation=str(rng.choice(_RELATIONS)),
                object=str(rng.choice(_OBJECTS)),
                importance=float(imp),
            )
            for imp in importances
        )
        records.append(ImageRecord(image_id=f"synthetic-{i:04d}", triplets=triplets))
    note = f"beta(2,2) importances, {num_images} images x {triplets_per_image} triplets, seed={seed}"
    return Corpus(tuple(records), Provenance("synthetic", note))

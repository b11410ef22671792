"""Score manifests into corpus JSON consumable by the semra simulator.

Each triplet's importance is the cosine similarity between its rendered
phrase and its image, clamped into [0, 1] exactly as the corpus schema
requires. Output validates against the corpus JSON contract:

    { "provenance": {"kind": "scored", "note": ...},
      "records": [ {"image_id": ..., "triplets": [
          {"subject": ..., "relation": ..., "object": ..., "importance": ...},
          ... ] } ] }
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
from PIL import Image

from .manifest import ScoringManifest


def clamp_importance(cosine: float) -> float:
    """Map a raw cosine in [-1, 1] to the corpus importance range [0, 1]."""
    return float(min(max(cosine, 0.0), 1.0))


def score_manifest(manifest: ScoringManifest, backend, batch_size: int = 16) -> dict:
    """Embed images and triplet phrases, return the corpus JSON document."""
    if batch_size < 1:
        raise ValueError("batch_size must be >= 1")
    records = []
    entries = list(manifest.entries)
    for start in range(0, len(entries), batch_size):
        chunk = entries[start : start + batch_size]
        images = [Image.open(e.image_path) for e in chunk]
        image_vecs = backend.embed_images(images) if chunk else np.zeros((0, 0))
        for img in images:
            img.close()
        for entry, image_vec in zip(chunk, image_vecs):
            phrases = [t.phrase() for t in entry.triplets]
            text_vecs = backend.embed_texts(phrases)
            cosines = text_vecs @ image_vec
            records.append({
                "image_id": entry.image_id,
                "triplets": [
                    {
                        "subject": t.subject,
                        "relation": t.relation,
                        "object": t.object,
                        "importance": clamp_importance(c),
                    }
                    for t, c in zip(entry.triplets, cosines)
                ],
            })
    return {
        "provenance": {"kind": "scored", "note": f"scored with model {backend.model_id}"},
        "records": records,
    }


def write_corpus(document: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(document, indent=2) + "\n")

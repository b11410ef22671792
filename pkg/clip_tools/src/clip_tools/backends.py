"""Image-text embedding backends.

Two families: pretrained CLIP checkpoints through sentence-transformers
(needs downloadable weights), and a built-in frozen random-projection
embedder for offline runs and tests. Both map images and texts into one
vector space; the scorer only relies on cosine similarity between them.
"""

from __future__ import annotations

import hashlib

import numpy as np
from PIL import Image

BUILTIN_MODEL_ID = "hashed-projection-64"

# Frozen weights for the builtin backend: everything derives from this seed,
# so identical inputs score identically across runs and machines.
_BUILTIN_SEED = 20110
_EMBED_DIM = 64
_TEXT_BUCKETS = 4096
_IMAGE_SIDE = 16


class ModelLoadError(RuntimeError):
    """Raised when an embedding model cannot be constructed."""


def _normalize_rows(mat: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(mat, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    return mat / norms


class HashedProjectionBackend:
    """Deterministic offline embedder.

    Texts hash into a token-count vector that is projected into the shared
    space; images are downsampled to grayscale and projected likewise. The
    projections are fixed at import time from a constant seed. This is a
    lightweight stand-in, not a semantic model: scores are corpus
    provenance, not ground truth.
    """

    model_id = BUILTIN_MODEL_ID

    def __init__(self):
        rng = np.random.default_rng(_BUILTIN_SEED)
        self._text_proj = rng.standard_normal((_TEXT_BUCKETS, _EMBED_DIM)) / np.sqrt(_EMBED_DIM)
        self._image_proj = rng.standard_normal((_IMAGE_SIDE * _IMAGE_SIDE, _EMBED_DIM)) / np.sqrt(
            _EMBED_DIM
        )

    @staticmethod
    def _bucket(token: str) -> int:
        digest = hashlib.md5(token.encode("utf-8")).digest()
        return int.from_bytes(digest[:4], "little") % _TEXT_BUCKETS

    def embed_texts(self, texts: list[str]) -> np.ndarray:
        bags = np.zeros((len(texts), _TEXT_BUCKETS))
        for i, text in enumerate(texts):
            for token in text.lower().split():
                bags[i, self._bucket(token)] += 1.0
        return _normalize_rows(bags @ self._text_proj)

    def embed_images(self, images: list[Image.Image]) -> np.ndarray:
        pixels = np.zeros((len(images), _IMAGE_SIDE * _IMAGE_SIDE))
        for i, image in enumerate(images):
            gray = image.convert("L").resize((_IMAGE_SIDE, _IMAGE_SIDE), Image.BILINEAR)
            vec = np.asarray(gray, dtype=float).ravel() / 255.0
            pixels[i] = vec - vec.mean()
        return _normalize_rows(pixels @ self._image_proj)


class ClipBackend:
    """Pretrained CLIP checkpoint via sentence-transformers."""

    def __init__(self, model_id: str):
        self.model_id = model_id
        try:
            from sentence_transformers import SentenceTransformer
        except ImportError as exc:
            raise ModelLoadError(
                f"model load failure for {model_id!r}: sentence-transformers is not "
                f"installed (pip install 'semra-clip-tools[clip]')"
            ) from exc
        try:
            self._model = SentenceTransformer(model_id)
        except Exception as exc:
            raise ModelLoadError(f"model load failure for {model_id!r}: {exc}") from exc

    def embed_texts(self, texts: list[str]) -> np.ndarray:
        vecs = self._model.encode(texts, convert_to_numpy=True, show_progress_bar=False)
        return _normalize_rows(np.asarray(vecs, dtype=float))

    def embed_images(self, images) -> np.ndarray:
        vecs = self._model.encode(images, convert_to_numpy=True, show_progress_bar=False)
        return _normalize_rows(np.asarray(vecs, dtype=float))


def get_backend(model_id: str):
    """Resolve a model id to a backend; unknown ids go to CLIP loading."""
    if model_id == BUILTIN_MODEL_ID:
        return HashedProjectionBackend()
    return ClipBackend(model_id)

"""Offline image-triplet similarity scorer for the semra corpus format."""

from .backends import BUILTIN_MODEL_ID, ClipBackend, HashedProjectionBackend, ModelLoadError, get_backend
from .manifest import ManifestEntry, ManifestError, ScoringManifest, TripletText, load_manifest
from .scorer import clamp_importance, score_manifest, write_corpus

__version__ = "0.1.0"

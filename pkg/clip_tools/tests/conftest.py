import json

import numpy as np
import pytest
from PIL import Image


@pytest.fixture
def image_dir(tmp_path):
    """Three small deterministic PNG images."""
    rng = np.random.default_rng(7)
    paths = {}
    for name in ("street", "harbor", "meadow"):
        pixels = rng.integers(0, 256, size=(32, 32, 3), dtype=np.uint8)
        path = tmp_path / f"{name}.png"
        Image.fromarray(pixels).save(path)
        paths[name] = path
    return tmp_path, paths


@pytest.fixture
def manifest_path(image_dir):
    tmp_path, paths = image_dir
    payload = {
        "entries": [
            {
                "image": paths["street"].name,
                "image_id": "img-street",
                "triplets": [
                    {"subject": "sign", "relation": "on", "object": "pole"},
                    {"subject": "car", "relation": "near", "object": "curb"},
                ],
            },
            {
                "image": paths["harbor"].name,
                "image_id": "img-harbor",
                "triplets": [
                    {"subject": "boat", "relation": "on", "object": "water"},
                ],
            },
        ]
    }
    path = tmp_path / "manifest.json"
    path.write_text(json.dumps(payload))
    return path

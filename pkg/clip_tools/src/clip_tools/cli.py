"""semra-score: score a manifest of images and triplet texts into corpus JSON."""

from __future__ import annotations

import argparse
import sys

from .backends import BUILTIN_MODEL_ID, ModelLoadError, get_backend
from .manifest import ManifestError, load_manifest
from .scorer import score_manifest, write_corpus


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semra-score",
        description="Compute image-triplet similarity scores and emit corpus JSON.",
    )
    parser.add_argument("--manifest", required=True, help="scoring manifest JSON")
    parser.add_argument("--model", default=BUILTIN_MODEL_ID,
                        help=f"model id (CLIP checkpoint name, or '{BUILTIN_MODEL_ID}' "
                             f"for the builtin offline embedder)")
    parser.add_argument("--out", required=True, help="output corpus JSON path")
    parser.add_argument("--batch-size", type=int, default=16)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        manifest = load_manifest(args.manifest)
        backend = get_backend(args.model)
        document = score_manifest(manifest, backend, batch_size=args.batch_size)
    except (ManifestError, ModelLoadError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    write_corpus(document, args.out)
    print(f"wrote {args.out} ({len(document['records'])} records, model={args.model})")
    return 0


if __name__ == "__main__":
    sys.exit(main())

#!/usr/bin/env python3
"""Run the fixed-budget convergence experiment (denoising-step comparison)."""

import sys
from pathlib import Path

from semra.cli import main

CONFIG = Path(__file__).resolve().parent.parent / "configs" / "fig4_convergence.toml"

if __name__ == "__main__":
    sys.exit(main(["run", str(CONFIG), *sys.argv[1:]]))

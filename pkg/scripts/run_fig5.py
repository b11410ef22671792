#!/usr/bin/env python3
"""Run the power-sweep experiment (schemes versus total transmit power)."""

import sys
from pathlib import Path

from semra.cli import main

CONFIG = Path(__file__).resolve().parent.parent / "configs" / "fig5_power_sweep.toml"

if __name__ == "__main__":
    sys.exit(main(["run", str(CONFIG), *sys.argv[1:]]))

#!/usr/bin/env python3
"""Run the budget-convergence experiment (training curves per power budget)."""

import sys
from pathlib import Path

from semra.cli import main

CONFIG = Path(__file__).resolve().parent.parent / "configs" / "fig6_budget_convergence.toml"

if __name__ == "__main__":
    sys.exit(main(["run", str(CONFIG), *sys.argv[1:]]))

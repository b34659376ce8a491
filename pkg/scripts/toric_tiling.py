#!/usr/bin/env python3
"""
Command-line interface for toric tiling computations.

Thin wrapper around src.cli so the tool runs from a source checkout:

  python scripts/toric_tiling.py trees --graph k3.json
  python scripts/toric_tiling.py tiles --graph k3.json --config k3-config.json --window 2
  python scripts/toric_tiling.py render --graph k3.json --bbox -2,-2,2,2 --out k3.svg
"""

import sys
from pathlib import Path

# Add repository root to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.cli import main

if __name__ == "__main__":
    sys.exit(main())

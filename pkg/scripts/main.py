#!/usr/bin/env python3
"""
ancova-check
Covariate-adjusted treatment effect estimation and variance checks for two-arm trials.

Usage:
    python scripts/main.py analyze --input data/example_trial.csv
    python scripts/main.py limits --scenarios S1
    python scripts/main.py reproduce --fast --workers 4
"""

import sys
from pathlib import Path

# Add the project root to Python path
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from ancova_check.cli import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main())

"""Rebuild the two-sided weighted shift case study end to end.

Writes the full bundle (verdict table, gain sweep, windowed oracle trend)
under ./example17_out by default.

Usage:
  python scripts/reproduce_shift_example.py [out_dir] [seed]
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from shadowspec.cli import main

if __name__ == "__main__":
    out_dir = sys.argv[1] if len(sys.argv) > 1 else "example17_out"
    seed = sys.argv[2] if len(sys.argv) > 2 else "0"
    raise SystemExit(main(["example17", "--output", out_dir, "--seed", seed]))

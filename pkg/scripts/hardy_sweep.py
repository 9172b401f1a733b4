#!/usr/bin/env python3
"""Sweep Hardy Rayleigh quotients over a (k, p, alpha) grid to CSV.

The default grid reproduces a 3 x 3 x 3 sweep on the first Heisenberg
group; every margin column should be nonnegative up to Monte Carlo error.

Example:
    python scripts/hardy_sweep.py
    python scripts/hardy_sweep.py --group quaternionic:1 --k 1,2 --out q.csv
"""

import sys

from hplap.cli import main

DEFAULTS = [
    "sweep",
    "--group", "heisenberg:1",
    "--k", "1,1.5,2",
    "--p", "1.5,2,2.5",
    "--alpha", "0,0.5,1",
    "--out", "hardy_sweep.csv",
]

if __name__ == "__main__":
    args = DEFAULTS + sys.argv[1:]
    sys.exit(main(args))

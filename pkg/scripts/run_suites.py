#!/usr/bin/env python3
"""Run every verification suite for one configuration and write reports.

Example:
    python scripts/run_suites.py --group heisenberg:1 --k 1 --p 2 --out reports/
"""

import sys

from hplap.cli import main

if __name__ == "__main__":
    sys.exit(main(["verify", "--suite", "all"] + sys.argv[1:]))

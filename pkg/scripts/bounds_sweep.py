#!/usr/bin/env python3
"""Branching-bound sweep over recovery rates, with a Monte Carlo
cross-check of the local offspring process.

Writes bounds.json and bounds_sweep.csv to --out-dir (default out/bounds).
"""

import sys

from contagion.cli import main

DEFAULTS = [
    "bounds",
    "--d", "2",
    "--k", "1",
    "--m-bar", "1",
    "--lam", "50.0",
    "--gamma", "1.0",
    "--lam-grid", "10,20,40,60,80,120,160,240",
    "--mc-trials", "100000",
    "--seed", "1",
    "--out-dir", "out/bounds",
]

if __name__ == "__main__":
    sys.exit(main(DEFAULTS + sys.argv[1:]))

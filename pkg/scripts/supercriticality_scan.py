#!/usr/bin/env python3
"""Region-openness scan over a geometric clearance-rate grid plus the
site-percolation comparison, ending in a supercriticality verdict.

Writes openness_sweep.csv, perc_sweep.csv and supercriticality.json to
--out-dir (default out/perc).
"""

import sys

from contagion.cli import main

DEFAULTS = [
    "perc",
    "--k", "1",
    "--lam", "1.0",
    "--p-m-ge-1", "1.0",
    "--trials", "2000",
    "--gamma-grid", "1.0,0.1,0.01,0.001,0.0001",
    "--n", "128",
    "--adjacency", "four",
    "--realizations", "2000",
    "--p-grid", "0.55,0.57,0.59,0.61,0.63",
    "--check",
    "--seed", "1",
    "--out-dir", "out/perc",
]

if __name__ == "__main__":
    sys.exit(main(DEFAULTS + sys.argv[1:]))

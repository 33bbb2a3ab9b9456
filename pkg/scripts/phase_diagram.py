#!/usr/bin/env python3
"""Full phase-diagram run: critical recovery rate, then the clearance
boundary on a grid of recovery rates above it.

Writes lambda_search.csv, phase_boundary.csv and phase_estimate.json to
--out-dir (default out/phase). Takes a few minutes at default settings.
"""

import sys

from contagion.cli import main

DEFAULTS = [
    "phase",
    "--L", "30",
    "--K", "100000",
    "--S", "30",
    "--lambda-init", "1.5",
    "--lambda-step", "0.01",
    "--gamma-init", "10.0",
    "--gamma-factor", "0.9",
    "--gamma-floor", "1e-4",
    "--threads", "4",
    "--seed", "1",
    "--out-dir", "out/phase",
]

if __name__ == "__main__":
    sys.exit(main(DEFAULTS + sys.argv[1:]))

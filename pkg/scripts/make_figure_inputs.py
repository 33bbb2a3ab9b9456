#!/usr/bin/env python3
"""Generate a small, fast set of CSV artifacts for the figure scripts in
frontend/ (and for eyeballing output formats). Minutes, not hours.
"""

import sys

from contagion.cli import main


def run(args):
    code = main(args)
    if code != 0:
        sys.exit(code)


if __name__ == "__main__":
    run(["phase", "--L", "12", "--K", "5000", "--S", "8",
         "--lambda-init", "1.5", "--lambda-step", "0.05",
         "--gamma-init", "4.0", "--gamma-factor", "0.7", "--gamma-floor", "0.01",
         "--threads", "4", "--seed", "1", "--out-dir", "out/figs/phase"])
    run(["couple", "--kind", "gamma_pair", "--d", "2", "--L", "10",
         "--lam0", "0.9", "--lam1", "0.9", "--gamma0", "0.3", "--gamma1", "2.0",
         "--K", "20000", "--curve-replicas", "200", "--curve-t-max", "40.0",
         "--seed", "2", "--out-dir", "out/figs/couple"])
    run(["perc", "--k", "1", "--lam", "1.0", "--p-m-ge-1", "1.0",
         "--trials", "400", "--gamma-grid", "1.0,0.3,0.1,0.03,0.01",
         "--n", "64", "--realizations", "400",
         "--p-grid", "0.45,0.5,0.55,0.59,0.63,0.7",
         "--seed", "3", "--out-dir", "out/figs/perc"])
    print("wrote out/figs/{phase,couple,perc}")

#!/usr/bin/env python3
"""Corner injection with absorbing detectors on all four sides.

Sweeps the fraction of intact connections and writes the ensemble means of
the percolation, backscattering and localization probabilities at t = 2N.
Defaults reproduce the standard working point (N=100, 500 realizations);
expect a few minutes of runtime.
"""

import sys

from bswalk.cli import main

DEFAULTS = [
    "sweep",
    "--scenario", "corner-absorbing",
    "--n", "100",
    "--t", "200",
    "--fractions", "0.5:1.0:0.02",
    "--realizations", "500",
    "--seed", "42",
    "--out", "corner_sweep.csv",
]

if __name__ == "__main__":
    sys.exit(main(DEFAULTS + sys.argv[1:]))

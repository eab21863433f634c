#!/usr/bin/env python3
"""Center injection with absorbing detectors, long observation time.

With the photon starting in the middle of the lattice the open cluster of
the injection site decides everything: below the bond-percolation
threshold it almost never reaches the boundary and the photon stays
localized for good; above it, percolation and backscattering split the
escaping probability until the fraction of intact connections approaches
one.  Long time horizon (t = 16N), so this is the slowest of the three
scripts.
"""

import sys

from bswalk.cli import main

DEFAULTS = [
    "sweep",
    "--scenario", "center-absorbing",
    "--n", "100",
    "--t", "1600",
    "--fractions", "0.4:1.0:0.05",
    "--realizations", "300",
    "--seed", "42",
    "--checkpoints", "200,400,800,1600",
    "--out", "center_sweep.csv",
]

if __name__ == "__main__":
    sys.exit(main(DEFAULTS + sys.argv[1:]))

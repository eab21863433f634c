#!/usr/bin/env python3
"""Corner injection with reflectors feeding the injection-side edges back.

Backscattered amplitude can only leave through the injection point, which
trades backscattering probability for transient localization.  Compare the
output against corner_sweep.py row by row (both use the same seed, so the
two scenarios see identical reflector configurations).
"""

import sys

from bswalk.cli import main

DEFAULTS = [
    "sweep",
    "--scenario", "corner-reflecting",
    "--n", "100",
    "--t", "200",
    "--fractions", "0.5:1.0:0.02",
    "--realizations", "500",
    "--seed", "42",
    "--out", "feedback_sweep.csv",
]

if __name__ == "__main__":
    sys.exit(main(DEFAULTS + sys.argv[1:]))

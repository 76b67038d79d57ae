#!/usr/bin/env python3
"""Generic sweep plot: `plot_sweep.py --in <csv> --out <png> --x <col>`."""

import sys

from plotkit.figure import run_script

if __name__ == "__main__":
    sys.exit(run_script(sys.argv[1:]))

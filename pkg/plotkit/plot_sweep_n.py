#!/usr/bin/env python3
"""Sum SE vs time instant: `plot_sweep_n.py --in <csv> --out <png>`."""

import sys

from plotkit.figure import run_script

if __name__ == "__main__":
    sys.exit(run_script(sys.argv[1:], x_label="time instant n", title="Sum SE vs time instant"))

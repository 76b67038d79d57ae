#!/usr/bin/env python3
"""Sum SE vs power split: `plot_sweep_t.py --in <csv> --out <png>`."""

import sys

from plotkit.figure import run_script

if __name__ == "__main__":
    sys.exit(run_script(sys.argv[1:], x_label="power-splitting factor t", title="Sum SE vs power split"))

#!/usr/bin/env python3
"""Sum SE vs velocity: `plot_sweep_velocity.py --in <csv> --out <png>`."""

import sys

from plotkit.figure import run_script

if __name__ == "__main__":
    sys.exit(run_script(sys.argv[1:], x_label="UE velocity (m/s)", title="Sum SE vs velocity"))

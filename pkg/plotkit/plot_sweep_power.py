#!/usr/bin/env python3
"""Sum SE vs transmit power: `plot_sweep_power.py --in <csv> --out <png>`."""

import sys

from plotkit.figure import run_script

if __name__ == "__main__":
    sys.exit(run_script(sys.argv[1:], x_label="transmit power (dBm)", title="Sum SE vs transmit power"))

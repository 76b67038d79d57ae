#!/usr/bin/env python3
"""Sum SE vs number of UEs: `plot_sweep_ues.py --in <csv> --out <png>`."""

import sys

from plotkit.figure import run_script

if __name__ == "__main__":
    sys.exit(run_script(sys.argv[1:], x_label="number of UEs K", title="Sum SE vs number of UEs"))

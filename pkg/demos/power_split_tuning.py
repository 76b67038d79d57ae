#!/usr/bin/env python3
"""Tuning the common/private power split as transmit power grows.

Without a common stream the network is interference limited: past ~23 dBm
extra power buys almost nothing.  Splitting power into a common stream keeps
the sum SE climbing.  This script sweeps t at several powers and also writes
a sweep CSV that the plotkit scripts can render.
"""

import numpy as np

from rscf import build_scenario, se_samples
from rscf.channel import draw_initial
from rscf.harness import SweepSpec, run_sweep, write_csv
from rscf.scenario import ScenarioConfig, VelocityProfile, dbm_to_watt

cfg = ScenarioConfig(
    num_aps=20,
    num_ues=4,
    antennas_per_ap=2,
    velocity=VelocityProfile(mode="equal", value=0.0),
)
scn = build_scenario(cfg, seed=7)
rho = scn.aging.rho[:, 10]
h0 = draw_initial(scn.stats, np.random.default_rng(8), num=200)

grid = (0.0, 0.25, 0.5, 0.75, 1.0)
print(f"{'P(dBm)':>7} " + " ".join(f"t={t:<5}" for t in grid) + "  best")
for p_dbm in (13.0, 23.0, 33.0, 43.0):
    means = []
    for t in grid:
        est = se_samples(
            scn.stats, rho, "mr", "superposition", dbm_to_watt(p_dbm), t,
            cfg.noise_power, 200, np.random.default_rng(9), h0=h0,
        )
        means.append(est.mean)
    best = grid[int(np.argmax(means))]
    print(f"{p_dbm:>7.0f} " + " ".join(f"{m:7.2f}" for m in means) + f"  t={best}")

# same experiment through the sweep harness, as a CSV for the plot scripts
spec = SweepSpec(
    variable="power_split_t",
    grid=grid,
    config=cfg,
    scheme_pairs=(("mr", "superposition"),),
    realizations=200,
    seed=7,
)
write_csv(run_sweep(spec), "sweep_t_demo.csv")
print("\nwrote sweep_t_demo.csv; render with:")
print("  python3 plotkit/plot_sweep_t.py --in sweep_t_demo.csv --out sweep_t_demo.png")

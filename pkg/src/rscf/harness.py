"""Experiment runner: seeded Monte-Carlo sweeps and closed-form validation.

Every sweep reuses one batch of channel draws across all grid points and
scheme pairs (common random numbers), so trend comparisons are paired and
the whole run is reproducible from (config, seed).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import se as se_mod
from .channel import aging_coefficients, draw_initial
from .precoding import UnsupportedSchemeError
from .scenario import (
    ConfigError,
    LinkStatistics,
    ScenarioConfig,
    VelocityProfile,
    dbm_to_watt,
    drop_layout,
    link_statistics,
    watt_to_dbm,
)

SWEEP_VARIABLES = (
    "power_split_t",
    "time_instant_n",
    "transmit_power_dbm",
    "num_ues_K",
    "velocity_profile",
)


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    grid: tuple
    config: ScenarioConfig
    scheme_pairs: tuple  # of (private, common)
    realizations: int = 500
    seed: int = 0
    time_instant: int = 10
    calib_batch: int = 200
    threads: int = 1
    bisect_opts: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ConfigError(f"unknown sweep variable {self.variable!r}")
        if len(self.grid) == 0:
            raise ConfigError("sweep grid must be nonempty")
        if self.realizations < 1:
            raise ConfigError("need at least one realization per point")
        numeric = all(isinstance(g, (int, float)) for g in self.grid)
        if numeric and list(self.grid) != sorted(self.grid):
            raise ConfigError("numeric sweep grid must be increasing")


@dataclass(frozen=True)
class ResultRow:
    sweep_variable: str
    sweep_value: object
    private_scheme: str
    common_scheme: str
    transmit_power_dbm: float
    transmit_power_w: float
    sum_se: float
    stderr: float
    common_se: float
    private_se: float
    wall_time_s: float
    error: str = ""


@dataclass(frozen=True)
class Scenario:
    """Config resolved into geometry, link statistics and aging."""

    config: ScenarioConfig
    layout: object
    stats: LinkStatistics
    aging: object


def build_scenario(config: ScenarioConfig, seed=None) -> Scenario:
    seed = config.rng_seed if seed is None else seed
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(0,)))
    layout = drop_layout(config, rng)
    stats = link_statistics(config, layout, rng)
    aging = aging_coefficients(
        layout.ue_velocities, config.carrier_freq, config.sampling_time, config.frame_length
    )
    return Scenario(config=config, layout=layout, stats=stats, aging=aging)


def _subset_stats(stats: LinkStatistics, K) -> LinkStatistics:
    return LinkStatistics(R=stats.R[:K], beta=stats.beta[:K])


def _point_inputs(spec: SweepSpec, scn: Scenario, value):
    """Resolve one grid point into (stats, rho_n, p_d, t, n)."""
    cfg = spec.config
    n = spec.time_instant
    stats, aging = scn.stats, scn.aging
    p_d, t = cfg.downlink_power, cfg.power_split
    if spec.variable == "power_split_t":
        t = float(value)
    elif spec.variable == "time_instant_n":
        n = int(value)
    elif spec.variable == "transmit_power_dbm":
        p_d = dbm_to_watt(float(value))
    elif spec.variable == "num_ues_K":
        stats = _subset_stats(stats, int(value))
        rho = aging.rho[: int(value), n]
        return stats, rho, p_d, t, n
    elif spec.variable == "velocity_profile":
        profile = _parse_velocity(value)
        from .scenario import assign_velocities

        v = assign_velocities(profile, scn.stats.beta.sum(axis=1))
        aging = aging_coefficients(v, cfg.carrier_freq, cfg.sampling_time, cfg.frame_length)
    return stats, aging.rho[:, n], p_d, t, n


def _parse_velocity(value) -> VelocityProfile:
    if isinstance(value, VelocityProfile):
        return value
    if isinstance(value, dict):
        return VelocityProfile(
            mode=value.get("mode", "equal"),
            value=value.get("value", 0.0),
            values=tuple(value.get("values", ())),
        )
    return VelocityProfile(mode="equal", value=float(value))


def _format_value(value):
    if isinstance(value, VelocityProfile):
        return f"{value.mode}:{value.value}"
    if isinstance(value, dict):
        return f"{value.get('mode', 'equal')}:{value.get('value', 0.0)}"
    return value


def run_sweep(spec: SweepSpec):
    """One ResultRow per (grid point x scheme pair), channel draws shared."""
    scn = build_scenario(spec.config, spec.seed)
    ss = np.random.SeedSequence(entropy=spec.seed, spawn_key=(1,))
    chan_rng = np.random.default_rng(ss)
    Kmax = spec.config.num_ues
    h0_full = draw_initial(scn.stats, chan_rng, num=spec.realizations)

    tasks = []
    for pi, value in enumerate(spec.grid):
        for si, (private, common) in enumerate(spec.scheme_pairs):
            tasks.append((pi, value, si, private, common))

    def run_one(task):
        pi, value, si, private, common = task
        t0 = time.perf_counter()
        calib_rng = np.random.default_rng(
            np.random.SeedSequence(entropy=spec.seed, spawn_key=(2, pi, si))
        )
        try:
            stats, rho_n, p_d, t, n = _point_inputs(spec, scn, value)
            h0 = h0_full[:, : stats.R.shape[0]]
            est = se_mod.se_samples(
                stats,
                rho_n,
                private,
                common,
                p_d,
                t,
                spec.config.noise_power,
                spec.realizations,
                calib_rng,
                h0=h0,
                calib_batch=spec.calib_batch,
                bisect_opts=spec.bisect_opts,
            )
            return ResultRow(
                sweep_variable=spec.variable,
                sweep_value=_format_value(value),
                private_scheme=private,
                common_scheme=common,
                transmit_power_dbm=watt_to_dbm(p_d),
                transmit_power_w=p_d,
                sum_se=est.mean,
                stderr=est.stderr,
                common_se=est.common_part,
                private_se=est.private_part,
                wall_time_s=time.perf_counter() - t0,
            )
        except (UnsupportedSchemeError, ConfigError, ValueError) as exc:
            return ResultRow(
                sweep_variable=spec.variable,
                sweep_value=_format_value(value),
                private_scheme=private,
                common_scheme=common,
                transmit_power_dbm=spec.config.downlink_power_dbm,
                transmit_power_w=spec.config.downlink_power,
                sum_se=float("nan"),
                stderr=float("nan"),
                common_se=float("nan"),
                private_se=float("nan"),
                wall_time_s=time.perf_counter() - t0,
                error=str(exc),
            )

    if spec.threads > 1:
        from joblib import Parallel, delayed

        rows = Parallel(n_jobs=spec.threads)(delayed(run_one)(t) for t in tasks)
    else:
        rows = [run_one(t) for t in tasks]
    return list(rows)


CSV_COLUMNS = (
    "sweep_variable",
    "sweep_value",
    "private_scheme",
    "common_scheme",
    "transmit_power_dbm",
    "transmit_power_w",
    "sum_se",
    "stderr",
    "common_se",
    "private_se",
    "error",
)

TIMING_COLUMNS = (
    "sweep_variable",
    "sweep_value",
    "private_scheme",
    "common_scheme",
    "wall_time_s",
)


def _fmt(x):
    if isinstance(x, float):
        return f"{x:.9g}"
    return str(x)


def write_csv(rows, path):
    """Deterministic CSV: fixed column order, floats at 9 significant digits.

    Wall-clock timing is deliberately not part of this file so that identical
    (config, seed) runs are byte-identical; use write_timing for that.
    """
    with open(path, "w", newline="") as fh:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(getattr(row, c)) for c in CSV_COLUMNS) + "\n")


def write_timing(rows, path):
    """Per-point wall-time sidecar (not deterministic across runs)."""
    with open(path, "w", newline="") as fh:
        fh.write(",".join(TIMING_COLUMNS) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(getattr(row, c)) for c in TIMING_COLUMNS) + "\n")


# ---------------------------------------------------------------------------
# closed-form validation

@dataclass(frozen=True)
class TermCheck:
    term: str
    ue: int
    closed_form: float
    oracle: float
    stderr: float
    z: float
    passed: bool


@dataclass(frozen=True)
class ValidationReport:
    term_checks: tuple
    bound_closed_form: float
    bound_mc: float
    bound_mc_stderr: float
    bound_ok: bool

    @property
    def all_passed(self):
        return self.bound_ok and all(c.passed for c in self.term_checks)


def validate_closed_form(
    config: ScenarioConfig, realizations=500, oracle_samples=200_000, seed=0, time_instant=10
):
    """Term-by-term oracle comparison plus the lower-bound cross-check.

    Any term beyond 3 standard errors fails the report.
    """
    scn = build_scenario(config, seed)
    n = time_instant
    rho_n = scn.aging.rho[:, n]
    p_d, t, sigma2 = config.downlink_power, config.power_split, config.noise_power
    _, terms = se_mod.closed_form_sum_se(scn.stats, rho_n, p_d, t, sigma2)
    oracle_rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(3,)))
    checks = []
    closed = {"ds_c": terms.ds_c, "int_c": terms.int_c, "ds_p": terms.ds_p, "int_p": terms.int_p}
    for term, cf in closed.items():
        est, err = se_mod.uatf_term_oracle(
            term, scn.stats, rho_n, p_d, t, oracle_samples, oracle_rng
        )
        for k in range(config.num_ues):
            scale = max(err[k], 1e-300)
            z = abs(est[k] - cf[k]) / scale
            exact_zero = cf[k] == 0.0 and abs(est[k]) <= 3 * err[k]
            checks.append(
                TermCheck(
                    term=term,
                    ue=k,
                    closed_form=float(cf[k]),
                    oracle=float(est[k]),
                    stderr=float(err[k]),
                    z=float(z),
                    passed=bool(z <= 3.0 or exact_zero),
                )
            )
    cf_se, _ = se_mod.closed_form_sum_se(scn.stats, rho_n, p_d, t, sigma2)
    mc_rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(4,)))
    est = se_mod.se_samples(
        scn.stats, rho_n, "mr", "superposition", p_d, t, sigma2, realizations, mc_rng
    )
    bound_ok = cf_se <= est.mean + 2.0 * est.stderr
    return ValidationReport(
        term_checks=tuple(checks),
        bound_closed_form=cf_se,
        bound_mc=est.mean,
        bound_mc_stderr=est.stderr,
        bound_ok=bool(bound_ok),
    )

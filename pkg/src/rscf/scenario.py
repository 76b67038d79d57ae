"""Scenario configuration, AP/UE geometry and large-scale channel statistics.

Everything downstream (channel draws, precoding, SE evaluation) consumes the
immutable objects built here: a ScenarioConfig with the global constants, a
Layout with positions and UE velocities, and LinkStatistics holding the
per-link spatial correlation matrices R_kl and large-scale gains beta_kl.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

SPEED_OF_LIGHT = 3e8  # m/s


def dbm_to_watt(p_dbm):
    return 10.0 ** ((p_dbm - 30.0) / 10.0)


def watt_to_dbm(p_watt):
    return 10.0 * np.log10(p_watt) + 30.0


class ConfigError(ValueError):
    """Raised when a scenario/config value is out of its allowed range."""


@dataclass(frozen=True)
class PathLossParams:
    """Three-slope path-loss model, dB domain.

    Far slope of 35 dB/decade beyond d1, 20 dB/decade between d0 and d1,
    constant below d0.  `intercept_db` is the gain at 1 km on the far slope.
    """

    intercept_db: float = -140.7
    d0: float = 10.0
    d1: float = 50.0
    d_min: float = 1.0
    shadow_sigma_db: float = 0.0  # 0 disables log-normal shadowing

    def __post_init__(self):
        if not (0 < self.d_min and 0 < self.d0 < self.d1):
            raise ConfigError("invalid geometry: require 0 < d_min, 0 < d0 < d1")


@dataclass(frozen=True)
class VelocityProfile:
    """UE speed assignment rule.

    mode 'equal': every UE moves at `value` m/s.
    mode 'per_ue': explicit list of K speeds.
    mode 'worst_fast': the UE with the smallest sum_l beta_kl moves at
    `value` m/s, every other UE is static.
    """

    mode: str = "equal"
    value: float = 0.0
    values: tuple = ()

    def __post_init__(self):
        if self.mode not in ("equal", "per_ue", "worst_fast"):
            raise ConfigError(f"unknown velocity mode {self.mode!r}")
        if self.mode == "per_ue" and len(self.values) == 0:
            raise ConfigError("per_ue velocity profile needs a speed list")
        speeds = self.values if self.mode == "per_ue" else (self.value,)
        if any(not np.isfinite(v) or v < 0 for v in speeds):
            raise ConfigError("velocities must be finite and nonnegative")


@dataclass(frozen=True)
class ScenarioConfig:
    num_aps: int = 10
    num_ues: int = 4
    antennas_per_ap: int = 2
    frame_length: int = 20
    area_side: float = 250.0
    downlink_power_dbm: float = 23.0
    noise_power_dbm: float = -96.0
    carrier_freq: float = 2e9
    bandwidth: float = 20e6  # informational only
    sampling_time: float = 67e-6
    power_split: float = 0.5
    rng_seed: int = 0
    velocity: VelocityProfile = field(default_factory=VelocityProfile)
    path_loss: PathLossParams = field(default_factory=PathLossParams)
    correlation_model: str = "uncorrelated"  # or "exponential"
    correlation_r: float = 0.0

    def __post_init__(self):
        if min(self.num_aps, self.num_ues, self.antennas_per_ap, self.frame_length) < 1:
            raise ConfigError("L, K, N, frame length must all be >= 1")
        if not 0.0 <= self.power_split <= 1.0:
            raise ConfigError("power split t must lie in [0, 1]")
        for name in ("area_side", "carrier_freq", "bandwidth", "sampling_time"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be strictly positive")
        if self.correlation_model not in ("uncorrelated", "exponential"):
            raise ConfigError(f"unknown correlation model {self.correlation_model!r}")
        if self.correlation_model == "exponential" and not 0.0 <= self.correlation_r < 1.0:
            raise ConfigError("exponential correlation parameter must lie in [0, 1)")
        if self.velocity.mode == "per_ue" and len(self.velocity.values) != self.num_ues:
            raise ConfigError("per_ue velocity list length must equal K")

    @property
    def downlink_power(self):
        """Per-AP downlink power in watts."""
        return dbm_to_watt(self.downlink_power_dbm)

    @property
    def noise_power(self):
        return dbm_to_watt(self.noise_power_dbm)

    def with_(self, **kwargs) -> "ScenarioConfig":
        return replace(self, **kwargs)

    @staticmethod
    def from_json(path) -> "ScenarioConfig":
        with open(path) as fh:
            raw = json.load(fh)
        return ScenarioConfig.from_dict(raw)

    @staticmethod
    def from_dict(raw: dict) -> "ScenarioConfig":
        raw = dict(raw)
        if "velocity" in raw:
            vel = raw["velocity"]
            raw["velocity"] = VelocityProfile(
                mode=vel.get("mode", "equal"),
                value=vel.get("value", 0.0),
                values=tuple(vel.get("values", ())),
            )
        if "path_loss" in raw:
            raw["path_loss"] = PathLossParams(**raw["path_loss"])
        known = ScenarioConfig.__dataclass_fields__.keys()
        unknown = set(raw) - set(known)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return ScenarioConfig(**raw)


@dataclass(frozen=True)
class Layout:
    ap_positions: np.ndarray  # (L, 2)
    ue_positions: np.ndarray  # (K, 2)
    ue_velocities: np.ndarray  # (K,)

    def __post_init__(self):
        if np.any(self.ue_velocities < 0) or not np.all(np.isfinite(self.ue_velocities)):
            raise ConfigError("velocities must be finite and nonnegative")


@dataclass(frozen=True)
class LinkStatistics:
    R: np.ndarray  # (K, L, N, N) complex, Hermitian PSD
    beta: np.ndarray  # (K, L) real

    @property
    def num_ues(self):
        return self.R.shape[0]

    @property
    def num_aps(self):
        return self.R.shape[1]

    @property
    def antennas_per_ap(self):
        return self.R.shape[2]


def path_loss(distance, params: PathLossParams = PathLossParams()) -> float:
    """Linear-scale large-scale gain of the three-slope model.

    Distances below `d_min` are clamped; the gain is continuous in distance
    and nonincreasing.
    """
    d = np.maximum(np.asarray(distance, dtype=float), params.d_min)
    if np.any(d <= 0):
        raise ConfigError("invalid geometry: nonpositive distance")
    d_eff = np.clip(d, params.d0, None)  # constant below d0
    far = d_eff > params.d1
    pl_db = np.where(
        far,
        params.intercept_db - 35.0 * np.log10(d_eff / 1000.0),
        params.intercept_db
        - 35.0 * np.log10(params.d1 / 1000.0)
        - 20.0 * np.log10(d_eff / params.d1),
    )
    return 10.0 ** (pl_db / 10.0)


def build_correlation(beta, N, model="uncorrelated", r=0.0) -> np.ndarray:
    """N x N Hermitian PSD spatial correlation matrix with trace N*beta."""
    if beta < 0:
        raise ConfigError("beta must be nonnegative")
    if model == "uncorrelated":
        return beta * np.eye(N, dtype=complex)
    if model == "exponential":
        if not 0.0 <= r < 1.0:
            raise ConfigError("exponential correlation parameter must lie in [0, 1)")
        idx = np.arange(N)
        return beta * (r ** np.abs(np.subtract.outer(idx, idx))).astype(complex)
    raise ConfigError(f"unknown correlation model {model!r}")


def assign_velocities(profile: VelocityProfile, beta_sums) -> np.ndarray:
    """Resolve a velocity profile into per-UE speeds.

    `beta_sums` (sum over APs of beta_kl, per UE) is only consulted for the
    'worst_fast' rule: the weakest UE gets the fast speed, the rest are 0.
    """
    beta_sums = np.asarray(beta_sums, dtype=float)
    K = beta_sums.shape[0]
    if profile.mode == "equal":
        return np.full(K, profile.value)
    if profile.mode == "per_ue":
        return np.asarray(profile.values, dtype=float)
    v = np.zeros(K)
    v[int(np.argmin(beta_sums))] = profile.value
    return v


def link_statistics(config: ScenarioConfig, layout: Layout, rng=None) -> LinkStatistics:
    """Build R_kl and beta_kl from geometry; beta_kl = tr(R_kl)/N by construction."""
    K, L, N = config.num_ues, config.num_aps, config.antennas_per_ap
    d = np.linalg.norm(
        layout.ue_positions[:, None, :] - layout.ap_positions[None, :, :], axis=-1
    )
    beta = path_loss(d, config.path_loss)
    if config.path_loss.shadow_sigma_db > 0:
        if rng is None:
            rng = np.random.default_rng(config.rng_seed)
        beta = beta * 10.0 ** (
            config.path_loss.shadow_sigma_db * rng.standard_normal((K, L)) / 10.0
        )
    R = np.empty((K, L, N, N), dtype=complex)
    for k in range(K):
        for l in range(L):
            R[k, l] = build_correlation(
                beta[k, l], N, config.correlation_model, config.correlation_r
            )
    return LinkStatistics(R=R, beta=beta)


def drop_layout(config: ScenarioConfig, rng) -> Layout:
    """Drop APs and UEs i.i.d. uniform over the square and assign velocities."""
    L, K = config.num_aps, config.num_ues
    ap_pos = rng.uniform(0.0, config.area_side, size=(L, 2))
    ue_pos = rng.uniform(0.0, config.area_side, size=(K, 2))
    d = np.linalg.norm(ue_pos[:, None, :] - ap_pos[None, :, :], axis=-1)
    beta_sums = path_loss(d, config.path_loss).sum(axis=1)
    v = assign_velocities(config.velocity, beta_sums)
    if v.shape != (K,):
        raise ConfigError("velocity profile does not match K")
    return Layout(ap_positions=ap_pos, ue_positions=ue_pos, ue_velocities=v)

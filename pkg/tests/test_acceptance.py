"""Acceptance gate: one test per release criterion, tolerances pinned.

Run with `pytest tests/test_acceptance.py -v` to get one pass/fail line per
criterion.  Scales are desk-sized but every threshold below is fixed; a
failure here blocks release.
"""

import time

import numpy as np
import scipy.special

from rscf import harness, maxmin, se
from rscf.channel import (
    age_channel,
    aging_coefficients,
    bessel_j0,
    draw_initial,
    hermitian_sqrt,
    stack_vectors,
)
from rscf.scenario import (
    LinkStatistics,
    ScenarioConfig,
    VelocityProfile,
    dbm_to_watt,
)


def _config(L, K, N=2, v=30.0, **kw):
    return ScenarioConfig(
        num_aps=L,
        num_ues=K,
        antennas_per_ap=N,
        velocity=VelocityProfile(mode="equal", value=v),
        **kw,
    )


def _sum_samples(est):
    return est.se_common_samples + est.se_private_samples.sum(axis=1)


def _paired(d):
    d = np.asarray(d)
    return d.mean(), d.std(ddof=1) / np.sqrt(len(d))


def test_01_closed_form_terms_match_oracle():
    """Each DS/INT term matches its Monte-Carlo oracle within 3 SE (2e5 samples)."""
    start = time.perf_counter()
    scn = harness.build_scenario(_config(L=4, K=2), seed=0)
    p_d, t, sigma2 = 0.2, 0.5, scn.config.noise_power
    failures = []
    for rho_val in (1.0, 0.9, 0.5):
        rho = np.full(2, rho_val)
        terms = se.closed_form_terms(scn.stats, rho, p_d, t, sigma2)
        closed = {
            "ds_c": terms.ds_c,
            "int_c": terms.int_c,
            "ds_p": terms.ds_p,
            "int_p": terms.int_p,
        }
        rng = np.random.default_rng(np.random.SeedSequence(entropy=0, spawn_key=(30,)))
        for name, cf in closed.items():
            est, err = se.uatf_term_oracle(name, scn.stats, rho, p_d, t, 200_000, rng)
            z = np.abs(est - cf) / np.maximum(err, 1e-300)
            if np.any(z > 3.0):
                failures.append((rho_val, name, z.max()))
    elapsed = time.perf_counter() - start
    assert not failures, f"terms beyond 3 SE: {failures}"
    assert elapsed <= 60.0, f"term validation took {elapsed:.1f}s > 60s"


def test_02_statistics_bound_below_monte_carlo():
    """Statistics-only sum SE <= MC sum SE + 2 SE across 20 seeded scenarios."""
    start = time.perf_counter()
    cfg = _config(L=10, K=4)
    bad = []
    for seed in range(20):
        scn = harness.build_scenario(cfg, seed=seed)
        rho = scn.aging.rho[:, 10]
        cf, _ = se.closed_form_sum_se(scn.stats, rho, cfg.downlink_power, 0.5, cfg.noise_power)
        est = se.se_samples(
            scn.stats, rho, "mr", "superposition", cfg.downlink_power, 0.5,
            cfg.noise_power, 500, np.random.default_rng(seed + 100),
        )
        if not cf <= est.mean + 2.0 * est.stderr:
            bad.append((seed, cf, est.mean, est.stderr))
    elapsed = time.perf_counter() - start
    assert not bad, f"bound violated on seeds: {bad}"
    assert elapsed <= 600.0, f"bound check took {elapsed:.1f}s > 600s"


def test_03_aging_trend():
    """Paired sum SE nonincreasing in n at v=30 (within 1 paired SE); flat at v=0."""
    for v in (30.0, 0.0):
        cfg = _config(L=10, K=4, v=v)
        scn = harness.build_scenario(cfg, seed=2)
        h0 = draw_initial(scn.stats, np.random.default_rng(11), num=500)
        samples = []
        for n in range(1, 21):
            est = se.se_samples(
                scn.stats, scn.aging.rho[:, n], "mr", "superposition",
                cfg.downlink_power, 0.5, cfg.noise_power, 500,
                np.random.default_rng(12), h0=h0,
            )
            samples.append(_sum_samples(est))
        for i in range(len(samples) - 1):
            mean, sd = _paired(samples[i] - samples[i + 1])
            if v == 30.0:
                assert mean + sd >= 0.0, f"SE increased at step n={i+1}->{i+2}: {mean}+-{sd}"
            else:
                assert abs(mean) <= max(sd, 1e-12), f"v=0 curve not flat at n={i+1}: {mean}+-{sd}"


def test_04_saturation_trend():
    """Power sweep 13/23/33/43 dBm, paired draws: without the common stream the
    high-power gain is < 25% of the low-power gain; with the split tuned on
    {0, 0.25, 0.5, 0.75, 1} at v=0 it stays > 60%."""
    cfg = _config(L=20, K=4, v=0.0)
    scn = harness.build_scenario(cfg, seed=3)
    rho = scn.aging.rho[:, 10]
    h0 = draw_initial(scn.stats, np.random.default_rng(21), num=300)

    def mean_se(p_dbm, t):
        est = se.se_samples(
            scn.stats, rho, "mr", "superposition", dbm_to_watt(p_dbm), t,
            cfg.noise_power, 300, np.random.default_rng(22), h0=h0,
        )
        return est.mean

    powers = (13.0, 23.0, 33.0, 43.0)
    no_rs = {p: mean_se(p, 0.0) for p in powers}
    ratio_no_rs = (no_rs[43.0] - no_rs[33.0]) / (no_rs[23.0] - no_rs[13.0])
    assert ratio_no_rs < 0.25, f"no-split gain ratio {ratio_no_rs:.3f} >= 0.25"

    grid = (0.0, 0.25, 0.5, 0.75, 1.0)
    rs = {p: max(mean_se(p, t) for t in grid) for p in powers}
    ratio_rs = (rs[43.0] - rs[33.0]) / (rs[23.0] - rs[13.0])
    assert ratio_rs > 0.60, f"tuned-split gain ratio {ratio_rs:.3f} <= 0.60"


def test_05_common_precoder_dominance():
    """Per realization, bisection min-SINR >= superposition - 1e-9; mean
    superposition min-SINR beats random by >= 3 SE.  Equal velocity 10 m/s."""
    cfg = _config(L=10, K=4, v=10.0)
    scn = harness.build_scenario(cfg, seed=4)
    rho = scn.aging.rho[:, 10]
    h0 = draw_initial(scn.stats, np.random.default_rng(31), num=500)

    ests = {}
    for common in ("superposition", "random"):
        ests[common] = se.se_samples(
            scn.stats, rho, "mr", common, cfg.downlink_power, 0.5,
            cfg.noise_power, 500, np.random.default_rng(32), h0=h0,
        )
    mean, sd = _paired(ests["superposition"].min_sinr_common - ests["random"].min_sinr_common)
    assert mean >= 3.0 * sd, f"superposition vs random: {mean}+-{sd}"

    S = 40
    eb = se.se_samples(
        scn.stats, rho, "mr", "bisection", cfg.downlink_power, 0.5,
        cfg.noise_power, S, np.random.default_rng(33), h0=h0[:S],
    )
    es = se.se_samples(
        scn.stats, rho, "mr", "superposition", cfg.downlink_power, 0.5,
        cfg.noise_power, S, np.random.default_rng(34), h0=h0[:S],
    )
    gap = eb.min_sinr_common - es.min_sinr_common
    assert np.min(gap) >= -1e-9, f"bisection below superposition by {-np.min(gap)}"


def test_06_private_precoder_ordering():
    """At t=0 the paired sum-SE ordering is cmmse >= lmmse >= mr, gaps >= 3 SE."""
    cfg = _config(L=10, K=4, v=30.0)
    scn = harness.build_scenario(cfg, seed=1)
    rho = scn.aging.rho[:, 10]
    h0 = draw_initial(scn.stats, np.random.default_rng(41), num=500)
    samples = {}
    for scheme in ("mr", "lmmse", "cmmse"):
        est = se.se_samples(
            scn.stats, rho, scheme, "superposition", cfg.downlink_power, 0.0,
            cfg.noise_power, 500, np.random.default_rng(42), h0=h0,
        )
        samples[scheme] = _sum_samples(est)
    for hi, lo in (("lmmse", "mr"), ("cmmse", "lmmse")):
        mean, sd = _paired(samples[hi] - samples[lo])
        assert mean >= 3.0 * sd, f"{hi} vs {lo}: gap {mean}+-{sd}"


def test_07_bisection_mechanics():
    """Termination with bracket <= epsilon, iteration bound, and recovery of
    the single-user analytic optimum within epsilon."""
    # single user, perfect CSI: optimum is p_d t |h|^2 / kappa
    h = np.array([[1.2 + 0.3j]])
    R = np.ones((1, 1, 1, 1), dtype=complex)
    rho = np.ones(1)
    v_p = h / np.linalg.norm(h)
    p_d, t, sigma2 = 2.0, 0.5, 1.0
    kappa = maxmin.compute_kappa(h, v_p, R, rho, p_d, t, sigma2)
    gamma_opt = p_d * t * np.linalg.norm(h) ** 2 / kappa[0]
    res = maxmin.bisection_common(h[0][None], v_p, R, rho, p_d, t, sigma2)
    assert res.converged
    assert abs(res.gamma_star - gamma_opt) <= res.epsilon + 1e-9

    # multiuser runs terminate inside the worst-case iteration budget
    rng = np.random.default_rng(51)
    K, L, N = 3, 3, 2
    beta = rng.uniform(0.5, 1.5, (K, L))
    stats = LinkStatistics(R=beta[..., None, None] * np.eye(N, dtype=complex), beta=beta)
    rho = np.full(K, 0.95)
    for _ in range(3):
        h0 = draw_initial(stats, rng)
        h_hat = stack_vectors(rho[:, None, None] * h0)
        mu = 1.0 / (rho[:, None] ** 2 * N * stats.beta)
        v_p = stack_vectors(np.sqrt(mu)[..., None] * rho[:, None, None] * h0)
        res = maxmin.bisection_common(h_hat, v_p, stats.R, rho, 2.0, 0.5, 0.3)
        assert res.converged
        budget = int(np.ceil(np.log2(max(res.gamma_max0 / res.epsilon, 2))))
        assert res.iterations <= budget, f"{res.iterations} > {budget}"


def test_08_channel_statistics():
    """Aged-channel sample covariance within 2% Frobenius at 1e5 draws, CSI
    error decorrelated, rho identity to 1e-12, J0 to 1e-10 on [0, 50]."""
    rng = np.random.default_rng(61)
    R = np.array([[2.0, 0.5 + 0.3j], [0.5 - 0.3j, 1.0]])
    stats = LinkStatistics(R=R[None, None], beta=np.array([[np.trace(R).real / 2]]))
    S = 100_000
    h0 = draw_initial(stats, rng, num=S)[:, 0, 0]
    rho = 0.8
    hn = age_channel(h0, rho, hermitian_sqrt(R), rng)
    cov = hn.conj()[:, :, None] * hn[:, None, :]
    assert np.linalg.norm(cov.mean(axis=0).T - R) <= 0.02 * np.linalg.norm(R)
    err = hn - rho * h0
    cross = (err.conj()[:, :, None] * (rho * h0)[:, None, :]).mean(axis=0)
    assert np.linalg.norm(cross) <= 0.02 * np.trace(R).real

    aging = aging_coefficients([0.0, 15.0, 60.0], 2e9, 67e-6, tau=20)
    assert np.max(np.abs(aging.rho**2 + aging.rho_bar**2 - 1.0)) <= 1e-12

    x = np.linspace(0.0, 50.0, 20001)
    assert np.max(np.abs(bessel_j0(x) - scipy.special.j0(x))) <= 1e-10


def test_09_deterministic_csv(tmp_path):
    """Identical config+seed gives byte-identical CSV in single-threaded mode."""
    spec = harness.SweepSpec(
        variable="power_split_t",
        grid=(0.0, 0.25, 0.5),
        config=_config(L=6, K=3),
        scheme_pairs=(("mr", "superposition"), ("lmmse", "random")),
        realizations=100,
        seed=9,
        threads=1,
    )
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    harness.write_csv(harness.run_sweep(spec), p1)
    harness.write_csv(harness.run_sweep(spec), p2)
    assert p1.read_bytes() == p2.read_bytes()

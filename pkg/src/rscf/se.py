"""Instantaneous SINRs, Monte-Carlo sum spectral efficiency, and the
statistics-only closed-form bound with its sampling oracles.

The sum SE at instant n is E{log2(1 + min_k SINR_c)} + sum_k E{log2(1 +
SINR_p)}: the common message is multicast (worst UE limits it), private
messages are unicast.  The closed form is a use-and-then-forget lower bound
valid for MR private precoding plus superposition common precoding, built
purely from R_kl traces and the aging coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import precoding
from .channel import complex_gaussian, hermitian_sqrt, stack_vectors, unstack_vectors
from .precoding import UnsupportedSchemeError


# ---------------------------------------------------------------------------
# instantaneous SINRs from outdated CSI and error covariances

@dataclass(frozen=True)
class SinrBreakdown:
    """Per-UE SINR terms; all arrays share leading batch dims and end in K."""

    common_num: np.ndarray
    private_leakage: np.ndarray
    common_error_leakage: np.ndarray
    private_error_leakage: np.ndarray
    noise: float
    sinr_common: np.ndarray
    private_num: np.ndarray
    private_cross_leakage: np.ndarray  # sum over i != k only
    sinr_private: np.ndarray


def error_quad_forms(R, rho_n, v_blocks):
    """v^H C_k v for every UE k; C_kl = (1 - rho_k^2) R_kl.

    R: (K, L, N, N); rho_n: (K,); v_blocks: (..., L, N).  Returns (..., K).
    """
    q = np.einsum("...li,klij,...lj->...k", np.conj(v_blocks), np.asarray(R), v_blocks)
    return (1.0 - np.asarray(rho_n) ** 2) * q.real


def sinr_breakdown(h_hat, v_common, v_private, q_common, q_private, p_d, t, sigma2):
    """Assemble common and private SINRs from precomputed inner products.

    h_hat: (..., K, LN); v_common: (..., LN); v_private: (..., K, LN);
    q_common: (..., K) = v_c^H C_k v_c; q_private: (..., K, K) with [k, i] =
    v_i^H C_k v_i.
    """
    K = h_hat.shape[-2]
    pref = p_d * (1.0 - t) / K
    gc = np.abs(np.einsum("...ki,...i->...k", np.conj(h_hat), v_common)) ** 2
    G = np.abs(np.einsum("...ki,...ji->...kj", np.conj(h_hat), v_private)) ** 2
    common_num = p_d * t * gc
    private_leakage = pref * G.sum(axis=-1)
    common_err = p_d * t * np.asarray(q_common)
    private_err = pref * np.asarray(q_private).sum(axis=-1)
    denom_c = private_leakage + common_err + private_err + sigma2
    diag = np.einsum("...kk->...k", G)
    private_num = pref * diag
    cross = pref * (G.sum(axis=-1) - diag)
    denom_p = cross + private_err + sigma2
    return SinrBreakdown(
        common_num=common_num,
        private_leakage=private_leakage,
        common_error_leakage=common_err,
        private_error_leakage=private_err,
        noise=sigma2,
        sinr_common=common_num / denom_c,
        private_num=private_num,
        private_cross_leakage=cross,
        sinr_private=private_num / denom_p,
    )


def sinr_common(k, h_hat, v_common, v_private, q_common, q_private, p_d, t, sigma2):
    bd = sinr_breakdown(h_hat, v_common, v_private, q_common, q_private, p_d, t, sigma2)
    return bd.sinr_common[..., k]


def sinr_private(k, h_hat, v_common, v_private, q_common, q_private, p_d, t, sigma2):
    bd = sinr_breakdown(h_hat, v_common, v_private, q_common, q_private, p_d, t, sigma2)
    return bd.sinr_private[..., k]


# ---------------------------------------------------------------------------
# Monte-Carlo sum SE

@dataclass(frozen=True)
class McEstimate:
    mean: float
    stderr: float
    common_part: float
    private_part: float
    se_common_samples: np.ndarray  # (S,) log2(1 + min_k sinr_c)
    se_private_samples: np.ndarray  # (S, K)
    min_sinr_common: np.ndarray  # (S,)


def build_precoders_batch(
    h_hat_blocks,
    stats,
    rho_n,
    private_scheme,
    common_scheme,
    p_d,
    t,
    sigma2,
    calib_rng=None,
    calib_batch=200,
):
    """Normalized private and common precoder batches for one time instant.

    Returns (v_private (S, K, L, N), v_common (S, L, N) or None for the
    bisection scheme, which is solved per realization elsewhere).
    """
    K, L, N = stats.R.shape[:3]
    trace_R = np.einsum("klii->kl", stats.R).real
    if private_scheme == "mr":
        mu = precoding.mr_mu(rho_n, trace_R)
        v_unnorm = np.asarray(h_hat_blocks)
        v_p = precoding.mr_private_batch(h_hat_blocks, mu)
        norms_common = 1.0 / np.nan_to_num(
            precoding.superposition_eta(rho_n, trace_R), nan=np.inf
        )
    elif private_scheme in ("lmmse", "cmmse"):
        if calib_rng is None:
            raise ValueError("MMSE schemes need a calibration RNG")
        C_blocks = (1.0 - np.asarray(rho_n)[:, None, None, None] ** 2) * stats.R
        norms_private, norms_common = precoding.calibrate_mmse_norms(
            stats, rho_n, private_scheme, p_d, t, sigma2, calib_rng, batch=calib_batch
        )
        v_unnorm = precoding.build_private_unnormalized(
            h_hat_blocks, C_blocks, private_scheme, p_d, t, sigma2
        )
        v_p = precoding.normalize_private(v_unnorm, private_scheme, norms_private)
    else:
        raise UnsupportedSchemeError(f"unknown private scheme {private_scheme!r}")

    if common_scheme == "random":
        S = np.asarray(h_hat_blocks).shape[0]
        v_c = np.broadcast_to(precoding.random_common(N, L), (S, L, N)).copy()
    elif common_scheme == "superposition":
        v_c = precoding.normalize_common_superposition(v_unnorm.sum(axis=1), norms_common)
    elif common_scheme == "bisection":
        v_c = None
    else:
        raise UnsupportedSchemeError(f"unknown common scheme {common_scheme!r}")
    return v_p, v_c


def se_samples(
    stats,
    rho_n,
    private_scheme,
    common_scheme,
    p_d,
    t,
    sigma2,
    num_realizations,
    rng,
    h0=None,
    calib_batch=200,
    bisect_opts=None,
):
    """Per-realization SE samples at one time instant.

    `h0` may be passed in to reuse channel draws across paired runs (common
    random numbers); otherwise it is drawn from `rng`.  Returns an
    McEstimate.
    """
    K, L, N = stats.R.shape[:3]
    rho_n = np.asarray(rho_n, dtype=float)
    if h0 is None:
        from .channel import draw_initial

        h0 = draw_initial(stats, rng, num=num_realizations)
    h_hat_blocks = rho_n[None, :, None, None] * h0  # (S, K, L, N)
    v_p_blocks, v_c_blocks = build_precoders_batch(
        h_hat_blocks,
        stats,
        rho_n,
        private_scheme,
        common_scheme,
        p_d,
        t,
        sigma2,
        calib_rng=rng,
        calib_batch=calib_batch,
    )
    h_hat = stack_vectors(np.swapaxes(h_hat_blocks, 1, 1))  # (S, K, LN)
    v_p = stack_vectors(v_p_blocks)
    q_private = np.stack(
        [error_quad_forms(stats.R, rho_n, v_p_blocks[:, i]) for i in range(K)], axis=-1
    )  # (S, K, K) [.., k, i]
    if common_scheme == "bisection":
        from .maxmin import bisection_common

        opts = bisect_opts or {}
        S = h_hat.shape[0]
        v_c = np.empty((S, L * N), dtype=complex)
        for s in range(S):
            res = bisection_common(
                h_hat[s], v_p[s], stats.R, rho_n, p_d, t, sigma2, **opts
            )
            v_c[s] = res.v_common
        v_c_blocks = unstack_vectors(v_c, L)
    else:
        v_c = stack_vectors(v_c_blocks)
    q_common = error_quad_forms(stats.R, rho_n, v_c_blocks)
    bd = sinr_breakdown(h_hat, v_c, v_p, q_common, q_private, p_d, t, sigma2)
    min_sinr_c = bd.sinr_common.min(axis=-1)
    se_c = np.log2(1.0 + min_sinr_c)
    se_p = np.log2(1.0 + bd.sinr_private)
    totals = se_c + se_p.sum(axis=-1)
    S = totals.shape[0]
    stderr = float(np.std(totals, ddof=1) / np.sqrt(S)) if S > 1 else 0.0
    return McEstimate(
        mean=float(np.mean(totals)),
        stderr=stderr,
        common_part=float(np.mean(se_c)),
        private_part=float(np.mean(se_p.sum(axis=-1))),
        se_common_samples=se_c,
        se_private_samples=se_p,
        min_sinr_common=min_sinr_c,
    )


def sum_se_monte_carlo(
    stats, aging, n, private_scheme, common_scheme, p_d, t, sigma2, num_realizations, rng, **kw
):
    """Monte-Carlo estimate of the achievable sum SE at time instant n."""
    if num_realizations < 1:
        raise ValueError("need at least one realization")
    return se_samples(
        stats,
        aging.rho[:, n],
        private_scheme,
        common_scheme,
        p_d,
        t,
        sigma2,
        num_realizations,
        rng,
        **kw,
    )


# ---------------------------------------------------------------------------
# closed-form bound (MR private + superposition common only)

@dataclass(frozen=True)
class ClosedFormTerms:
    ds_c: np.ndarray  # (K,)
    int_c: np.ndarray
    ds_p: np.ndarray
    int_p: np.ndarray
    mu: np.ndarray  # (K, L)
    eta: np.ndarray  # (L,)

    @property
    def sinr_common(self):
        return self.ds_c / (self.int_c + self.int_p + self.ds_p + self._sigma2)

    # sigma2 is attached post-construction by closed_form_terms
    _sigma2: float = 0.0

    @property
    def sinr_private(self):
        return self.ds_p / (self.int_p + self._sigma2)


def closed_form_terms(stats, rho_n, p_d, t, sigma2) -> ClosedFormTerms:
    """DS/INT terms of the statistics-only bound for MR + superposition."""
    rho_n = np.asarray(rho_n, dtype=float)
    K = stats.R.shape[0]
    trace_R = np.einsum("klii->kl", stats.R).real  # (K, L)
    trace_RR = np.einsum("ilab,klba->ikl", stats.R, stats.R).real  # (i, k, l)
    mu = precoding.mr_mu(rho_n, trace_R)
    eta = precoding.superposition_eta(rho_n, trace_R)
    sqrt_mu = np.sqrt(np.nan_to_num(mu))
    sqrt_eta = np.sqrt(np.nan_to_num(eta))
    pref = p_d * (1.0 - t) / K
    ds_c = p_d * t * rho_n**4 * np.abs((sqrt_eta[None, :] * trace_R).sum(axis=1)) ** 2
    int_c = (
        p_d
        * t
        * np.einsum("l,il,ikl->k", np.nan_to_num(eta), rho_n[:, None] ** 2 * np.ones_like(trace_R), trace_RR)
    )
    ds_p = pref * rho_n**4 * np.abs((sqrt_mu * trace_R).sum(axis=1)) ** 2
    int_p = pref * np.einsum("i,il,ikl->k", rho_n**2, np.nan_to_num(mu), trace_RR)
    return ClosedFormTerms(
        ds_c=ds_c, int_c=int_c, ds_p=ds_p, int_p=int_p, mu=mu, eta=eta, _sigma2=sigma2
    )


def closed_form_sum_se(stats, rho_n, p_d, t, sigma2, private_scheme="mr", common_scheme="superposition"):
    """Closed-form sum SE lower bound; only MR + superposition is covered."""
    if private_scheme != "mr" or common_scheme not in ("superposition",):
        raise UnsupportedSchemeError(
            "closed form is only available for MR private + superposition common"
        )
    terms = closed_form_terms(stats, rho_n, p_d, t, sigma2)
    se = np.log2(1.0 + terms.sinr_common.min()) + np.log2(1.0 + terms.sinr_private).sum()
    return float(se), terms


# ---------------------------------------------------------------------------
# sampling oracles for the closed-form expectations

def _draw_aged(stats, rho_n, num, rng):
    """(h, h_hat) batches at a single instant; shapes (S, K, L, N)."""
    K, L, N = stats.R.shape[:3]
    R_half = hermitian_sqrt(stats.R)
    h0 = np.einsum("klij,sklj->skli", R_half, complex_gaussian(rng, (num, K, L, N)))
    g = np.einsum("klij,sklj->skli", R_half, complex_gaussian(rng, (num, K, L, N)))
    rho = np.asarray(rho_n)[None, :, None, None]
    h = rho * h0 + np.sqrt(np.clip(1.0 - rho**2, 0.0, None)) * g
    return h, rho * h0


def uatf_term_oracle(term_id, stats, rho_n, p_d, t, num_samples, rng):
    """Monte-Carlo estimate of one closed-form term's raw expectation.

    Returns (estimate, stderr) as arrays over k ('ds_c', 'int_c', 'ds_p',
    'int_p') or over (k, l) ('upsilon1', 'upsilon2').  Intended for small
    dimensions only.
    """
    rho_n = np.asarray(rho_n, dtype=float)
    K = stats.R.shape[0]
    trace_R = np.einsum("klii->kl", stats.R).real
    h, h_hat = _draw_aged(stats, rho_n, num_samples, rng)
    S = num_samples
    pref = p_d * (1.0 - t) / K

    if term_id == "upsilon2":
        # E{h_kl^H hhat_kl} vs rho_k^2 tr R_kl, per (k, l)
        x = np.einsum("skli,skli->skl", np.conj(h), h_hat)
        return _mean_with_err(x, axis=0)
    if term_id == "upsilon1":
        # E{|sum_i h_kl^H hhat_il|^2} per (k, l)
        x = np.einsum("skla,sila->skl", np.conj(h), h_hat)
        y = np.abs(x) ** 2
        return _mean_with_err(y, axis=0)

    eta = np.nan_to_num(precoding.superposition_eta(rho_n, trace_R))
    mu = np.nan_to_num(precoding.mr_mu(rho_n, trace_R))
    if term_id in ("ds_c", "int_c"):
        # X_sk = sum_l h_kl^H v_cl^norm with v_cl^norm = sqrt(eta_l) sum_i hhat_il
        vc = np.sqrt(eta)[None, :, None] * h_hat.sum(axis=1)  # (S, L, N)
        x = np.einsum("skli,sli->sk", np.conj(h), vc)
        if term_id == "ds_c":
            m, se_m = _mean_with_err(x, axis=0)
            return p_d * t * np.abs(m) ** 2, p_d * t * 2.0 * np.abs(m) * se_m
        y = np.abs(x) ** 2
        m, _ = _mean_with_err(x, axis=0)
        my, se_y = _mean_with_err(y, axis=0)
        return p_d * t * (my - np.abs(m) ** 2), p_d * t * se_y
    if term_id in ("ds_p", "int_p"):
        # X_ski = sum_l h_kl^H sqrt(mu_il) hhat_il
        v = np.sqrt(mu)[None, :, :, None] * h_hat  # (S, K(i), L, N)
        x = np.einsum("skli,sjli->skj", np.conj(h), v)  # (S, k, i)
        diag = np.einsum("skk->sk", x)
        if term_id == "ds_p":
            m, se_m = _mean_with_err(diag, axis=0)
            return pref * np.abs(m) ** 2, pref * 2.0 * np.abs(m) * se_m
        y = np.abs(x) ** 2  # (S, k, i)
        m_diag, _ = _mean_with_err(diag, axis=0)
        my, se_y = _mean_with_err(y.sum(axis=-1), axis=0)
        return pref * (my - np.abs(m_diag) ** 2), pref * se_y
    raise ValueError(f"unknown term id {term_id!r}")


def _mean_with_err(x, axis=0):
    """Sample mean and standard error; complex means get the combined
    re/im standard error."""
    m = np.mean(x, axis=axis)
    S = x.shape[axis]
    if np.iscomplexobj(x):
        var = np.var(x.real, axis=axis, ddof=1) + np.var(x.imag, axis=axis, ddof=1)
    else:
        var = np.var(x, axis=axis, ddof=1)
    return m, np.sqrt(var / S)

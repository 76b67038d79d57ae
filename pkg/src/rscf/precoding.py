"""Private and common precoders with their normalization coefficients.

Private schemes: maximum ratio (mr), per-AP MMSE (lmmse), network-wide MMSE
(cmmse).  Non-optimized common schemes: superposition of the private
precoders and the fixed first-antenna ("random") precoder.  All precoders
are built from outdated CSI and error covariances only; true channels never
enter here.

Normalization divides by the root of the *expected* squared norm, so the
per-AP unit power constraint holds in expectation (analytically for MR and
superposition-over-MR, empirically via a calibration batch for the MMSE
schemes).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import complex_gaussian, hermitian_sqrt, stack_vectors

PRIVATE_SCHEMES = ("mr", "lmmse", "cmmse")
COMMON_SCHEMES = ("random", "superposition", "bisection")


class UnsupportedSchemeError(ValueError):
    pass


@dataclass(frozen=True)
class PrecoderSet:
    """Normalized precoders for one realization and time instant.

    v_common: (L*N,), v_private: (K, L*N), AP-major stacking.
    eta: (L,) common normalization; mu: (K, L) private normalization
    (NaN where undefined, the corresponding precoder block is zero).
    """

    v_common: np.ndarray
    v_private: np.ndarray
    eta: np.ndarray
    mu: np.ndarray
    common_scheme: str
    private_scheme: str


# ---------------------------------------------------------------------------
# analytic normalization coefficients (MR / superposition-over-MR)

def mr_mu(rho, trace_R):
    """mu_kl = 1 / (rho_k^2 tr R_kl); NaN where the denominator vanishes."""
    rho = np.asarray(rho, dtype=float)
    trace_R = np.asarray(trace_R, dtype=float)
    denom = rho[..., None] ** 2 * trace_R
    with np.errstate(divide="ignore"):
        return np.where(denom > 0, 1.0 / np.where(denom > 0, denom, 1.0), np.nan)


def superposition_eta(rho, trace_R):
    """eta_l = 1 / sum_i rho_i^2 tr R_il; NaN where every UE contributes zero."""
    rho = np.asarray(rho, dtype=float)
    denom = (rho[..., None] ** 2 * np.asarray(trace_R)).sum(axis=-2)
    with np.errstate(divide="ignore"):
        return np.where(denom > 0, 1.0 / np.where(denom > 0, denom, 1.0), np.nan)


# ---------------------------------------------------------------------------
# single-link / single-realization operations

def mr_private(h_hat_kl, rho_k, R_kl):
    """Normalized MR precoder sqrt(mu) * h_hat and its coefficient mu.

    rho = 0 or tr R = 0 yields a zero vector with mu = NaN: the UE simply
    contributes nothing from this AP.
    """
    tr = float(np.trace(R_kl).real)
    denom = rho_k**2 * tr
    if denom <= 0:
        return np.zeros_like(np.asarray(h_hat_kl)), float("nan")
    mu = 1.0 / denom
    return np.sqrt(mu) * np.asarray(h_hat_kl), mu


def local_mmse_private(h_hat_at_l, C_at_l, p_d, t, K, sigma2):
    """Unnormalized per-AP MMSE precoders for all K UEs at one AP.

    h_hat_at_l: (K, N), C_at_l: (K, N, N).  Returns (K, N).
    """
    h_hat_at_l = np.asarray(h_hat_at_l)
    N = h_hat_at_l.shape[-1]
    pref = p_d * (1.0 - t) / K
    M = sigma2 * np.eye(N, dtype=complex) + pref * (
        np.einsum("ki,kj->ij", h_hat_at_l, h_hat_at_l.conj()) + np.asarray(C_at_l).sum(axis=0)
    )
    try:
        sol = np.linalg.solve(M, h_hat_at_l.T).T
    except np.linalg.LinAlgError as exc:
        raise RuntimeError("ill-conditioned MMSE system") from exc
    return pref * sol


def centralized_mmse_private(h_hat_stacked, C_stacked, p_d, t, K, sigma2):
    """Unnormalized network-wide MMSE precoders; h_hat_stacked: (K, L*N)."""
    h_hat_stacked = np.asarray(h_hat_stacked)
    LN = h_hat_stacked.shape[-1]
    pref = p_d * (1.0 - t) / K
    M = sigma2 * np.eye(LN, dtype=complex) + pref * (
        np.einsum("ki,kj->ij", h_hat_stacked, h_hat_stacked.conj())
        + np.asarray(C_stacked).sum(axis=0)
    )
    try:
        sol = np.linalg.solve(M, h_hat_stacked.T).T
    except np.linalg.LinAlgError as exc:
        raise RuntimeError("ill-conditioned MMSE system") from exc
    return pref * sol


def superposition_common(private_unnormalized, eta):
    """Per-AP common precoder sqrt(eta_l) * sum_i v_il.

    private_unnormalized: (K, L, N); eta: (L,).  All-NaN eta entries give
    zero blocks.
    """
    vc = np.asarray(private_unnormalized).sum(axis=0)  # (L, N)
    scale = np.sqrt(np.nan_to_num(np.asarray(eta)))[:, None]
    return scale * vc


def random_common(N, L=1):
    """First-antenna common precoder e1 per AP; exact unit norm per AP."""
    if N < 1:
        raise ValueError("N must be >= 1")
    v = np.zeros((L, N), dtype=complex)
    v[:, 0] = 1.0
    return v


# ---------------------------------------------------------------------------
# batched builders used by the Monte-Carlo engine
# h_hat_blocks: (S, K, L, N) outdated CSI for S realizations

def mr_private_batch(h_hat_blocks, mu):
    """Normalized MR precoders, (S, K, L, N); zero where mu is undefined."""
    scale = np.sqrt(np.nan_to_num(np.asarray(mu)))[None, :, :, None]
    return scale * np.asarray(h_hat_blocks)


def local_mmse_batch(h_hat_blocks, C_blocks, p_d, t, K, sigma2):
    """Unnormalized local MMSE precoders, (S, K, L, N).

    C_blocks: (K, L, N, N) deterministic error covariances at this instant.
    """
    h = np.asarray(h_hat_blocks)
    S, K_, L, N = h.shape
    pref = p_d * (1.0 - t) / K
    # per (realization, AP) system matrix
    M = sigma2 * np.eye(N, dtype=complex) + pref * (
        np.einsum("skli,sklj->slij", h, h.conj()) + np.asarray(C_blocks).sum(axis=0)
    )
    rhs = np.moveaxis(h, 1, -1)  # (S, L, N, K)
    sol = np.linalg.solve(M, rhs)
    return pref * np.moveaxis(sol, -1, 1)


def centralized_mmse_batch(h_hat_stacked, C_sum, p_d, t, K, sigma2):
    """Unnormalized centralized MMSE precoders, (S, K, L*N).

    C_sum: (L*N, L*N), the sum over UEs of the stacked error covariances.
    """
    h = np.asarray(h_hat_stacked)
    S, K_, LN = h.shape
    pref = p_d * (1.0 - t) / K
    M = sigma2 * np.eye(LN, dtype=complex) + pref * (
        np.einsum("ski,skj->sij", h, h.conj()) + np.asarray(C_sum)
    )
    sol = np.linalg.solve(M, np.moveaxis(h, 1, -1))
    return pref * np.moveaxis(sol, -1, 1)


def expected_block_norms(v_blocks):
    """Sample mean of ||v_kl||^2 over the leading realization axis -> (K, L)."""
    return np.mean(np.sum(np.abs(np.asarray(v_blocks)) ** 2, axis=-1), axis=0)


def calibrate_mmse_norms(stats, rho_n, scheme, p_d, t, sigma2, rng, batch=200):
    """Empirical E{||v_kl||^2} for an MMSE private scheme and its superposition.

    Returns (norms_private (K, L), norms_common (L,)) estimated from `batch`
    independent channel realizations at aging level rho_n (K,).
    """
    K, L, N = stats.R.shape[:3]
    R_half = hermitian_sqrt(stats.R)
    h0 = np.einsum("klij,sklj->skli", R_half, complex_gaussian(rng, (batch, K, L, N)))
    h_hat = np.asarray(rho_n)[None, :, None, None] * h0
    C_blocks = (1.0 - np.asarray(rho_n)[:, None, None, None] ** 2) * stats.R
    v = build_private_unnormalized(h_hat, C_blocks, scheme, p_d, t, sigma2)
    vc = v.sum(axis=1)  # (S, L, N)
    norms_private = expected_block_norms(v)
    norms_common = np.mean(np.sum(np.abs(vc) ** 2, axis=-1), axis=0)
    return norms_private, norms_common


def build_private_unnormalized(h_hat_blocks, C_blocks, scheme, p_d, t, sigma2):
    """Dispatch to the unnormalized private precoder builder; (S, K, L, N)."""
    h = np.asarray(h_hat_blocks)
    S, K, L, N = h.shape
    if scheme == "mr":
        return h.copy()
    if scheme == "lmmse":
        return local_mmse_batch(h, C_blocks, p_d, t, K, sigma2)
    if scheme == "cmmse":
        from .channel import block_diag_covariance, unstack_vectors

        C_sum = block_diag_covariance(C_blocks).sum(axis=0)
        v = centralized_mmse_batch(stack_vectors(h), C_sum, p_d, t, K, sigma2)
        return unstack_vectors(v, L)
    raise UnsupportedSchemeError(f"unknown private scheme {scheme!r}")


def normalize_private(v_blocks, scheme, norms):
    """Apply the scheme's normalization to unnormalized private precoders.

    norms: (K, L) expected squared block norms (analytic 1/mu for MR,
    calibration estimates for MMSE).  MR and local MMSE normalize each block
    on its own; centralized MMSE scales the whole stacked vector by the
    strongest AP so the AP association survives.
    """
    norms = np.asarray(norms, dtype=float)
    if scheme in ("mr", "lmmse"):
        with np.errstate(divide="ignore", invalid="ignore"):
            scale = np.where(norms > 0, 1.0 / np.sqrt(norms), 0.0)
        return np.asarray(v_blocks) * scale[None, :, :, None]
    if scheme == "cmmse":
        peak = norms.max(axis=1)  # (K,)
        with np.errstate(divide="ignore"):
            scale = np.where(peak > 0, 1.0 / np.sqrt(peak), 0.0)
        return np.asarray(v_blocks) * scale[None, :, None, None]
    raise UnsupportedSchemeError(f"unknown private scheme {scheme!r}")


def normalize_common_superposition(v_blocks_sum, norms_common):
    """Scale the per-AP superposition sum by its expected norm; (S, L, N)."""
    norms = np.asarray(norms_common, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.where(norms > 0, 1.0 / np.sqrt(norms), 0.0)
    return np.asarray(v_blocks_sum) * scale[None, :, None]

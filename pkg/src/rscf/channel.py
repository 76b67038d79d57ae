"""Channel generation and Jakes-model aging.

The initial channels h0 are spatially correlated Rayleigh draws.  At data
time instant n the true channel is a rotation of h0 with an independent
innovation, the transmitter only knows the scaled copy rho_n * h0, and the
resulting error covariance is (1 - rho_n^2) * R.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scenario import SPEED_OF_LIGHT, ConfigError, LinkStatistics

_SERIES_SWITCH = 14.0


def bessel_j0(x):
    """Zeroth-order Bessel function of the first kind.

    Power series below x=14, Hankel asymptotic expansion above; absolute
    error below 1e-10 on [0, 50].
    """
    x = np.asarray(x, dtype=float)
    if np.any(np.isnan(x)):
        raise ValueError("bessel_j0: NaN input")
    if np.any(x < 0):
        raise ValueError("bessel_j0: negative input")
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    out = np.empty_like(x)
    small = x < _SERIES_SWITCH
    out[small] = _j0_series(x[small])
    out[~small] = _j0_asymptotic(x[~small])
    return out[0] if scalar else out


def _j0_series(x):
    # sum (-1)^m (x/2)^(2m) / (m!)^2, terms added until below 1e-18
    q = -0.25 * x * x
    term = np.ones_like(x)
    acc = np.ones_like(x)
    for m in range(1, 200):
        term = term * q / (m * m)
        acc += term
        if np.all(np.abs(term) < 1e-18):
            break
    return acc


def _j0_asymptotic(x):
    # J0(x) ~ sqrt(2/(pi x)) [P cos(x - pi/4) - Q sin(x - pi/4)]
    # a_m = a_{m-1} * (-(2m-1)^2) / (8m); stop at the smallest term.
    P = np.ones_like(x)
    Q = np.zeros_like(x)
    a = np.ones_like(x)
    inv_x = 1.0 / x
    power = np.ones_like(x)
    last = np.full_like(x, np.inf)
    for m in range(1, 40):
        a = a * (-((2 * m - 1) ** 2)) / (8.0 * m)
        power = power * inv_x
        term = a * power
        if np.all(np.abs(term) >= last):
            break
        last = np.abs(term)
        if m % 2 == 1:
            Q += term * (-1) ** ((m - 1) // 2)
        else:
            P += term * (-1) ** (m // 2)
        if np.all(np.abs(term) < 1e-18):
            break
    chi = x - np.pi / 4.0
    return np.sqrt(2.0 / (np.pi * x)) * (P * np.cos(chi) - Q * np.sin(chi))


def doppler_shift(v, f_c):
    """Doppler frequency v * f_c / c in Hz."""
    return np.asarray(v, dtype=float) * f_c / SPEED_OF_LIGHT


def temporal_correlation(v, f_c, T_s, n):
    """Aging coefficient rho = J0(2 pi f_D T_s n) for UE speed v at instant n."""
    v = np.asarray(v, dtype=float)
    if np.any(v < 0):
        raise ValueError("velocity must be nonnegative")
    if np.any(np.asarray(n) < 0):
        raise ValueError("time instant must be nonnegative")
    return bessel_j0(2.0 * np.pi * doppler_shift(v, f_c) * T_s * np.asarray(n))


@dataclass(frozen=True)
class AgingCoefficients:
    rho: np.ndarray  # (K, tau+1), rho[:, 0] == 1
    rho_bar: np.ndarray  # (K, tau+1), rho^2 + rho_bar^2 == 1
    doppler: np.ndarray  # (K,) Hz


def aging_coefficients(velocities, f_c, T_s, tau) -> AgingCoefficients:
    v = np.asarray(velocities, dtype=float)
    n = np.arange(tau + 1)
    rho = temporal_correlation(v[:, None], f_c, T_s, n[None, :])
    rho_bar = np.sqrt(np.clip(1.0 - rho**2, 0.0, None))
    return AgingCoefficients(rho=rho, rho_bar=rho_bar, doppler=doppler_shift(v, f_c))


def hermitian_sqrt(R, tol_scale=1e-12):
    """Square root of a Hermitian PSD matrix via eigendecomposition.

    Eigenvalues slightly negative from rounding are clamped to zero; a
    genuinely indefinite matrix raises.
    """
    R = np.asarray(R)
    w, V = np.linalg.eigh(R)
    tr = np.trace(R, axis1=-2, axis2=-1).real
    floor = -tol_scale * np.maximum(tr, 1.0)[..., None]
    if np.any(w < floor):
        raise ValueError("matrix is not positive semidefinite")
    w = np.clip(w, 0.0, None)
    return (V * np.sqrt(w)[..., None, :]) @ np.swapaxes(V.conj(), -1, -2)


def complex_gaussian(rng, shape):
    """CN(0, I) samples."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def draw_initial(stats: LinkStatistics, rng, num=None) -> np.ndarray:
    """Draw h_{kl,0} ~ CN(0, R_kl); returns (K, L, N) or (num, K, L, N)."""
    K, L, N = stats.R.shape[:3]
    R_half = hermitian_sqrt(stats.R)  # (K, L, N, N)
    shape = (K, L, N) if num is None else (num, K, L, N)
    z = complex_gaussian(rng, shape)
    return np.einsum("klij,...klj->...kli", R_half, z)


def age_channel(h0, rho, R_half, rng) -> np.ndarray:
    """h_n = rho * h0 + sqrt(1 - rho^2) * g with fresh innovation g ~ CN(0, R)."""
    rho = np.asarray(rho)
    if np.any(np.abs(rho) > 1 + 1e-12):
        raise ValueError("|rho| must be <= 1")
    g = np.einsum("...ij,...j->...i", R_half, complex_gaussian(rng, h0.shape))
    rho_bar = np.sqrt(np.clip(1.0 - rho**2, 0.0, None))
    return rho * h0 + rho_bar * g


def outdated_csi(h0, rho, R):
    """Outdated CSI h_hat = rho * h0 and error covariance C = (1 - rho^2) R."""
    rho = np.asarray(rho)
    return rho * h0, (1.0 - rho**2) * np.asarray(R)


@dataclass(frozen=True)
class ChannelState:
    """One realization of the whole resource block.

    h0:    (K, L, N) initial channels
    h:     (tau, K, L, N) true aged channels
    h_hat: (tau, K, L, N) outdated CSI, rho_n * h0
    C:     (tau, K, L, N, N) error covariances
    """

    h0: np.ndarray
    h: np.ndarray
    h_hat: np.ndarray
    C: np.ndarray


def realize_channels(stats: LinkStatistics, aging: AgingCoefficients, rng) -> ChannelState:
    """Generate one full ChannelState; innovations independent per instant."""
    K, L, N = stats.R.shape[:3]
    tau = aging.rho.shape[1] - 1
    R_half = hermitian_sqrt(stats.R)
    h0 = np.einsum("klij,klj->kli", R_half, complex_gaussian(rng, (K, L, N)))
    h = np.empty((tau, K, L, N), dtype=complex)
    h_hat = np.empty_like(h)
    C = np.empty((tau, K, L, N, N), dtype=complex)
    for n in range(1, tau + 1):
        rho_n = aging.rho[:, n][:, None, None]
        h[n - 1] = age_channel(h0, rho_n, R_half, rng)
        h_hat[n - 1] = rho_n * h0
        C[n - 1] = (1.0 - rho_n[..., None] ** 2) * stats.R
    return ChannelState(h0=h0, h=h, h_hat=h_hat, C=C)


def stack_vectors(blocks):
    """AP-major stacking (..., L, N) -> (..., L*N)."""
    blocks = np.asarray(blocks)
    return blocks.reshape(blocks.shape[:-2] + (-1,))


def unstack_vectors(stacked, L):
    """Inverse of stack_vectors."""
    stacked = np.asarray(stacked)
    N = stacked.shape[-1] // L
    return stacked.reshape(stacked.shape[:-1] + (L, N))


def block_diag_covariance(C_blocks):
    """(..., L, N, N) per-AP blocks -> (..., L*N, L*N) block-diagonal matrix."""
    C_blocks = np.asarray(C_blocks)
    *lead, L, N, _ = C_blocks.shape
    out = np.zeros((*lead, L * N, L * N), dtype=C_blocks.dtype)
    for l in range(L):
        out[..., l * N : (l + 1) * N, l * N : (l + 1) * N] = C_blocks[..., l, :, :]
    return out


@dataclass(frozen=True)
class NetworkCsi:
    """Network-wide stacked CSI for one realization.

    h_hat_stacked: (K, tau, L*N); C_block: (K, tau, L*N, L*N) block-diagonal.
    """

    h_hat_stacked: np.ndarray
    C_block: np.ndarray


def network_csi(state: ChannelState) -> "NetworkCsi":
    """Stack a ChannelState into network-wide LN-vectors and block matrices."""
    h_hat = np.swapaxes(stack_vectors(state.h_hat), 0, 1)  # (K, tau, LN)
    C = np.swapaxes(block_diag_covariance(state.C), 0, 1)  # (K, tau, LN, LN)
    return NetworkCsi(h_hat_stacked=h_hat, C_block=C)


def dump_channels(state: ChannelState, path):
    """Debug dump: raw little-endian float64, interleaved re/im, C order.

    Arrays are written back to back in the order h0, h, h_hat, C; shapes go
    to a JSON sidecar at `<path>.json`.
    """
    import json

    meta = {}
    with open(path, "wb") as fh:
        for name in ("h0", "h", "h_hat", "C"):
            arr = getattr(state, name)
            inter = np.empty(arr.shape + (2,), dtype="<f8")
            inter[..., 0] = arr.real
            inter[..., 1] = arr.imag
            fh.write(inter.tobytes(order="C"))
            meta[name] = list(arr.shape)
    with open(str(path) + ".json", "w") as fh:
        json.dump({"dtype": "<f8 interleaved re/im", "shapes": meta}, fh, indent=1)

"""Max-min common-message precoding via bisection over a convex
feasibility program.

The private precoders are fixed, so the private-side interference enters the
common SINR only through the constant kappa_k.  Bisection halves the
candidate SINR interval, each step solving a slack-minimization second-order
cone program under per-AP unit-norm constraints.  The printed constraint has
a complex left side; we use the convex restriction Re(h_hat_k^H v) >= rhs,
which is an inner approximation, and therefore always return the best of
{bisection solution, superposition precoder, random precoder} by recomputed
min-SINR.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import cvxpy as cp
import numpy as np

from .channel import block_diag_covariance, hermitian_sqrt


class BisectionConfigError(ValueError):
    pass


@dataclass(frozen=True)
class FeasibilityProblem:
    h_hat: np.ndarray  # (K, LN)
    C_half: np.ndarray  # (K, LN, LN) PSD square roots
    kappa: np.ndarray  # (K,)
    p_d_t: float  # p_d * t, common-message power
    num_aps: int
    per_ap_dim: int
    gamma: float


@dataclass(frozen=True)
class BisectionResult:
    v_common: np.ndarray  # (LN,)
    gamma_star: float
    iterations: int
    converged: bool
    selected_candidate: str  # bisection | superposition | random
    gamma_max0: float = 0.0
    epsilon: float = 0.0


def compute_kappa(h_hat, v_private, R, rho_n, p_d, t, sigma2):
    """kappa_k: private leakage + private error leakage + noise.

    h_hat, v_private: (K, LN); R: (K, L, N, N); rho_n: (K,).
    """
    K, L, N = R.shape[:3]
    pref = p_d * (1.0 - t) / K
    G = np.abs(np.einsum("ki,ji->kj", np.conj(h_hat), v_private)) ** 2
    v_blocks = np.asarray(v_private).reshape(K, L, N)
    # error covariance scale (1 - rho_k^2) belongs to the *receiving* UE k
    q = (1.0 - np.asarray(rho_n) ** 2)[:, None] * np.einsum(
        "jli,klim,jlm->kj", np.conj(v_blocks), np.asarray(R), v_blocks
    ).real
    return pref * G.sum(axis=1) + pref * q.sum(axis=1) + sigma2


def error_cov_half(R, rho_n):
    """Stacked block-diagonal C_k^(1/2), (K, LN, LN)."""
    C_blocks = (1.0 - np.asarray(rho_n)[:, None, None, None] ** 2) * np.asarray(R)
    halves = hermitian_sqrt(C_blocks)  # blockwise
    return block_diag_covariance(halves)


def min_common_sinr(v_common, h_hat, C_half, kappa, p_d_t):
    """min over UEs of the common SINR for a fixed common precoder."""
    num = p_d_t * np.abs(np.conj(h_hat) @ v_common) ** 2
    err = np.sum(np.abs(np.einsum("kij,j->ki", C_half, v_common)) ** 2, axis=1)
    return float(np.min(num / (p_d_t * err + kappa)))


def evaluate_constraints(v, problem: FeasibilityProblem):
    """Residuals of the feasibility constraints plus a complex-multiply tally.

    Residual_k = sqrt(gamma) ||u_k|| - sqrt(p_d t) Re(h_hat_k^H v); feasible
    means every residual <= 0 and every per-AP norm <= 1.
    """
    K, LN = problem.h_hat.shape
    L, N = problem.num_aps, problem.per_ap_dim
    flops = 0
    inner = np.conj(problem.h_hat) @ v
    flops += K * LN
    Cv = np.einsum("kij,j->ki", problem.C_half, v)
    flops += K * LN * LN
    u_sq = problem.p_d_t * np.sum(np.abs(Cv) ** 2, axis=1) + problem.kappa
    flops += K * (LN + 1)
    resid = np.sqrt(problem.gamma * u_sq) - np.sqrt(problem.p_d_t) * inner.real
    ap_norms = np.linalg.norm(v.reshape(L, N), axis=1)
    flops += L * N
    return resid, ap_norms, flops


def check_feasibility(problem: FeasibilityProblem, inner_tol=1e-6, inner_max_iter=10000, solver="CLARABEL"):
    """Slack-minimization SOCP; feasible iff the optimal slack is ~ 0.

    Returns (feasible, v or None, s_star).  The program is scaled by the
    noise floor before solving so the solver sees O(1) numbers.
    """
    K, LN = problem.h_hat.shape
    L, N = problem.num_aps, problem.per_ap_dim
    if problem.gamma <= 0:
        return True, np.zeros(LN, dtype=complex), 0.0
    # rescale: divide both constraint sides by sqrt(sigma-like floor)
    floor = float(np.min(problem.kappa))
    a = np.sqrt(problem.p_d_t / floor)
    h_s = a * problem.h_hat
    C_s = a * problem.C_half
    kap_s = problem.kappa / floor
    sq_g = np.sqrt(problem.gamma)
    v = cp.Variable(LN, complex=True)
    s = cp.Variable()
    cons = []
    for k in range(K):
        u = cp.hstack([C_s[k] @ v, np.sqrt(kap_s[k])])
        cons.append(sq_g * cp.norm(u) - cp.real(np.conj(h_s[k]) @ v) <= s)
    for l in range(L):
        cons.append(cp.norm(v[l * N : (l + 1) * N]) <= 1)
    prob = cp.Problem(cp.Minimize(s), cons)
    try:
        if solver == "CLARABEL":
            prob.solve(solver=solver, max_iter=inner_max_iter)
        else:
            prob.solve(solver=solver)
    except cp.error.SolverError as exc:
        raise RuntimeError(f"inner convex solve failed: {exc}") from exc
    if v.value is None:
        raise RuntimeError(f"inner convex solve returned no point ({prob.status})")
    scale = max(1.0, sq_g * float(np.sqrt(np.max(kap_s))))
    s_star = float(s.value)
    if s_star <= inner_tol * scale:
        sol = np.asarray(v.value, dtype=complex)
        # trim tiny constraint violations from solver tolerance
        norms = np.linalg.norm(sol.reshape(L, N), axis=1)
        over = norms > 1.0
        if np.any(over):
            blocks = sol.reshape(L, N)
            blocks[over] /= norms[over, None]
            sol = blocks.reshape(-1)
        return True, sol, s_star
    return False, None, s_star


def bisection_common(
    h_hat,
    v_private,
    R,
    rho_n,
    p_d,
    t,
    sigma2,
    epsilon=None,
    eps_rel=1e-3,
    max_iter=200,
    inner_tol=1e-6,
    inner_max_iter=10000,
    solver="CLARABEL",
    v_superposition=None,
):
    """Run the bisection and return the best common precoder found.

    `v_superposition` (stacked, expectation-normalized) is used both to
    initialize gamma_max and as a fallback candidate; when omitted it is
    rebuilt from the normalized private precoders with per-realization
    normalization.
    """
    K, L, N = R.shape[:3]
    LN = L * N
    if epsilon is not None and epsilon <= 0:
        raise BisectionConfigError("epsilon must be positive")
    p_d_t = p_d * t
    kappa = compute_kappa(h_hat, v_private, R, rho_n, p_d, t, sigma2)
    C_half = error_cov_half(R, rho_n)

    v_rand = np.zeros(LN, dtype=complex)
    v_rand[np.arange(L) * N] = 1.0
    if v_superposition is None:
        blocks = np.asarray(v_private).reshape(K, L, N).sum(axis=0)
        norms = np.linalg.norm(blocks, axis=1)
        blocks = np.where(norms[:, None] > 0, blocks / np.maximum(norms, 1e-300)[:, None], 0)
        v_superposition = blocks.reshape(-1)
    candidates = {"superposition": v_superposition, "random": v_rand}

    def score(v):
        return min_common_sinr(v, h_hat, C_half, kappa, p_d_t)

    gamma_max0 = 10.0 * _max_common_sinr(v_superposition, h_hat, C_half, kappa, p_d_t)
    eps = epsilon if epsilon is not None else eps_rel * max(gamma_max0, 1e-300)
    iterations = 0
    v_best = None
    if p_d_t > 0 and gamma_max0 > 0:
        gamma_lo, gamma_hi = 0.0, gamma_max0
        while gamma_hi - gamma_lo > eps and iterations < max_iter:
            gamma = 0.5 * (gamma_lo + gamma_hi)
            problem = FeasibilityProblem(
                h_hat=h_hat,
                C_half=C_half,
                kappa=kappa,
                p_d_t=p_d_t,
                num_aps=L,
                per_ap_dim=N,
                gamma=gamma,
            )
            try:
                feasible, v, _ = check_feasibility(
                    problem, inner_tol=inner_tol, inner_max_iter=inner_max_iter, solver=solver
                )
            except RuntimeError:
                feasible, v = False, None  # conservative: treat failures as infeasible
            if feasible:
                gamma_lo = gamma
                if np.any(v):
                    v_best = v
            else:
                gamma_hi = gamma
            iterations += 1
        converged = gamma_hi - gamma_lo <= eps
    else:
        converged = True
    if v_best is not None:
        candidates["bisection"] = v_best

    name, v_sel = max(candidates.items(), key=lambda kv: score(kv[1]))
    return BisectionResult(
        v_common=v_sel,
        gamma_star=score(v_sel),
        iterations=iterations,
        converged=converged,
        selected_candidate=name,
        gamma_max0=gamma_max0,
        epsilon=eps,
    )


def _max_common_sinr(v_common, h_hat, C_half, kappa, p_d_t):
    num = p_d_t * np.abs(np.conj(h_hat) @ v_common) ** 2
    err = np.sum(np.abs(np.einsum("kij,j->ki", C_half, v_common)) ** 2, axis=1)
    return float(np.max(num / (p_d_t * err + kappa)))

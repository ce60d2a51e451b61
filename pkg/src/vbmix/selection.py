"""Component-count selection: ELBO sweep, EM/BIC baseline, penalty predictions."""

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from . import family as fam
from .cavi import DEFAULT_MAX_ITER, DEFAULT_TOL, ModelPriors, fit_best, init_responsibilities
from .errors import NumericalError
from .mixture import Dataset, MixtureParams
from .numerics import log_sum_exp
from .rng import child_rng


@dataclass
class KRecord:
    """Per-K row of a selection sweep."""

    k: int
    elbo: float
    bic: float
    loglik: float
    elbo_init_tag: str
    elbo_converged: bool
    elbo_iterations: int


@dataclass
class SelectionReport:
    records: List[KRecord]
    k_hat_elbo: int
    k_hat_bic: int
    n: int
    phi0: float
    seed: int


@dataclass
class EMResult:
    theta: MixtureParams
    loglik: float
    trace: List[float] = field(default_factory=list)
    iterations: int = 0
    converged: bool = False
    init_tag: str = ""


def argmax_with_ties(values, tol: float = 1e-9) -> int:
    """Index of the maximum; ties within ``tol`` resolve to the smallest index."""
    vals = np.asarray(values, dtype=float)
    best = vals.max()
    return int(np.flatnonzero(vals >= best - tol)[0])


def predicted_lambda(K: int, K_star: int, d: int, phi0: float) -> float:
    """Predicted log n coefficient of the ELBO deficit for K >= K*.

    Singular regime (phi0 <= (d+1)/2): (K - K*) phi0 + (d K* + K* - 1)/2;
    regular regime: (d K + K - 1)/2.
    """
    if not K >= K_star >= 1:
        raise ValueError("requires K >= K_star >= 1")
    if d < 1 or not phi0 > 0.0:
        raise ValueError("requires d >= 1 and phi0 > 0")
    if phi0 <= (d + 1) / 2.0:
        return (K - K_star) * phi0 + (d * K_star + K_star - 1) / 2.0
    return (d * K + K - 1) / 2.0


def predicted_slope(phi0: float, d: int) -> float:
    """Slope of (ELBO_K - ELBO_{K*}) / log n per extra component: -min(phi0, (d+1)/2)."""
    if d < 1 or not phi0 > 0.0:
        raise ValueError("requires d >= 1 and phi0 > 0")
    return -min(phi0, (d + 1) / 2.0)


# ---------------------------------------------------------------------------
# EM / BIC baseline


def _m_step(spec: fam.FamilySpec, X: np.ndarray, R: np.ndarray):
    """Weighted MLE of (w, components) from responsibilities R; None if singular."""
    counts = R.sum(axis=0)
    if np.any(counts <= 0.0):
        return None
    w = counts / counts.sum()
    if spec.kind == fam.GAUSSIAN:
        comps = (R.T @ X) / counts[:, None]
    elif spec.kind == fam.EXPONENTIAL:
        sums = (R.T @ X)[:, 0]
        if np.any(sums <= 0.0):
            return None
        comps = (counts / sums)[:, None]
    else:
        comps = (R.T @ X) / (spec.trials * counts[:, None])
        # keep probabilities interior so log densities stay finite
        comps = np.maximum(comps, 1e-300)
    return w, comps


def _loglik_and_resp(spec, X, w, comps):
    from .mixture import log_density_matrix_for  # local import to avoid cycle

    theta = MixtureParams(spec, w / w.sum(), comps)
    with np.errstate(divide="ignore"):
        logits = np.log(theta.weights)[None, :] + log_density_matrix_for(theta, X)
    norm = log_sum_exp(logits, axis=1)
    return theta, float(norm.sum()), np.exp(logits - norm[:, None])


def _em_single(spec, X, rng, K, k_init, tol, max_iter):
    n = X.shape[0]
    R0 = init_responsibilities(n, K, k_init, rng)
    head = _m_step(spec, X, R0[:, :k_init])
    if head is None:
        return None
    comps = np.empty((K, spec.param_dim))
    comps[:k_init] = head[1]
    # components beyond the partition start at randomly chosen data rows
    for k in range(k_init, K):
        row = X[rng.integers(n)]
        if spec.kind == fam.GAUSSIAN:
            comps[k] = row
        elif spec.kind == fam.EXPONENTIAL:
            comps[k] = 1.0 / max(row[0], 0.01 * float(X.mean()) + 1e-12)
        else:
            comps[k] = (row + 0.5) / (spec.trials + 0.5 * spec.d)
    w = np.full(K, 1.0 / K)
    trace = []
    prev = -np.inf
    converged = False
    for _ in range(max_iter):
        theta, loglik, R = _loglik_and_resp(spec, X, w, comps)
        if not np.isfinite(loglik):
            return None
        trace.append(loglik)
        if abs(loglik - prev) <= tol * abs(loglik):
            converged = True
            break
        prev = loglik
        step = _m_step(spec, X, R)
        if step is None:
            return None
        w, comps = step
    return theta, trace, converged


def em_fit(
    data: Dataset,
    K: int,
    restarts: Optional[int] = None,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> EMResult:
    """Best-of-restarts EM for the mixture MLE.

    Restart j reuses the partition initializer with k_init = ((j-1) mod K)+1,
    mirroring the ELBO restarts; a restart whose M-step goes singular is
    re-initialized once from a fresh stream and dropped if that fails too.
    Raises NumericalError only when every restart degenerates.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    if restarts is None:
        restarts = K
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    spec, X = data.spec, data.observations
    best: Optional[EMResult] = None
    for j in range(1, restarts + 1):
        k_init = (j - 1) % K + 1
        outcome = _em_single(spec, X, child_rng(seed, "em.init", j), K, k_init, tol, max_iter)
        if outcome is None:
            outcome = _em_single(
                spec, X, child_rng(seed, "em.reinit", j), K, K, tol, max_iter
            )
        if outcome is None:
            continue
        theta, trace, converged = outcome
        result = EMResult(
            theta=theta,
            loglik=trace[-1],
            trace=trace,
            iterations=len(trace),
            converged=converged,
            init_tag=f"k_init={k_init} seed={seed}",
        )
        if best is None or result.loglik > best.loglik:
            best = result
    if best is None:
        raise NumericalError("all EM restarts degenerated")
    return best


def bic_penalty(K: int, free_dim: int, n: int) -> float:
    return (free_dim * K + K - 1) / 2.0 * float(np.log(n))


def bic(data: Dataset, K: int, em_result: EMResult) -> float:
    """loglik at the MLE minus ((dK + K - 1)/2) log n, d the free component dimension."""
    if em_result.theta.k != K:
        raise ValueError("em_result was fitted with a different K")
    return em_result.loglik - bic_penalty(K, data.spec.free_dim, data.n)


# ---------------------------------------------------------------------------
# the selection sweep


def select_k(
    data: Dataset,
    K_max: int,
    priors: ModelPriors,
    seed: int,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> SelectionReport:
    """Fit every K in {1, ..., K_max}; pick K by maximal ELBO (and BIC alongside).

    Ties within 1e-9 go to the smaller K.
    """
    if K_max < 1:
        raise ValueError("K_max must be >= 1")
    if data.n < K_max:
        raise ValueError("need n >= K_max")
    records = []
    for K in range(1, K_max + 1):
        fit = fit_best(data, K, priors, seed=int(child_rng(seed, "select.k", K).integers(2**63)),
                       tol=tol, max_iter=max_iter)
        em = em_fit(data, K, seed=int(child_rng(seed, "select.em", K).integers(2**63)),
                    tol=tol, max_iter=max_iter)
        records.append(
            KRecord(
                k=K,
                elbo=fit.elbo,
                bic=bic(data, K, em),
                loglik=em.loglik,
                elbo_init_tag=fit.init_tag,
                elbo_converged=fit.converged,
                elbo_iterations=fit.iterations,
            )
        )
    k_hat_elbo = records[argmax_with_ties([r.elbo for r in records])].k
    k_hat_bic = records[argmax_with_ties([r.bic for r in records])].k
    return SelectionReport(
        records=records,
        k_hat_elbo=k_hat_elbo,
        k_hat_bic=k_hat_bic,
        n=data.n,
        phi0=priors.phi0,
        seed=seed,
    )

"""Coordinate-ascent variational inference for finite mixtures.

State factorizes into a Dirichlet block over the mixing weights, one
conjugate block per component parameter, and a categorical block per
observation (the responsibilities p_ik).  One sweep updates the parameter
blocks from the current responsibilities (alpha_k = n_k + phi0 and the
conjugate component posteriors), then refreshes the responsibilities as
``p_ik proportional to exp{ E[log w_k] + E[log g(x_i; eta_k)] }``, and
evaluates the objective

    ELBO = -KL(q_w || pi_w) - sum_k KL(q_{eta_k} || pi_{eta_k})
           + sum_i log sum_k exp{ E[log w_k] + E[log g(x_i; eta_k)] }

whose last term is exactly the normalizer of the refreshed responsibilities,
so the objective is evaluated where its closed form is valid.  Empty
components are never pruned: alpha_k floors at phi0 and the component block
reverts toward its prior, which is what makes the emptying-out behaviour of
redundant components observable.
"""

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from . import family as fam
from .errors import NumericalError
from .mixture import Dataset
from .numerics import digamma, dirichlet_kl, log_sum_exp
from .rng import child_rng, child_seed

DEFAULT_TOL = 1e-8
DEFAULT_MAX_ITER = 500


@dataclass(frozen=True)
class ModelPriors:
    """Symmetric Dirichlet weight prior plus one shared component prior."""

    spec: fam.FamilySpec
    phi0: float
    component: object = None

    def __post_init__(self):
        if not self.phi0 > 0.0:
            raise ValueError("phi0 must be positive")
        if self.component is None:
            object.__setattr__(self, "component", fam.default_prior(self.spec))


@dataclass
class VariationalState:
    """Mean-field state after a sweep (see module docstring for invariants)."""

    responsibilities: np.ndarray
    counts: np.ndarray
    dirichlet_alpha: np.ndarray
    component_posteriors: List
    elbo_trace: List[float] = field(default_factory=list)


@dataclass
class FitResult:
    state: VariationalState
    elbo: float
    iterations: int
    converged: bool
    weight_means: np.ndarray
    component_means: np.ndarray
    init_tag: str


def init_responsibilities(n: int, K: int, k_init: int, seed) -> np.ndarray:
    """One-hot responsibilities from a random even split into k_init groups.

    A uniformly random permutation of the n indices is cut into k_init
    groups with sizes differing by at most one; group g occupies column g.
    """
    if not 1 <= k_init <= K:
        raise ValueError("k_init must lie in [1, K]")
    if n < K:
        raise ValueError("need n >= K observations")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    perm = rng.permutation(n)
    P = np.zeros((n, K))
    for k, grp in enumerate(np.array_split(perm, k_init)):
        P[grp, k] = 1.0
    return P


def update_component_blocks(data: Dataset, P: np.ndarray, priors: ModelPriors):
    """(alpha, component posteriors) from responsibilities P."""
    counts = P.sum(axis=0)
    alpha = counts + priors.phi0
    T = fam.sufficient_stat(priors.spec, data.observations)
    stat_sums = P.T @ T
    posts = [
        fam.posterior_update(priors.spec, priors.component, fam.WeightedStats(counts[k], stat_sums[k]))
        for k in range(P.shape[1])
    ]
    return alpha, posts


def _log_responsibility_numerators(data: Dataset, alpha, posts, spec) -> np.ndarray:
    elog_w = digamma(alpha) - digamma(float(np.sum(alpha)))
    return elog_w[None, :] + fam.expected_log_density_matrix(spec, posts, data.observations)


def update_responsibilities(data: Dataset, alpha, posts, spec: fam.FamilySpec) -> np.ndarray:
    """Row-normalized responsibilities, computed in log space."""
    logits = _log_responsibility_numerators(data, alpha, posts, spec)
    return np.exp(logits - log_sum_exp(logits, axis=1)[:, None])


def elbo(data: Dataset, P, alpha, posts, priors: ModelPriors) -> float:
    """Mean-field objective; assumes P was refreshed from (alpha, posts)."""
    logits = _log_responsibility_numerators(data, alpha, posts, priors.spec)
    return _elbo_from_logits(logits, alpha, posts, priors)


def _elbo_from_logits(logits, alpha, posts, priors: ModelPriors) -> float:
    kl_w = dirichlet_kl(alpha, priors.phi0)
    kl_eta = sum(fam.kl_to_prior(priors.spec, p, priors.component) for p in posts)
    return float(np.sum(log_sum_exp(logits, axis=1))) - kl_w - kl_eta


def run_cavi(
    data: Dataset,
    K: int,
    priors: ModelPriors,
    init: np.ndarray,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    init_tag: str = "custom",
) -> FitResult:
    """Alternate block updates until the relative ELBO change drops below tol.

    The ELBO is recorded once per full sweep; it is monotone non-decreasing
    up to roundoff.  A non-finite ELBO raises NumericalError with the sweep
    index.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    if not tol > 0.0:
        raise ValueError("tol must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    P = np.asarray(init, dtype=float)
    if P.shape != (data.n, K):
        raise ValueError(f"init responsibilities must have shape ({data.n}, {K})")
    trace: List[float] = []
    previous = -np.inf
    converged = False
    alpha = posts = None
    for sweep in range(1, max_iter + 1):
        # non-finite intermediates surface as the explicit check below
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            alpha, posts = update_component_blocks(data, P, priors)
            logits = _log_responsibility_numerators(data, alpha, posts, priors.spec)
            log_norm = log_sum_exp(logits, axis=1)
            P = np.exp(logits - log_norm[:, None])
            value = _elbo_from_logits(logits, alpha, posts, priors)
        if not np.isfinite(value):
            raise NumericalError(f"non-finite ELBO at sweep {sweep}", sweep=sweep)
        trace.append(value)
        if abs(value - previous) <= tol * abs(value):
            converged = True
            break
        previous = value
    # resync the parameter blocks to the stored responsibilities so that
    # counts = sum_i p_ik and alpha = counts + phi0 hold exactly
    alpha, posts = update_component_blocks(data, P, priors)
    state = VariationalState(
        responsibilities=P,
        counts=P.sum(axis=0),
        dirichlet_alpha=alpha,
        component_posteriors=posts,
        elbo_trace=trace,
    )
    weight_means = alpha / alpha.sum()
    component_means = np.stack([fam.posterior_mean(priors.spec, p) for p in posts])
    return FitResult(
        state=state,
        elbo=trace[-1],
        iterations=len(trace),
        converged=converged,
        weight_means=weight_means,
        component_means=component_means,
        init_tag=init_tag,
    )


def fit_best(
    data: Dataset,
    K: int,
    priors: ModelPriors,
    seed: int,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> FitResult:
    """Best of K restarts, one per k_init in {1, ..., K}.

    Restart seeds derive from the master seed; ties in the final ELBO keep
    the smallest k_init.  Restart failures propagate only if every restart
    fails.
    """
    best: Optional[FitResult] = None
    first_error: Optional[Exception] = None
    for k_init in range(1, K + 1):
        rng = child_rng(seed, "cavi.init", k_init)
        init = init_responsibilities(data.n, K, k_init, rng)
        tag = f"k_init={k_init} seed={seed}"
        try:
            result = run_cavi(data, K, priors, init, tol=tol, max_iter=max_iter, init_tag=tag)
        except NumericalError as err:
            first_error = first_error or err
            continue
        if best is None or result.elbo > best.elbo:
            best = result
    if best is None:
        raise first_error if first_error is not None else NumericalError("no restarts ran")
    return best


def restart_seed(seed: int, k_init: int):
    """SeedSequence used by fit_best for the given restart (for provenance)."""
    return child_seed(seed, "cavi.init", k_init)

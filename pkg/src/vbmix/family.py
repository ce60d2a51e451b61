"""Exponential-family mixture components and their conjugate updates.

Three families are supported, each in the canonical form
``g(x; eta) = exp{ <eta, T(x)> - T0(x) - A(eta) }`` with a conjugate prior:

``gaussian_location``
    d-dimensional Gaussian with known isotropic covariance ``sigma2 * I``;
    the user-facing component parameter is the mean ``mu``.  Convention:
    ``T(x) = x`` with the ``1/sigma2`` factor folded into the pairing, i.e.
    ``log g = <x, mu>/sigma2 - A(mu) - T0(x)`` with
    ``A(mu) = |mu|^2 / (2 sigma2)``, so ``fisher_info`` is ``I/sigma2``.
    Conjugate prior: ``N(m0, I/tau0)``.

``exponential_rate``
    Exponential with rate ``eta > 0`` on ``x >= 0``; ``T(x) = -x`` and
    ``A(eta) = -log eta`` (Fisher information ``1/eta^2``).  Conjugate
    prior: ``Gamma(a0, b0)`` (shape/rate).

``multinomial``
    ``Mult(M, eta)`` over ``d`` categories with the probability vector as
    the user-facing parameter; natural-parameter bookkeeping is internal in
    the minimal log-odds coordinates ``beta_j = log(eta_j / eta_d)``, where
    ``A(beta) = M log(1 + sum_j exp beta_j)`` and ``fisher_info`` is the
    (d-1) x (d-1) Hessian of that ``A``.  Conjugate prior:
    ``Dirichlet(beta0)``.

``posterior_update`` consumes weighted sufficient statistics
``WeightedStats(count, stat_sum)`` where ``stat_sum = sum_i p_ik T(x_i)``
under the sign conventions above.
"""

from dataclasses import dataclass, field

import numpy as np

from .numerics import digamma, dirichlet_kl_general, log_gamma

GAUSSIAN = "gaussian_location"
EXPONENTIAL = "exponential_rate"
MULTINOMIAL = "multinomial"

_KINDS = (GAUSSIAN, EXPONENTIAL, MULTINOMIAL)


@dataclass(frozen=True)
class FamilySpec:
    """Component family with its fixed hyperparameters.

    ``d`` is the parameter dimension (location dimension, 1 for the
    exponential family, category count for the multinomial).  ``sigma2``
    applies to ``gaussian_location`` only and ``trials`` (M) to
    ``multinomial`` only.
    """

    kind: str
    d: int
    sigma2: float = 1.0
    trials: int = 1

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown family kind {self.kind!r}")
        if self.d < 1:
            raise ValueError("parameter dimension d must be >= 1")
        if self.kind == EXPONENTIAL and self.d != 1:
            raise ValueError("exponential_rate has a single rate parameter")
        if self.kind == GAUSSIAN and not self.sigma2 > 0.0:
            raise ValueError("sigma2 must be positive")
        if self.kind == MULTINOMIAL:
            if self.trials < 1:
                raise ValueError("trial count M must be >= 1")
            if self.d < 2:
                raise ValueError("multinomial needs at least 2 categories")

    @property
    def obs_dim(self) -> int:
        """Number of columns an observation row occupies."""
        return 1 if self.kind == EXPONENTIAL else self.d

    @property
    def param_dim(self) -> int:
        """Length of the user-facing component parameter vector."""
        return 1 if self.kind == EXPONENTIAL else self.d

    @property
    def free_dim(self) -> int:
        """Free parameters per component (multinomial loses one to the simplex)."""
        if self.kind == MULTINOMIAL:
            return self.d - 1
        return self.param_dim


def gaussian_location(d: int, sigma2: float = 1.0) -> FamilySpec:
    return FamilySpec(GAUSSIAN, d, sigma2=sigma2)


def exponential_rate() -> FamilySpec:
    return FamilySpec(EXPONENTIAL, 1)


def multinomial(d: int, trials: int) -> FamilySpec:
    return FamilySpec(MULTINOMIAL, d, trials=trials)


@dataclass(frozen=True)
class GaussianParams:
    """Isotropic Gaussian ``N(mean, I/precision)`` over a location parameter."""

    mean: np.ndarray
    precision: float

    def __post_init__(self):
        object.__setattr__(self, "mean", np.asarray(self.mean, dtype=float))
        if not self.precision > 0.0:
            raise ValueError("precision must be positive")


@dataclass(frozen=True)
class GammaParams:
    """Gamma(shape, rate) over a positive rate parameter."""

    shape: float
    rate: float

    def __post_init__(self):
        if not (self.shape > 0.0 and self.rate > 0.0):
            raise ValueError("Gamma shape and rate must be positive")


@dataclass(frozen=True)
class DirichletParams:
    """Dirichlet over a probability vector."""

    concentration: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "concentration", np.asarray(self.concentration, dtype=float))
        if not np.all(self.concentration > 0.0):
            raise ValueError("Dirichlet concentrations must be positive")


@dataclass(frozen=True)
class WeightedStats:
    """Responsibility-weighted sufficient statistics for one component."""

    count: float
    stat_sum: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.count < 0.0:
            raise ValueError("count must be nonnegative")
        object.__setattr__(self, "stat_sum", np.asarray(self.stat_sum, dtype=float))
        if not np.all(np.isfinite(self.stat_sum)):
            raise ValueError("stat_sum must be finite")


def default_prior(spec: FamilySpec):
    """Default conjugate prior: N(0, I), Gamma(1, 1), or Dirichlet(1, ..., 1)."""
    if spec.kind == GAUSSIAN:
        return GaussianParams(np.zeros(spec.d), 1.0)
    if spec.kind == EXPONENTIAL:
        return GammaParams(1.0, 1.0)
    return DirichletParams(np.ones(spec.d))


# ---------------------------------------------------------------------------
# validation helpers


def validate_param(spec: FamilySpec, eta) -> np.ndarray:
    """Check eta lies in the family's (interior) domain; return it as a vector."""
    v = np.atleast_1d(np.asarray(eta, dtype=float))
    if v.shape != (spec.param_dim,):
        raise ValueError(f"component parameter must have shape ({spec.param_dim},)")
    if not np.all(np.isfinite(v)):
        raise ValueError("component parameter must be finite")
    if spec.kind == EXPONENTIAL and not v[0] > 0.0:
        raise ValueError("exponential rate must be positive")
    if spec.kind == MULTINOMIAL:
        if not np.all(v > 0.0) or abs(v.sum() - 1.0) > 1e-9:
            raise ValueError("multinomial parameter must be an interior simplex point")
    return v


def _obs_batch(spec: FamilySpec, x):
    """Normalize x to an (n, obs_dim) batch; remember if it was a single row."""
    arr = np.asarray(x, dtype=float)
    single = arr.ndim <= 1
    arr = np.atleast_2d(arr)
    if arr.shape[1] != spec.obs_dim:
        raise ValueError(f"observations must have {spec.obs_dim} column(s)")
    if not np.all(np.isfinite(arr)):
        raise ValueError("observations must be finite")
    if spec.kind == EXPONENTIAL and np.any(arr < 0.0):
        raise ValueError("exponential observations must be nonnegative")
    if spec.kind == MULTINOMIAL:
        if np.any(arr < 0.0) or np.any(arr != np.round(arr)):
            raise ValueError("multinomial observations must be nonnegative integer counts")
        if np.any(np.abs(arr.sum(axis=1) - spec.trials) > 0):
            raise ValueError(f"multinomial counts must sum to M={spec.trials}")
    return arr, single


def _squeeze(values: np.ndarray, single: bool):
    return float(values[0]) if single else values


# ---------------------------------------------------------------------------
# densities and sufficient statistics


def log_density(spec: FamilySpec, x, eta):
    """log g(x; eta).  ``x`` may be one observation or an (n, obs_dim) batch."""
    eta = validate_param(spec, eta)
    X, single = _obs_batch(spec, x)
    if spec.kind == GAUSSIAN:
        diff = X - eta[None, :]
        quad = np.einsum("ij,ij->i", diff, diff)
        out = -0.5 * spec.d * np.log(2.0 * np.pi * spec.sigma2) - quad / (2.0 * spec.sigma2)
    elif spec.kind == EXPONENTIAL:
        out = np.log(eta[0]) - eta[0] * X[:, 0]
    else:
        out = _log_multinomial_coef(spec, X) + X @ np.log(eta)
    return _squeeze(out, single)


def log_density_matrix(spec: FamilySpec, components: np.ndarray, x) -> np.ndarray:
    """(n, K) matrix of log g(x_i; eta_k) for a stack of component parameters."""
    comps = np.atleast_2d(np.asarray(components, dtype=float))
    X, _ = _obs_batch(spec, x)
    if spec.kind == GAUSSIAN:
        xsq = np.einsum("ij,ij->i", X, X)
        msq = np.einsum("ij,ij->i", comps, comps)
        quad = xsq[:, None] - 2.0 * X @ comps.T + msq[None, :]
        return -0.5 * spec.d * np.log(2.0 * np.pi * spec.sigma2) - quad / (2.0 * spec.sigma2)
    if spec.kind == EXPONENTIAL:
        rate = comps[:, 0]
        return np.log(rate)[None, :] - X[:, :1] * rate[None, :]
    return _log_multinomial_coef(spec, X)[:, None] + X @ np.log(comps).T


def _log_multinomial_coef(spec: FamilySpec, X: np.ndarray) -> np.ndarray:
    return log_gamma(float(spec.trials) + 1.0) - log_gamma(X + 1.0).sum(axis=1)


def sufficient_stat(spec: FamilySpec, x):
    """T(x): identity for Gaussian and multinomial counts, -x for the rate family."""
    X, single = _obs_batch(spec, x)
    T = -X if spec.kind == EXPONENTIAL else X
    return T[0] if single else T


# ---------------------------------------------------------------------------
# log-partition geometry


def natural_coord(spec: FamilySpec, eta) -> np.ndarray:
    """Coordinates in which ``log_partition`` is expressed (see module docstring)."""
    eta = validate_param(spec, eta)
    if spec.kind == MULTINOMIAL:
        return np.log(eta[:-1]) - np.log(eta[-1])
    return eta


def param_from_natural(spec: FamilySpec, coord) -> np.ndarray:
    coord = np.atleast_1d(np.asarray(coord, dtype=float))
    if spec.kind == MULTINOMIAL:
        z = np.concatenate([coord, [0.0]])
        z -= z.max()
        p = np.exp(z)
        return p / p.sum()
    return coord


def log_partition(spec: FamilySpec, coord) -> float:
    """A(.) in the family's documented coordinates."""
    coord = np.atleast_1d(np.asarray(coord, dtype=float))
    if spec.kind == GAUSSIAN:
        return float(coord @ coord) / (2.0 * spec.sigma2)
    if spec.kind == EXPONENTIAL:
        if not coord[0] > 0.0:
            raise ValueError("rate must be positive")
        return -float(np.log(coord[0]))
    m = max(0.0, float(coord.max()))
    return spec.trials * (m + np.log(np.exp(-m) + np.exp(coord - m).sum()))


def fisher_info(spec: FamilySpec, eta) -> np.ndarray:
    """Hessian of ``log_partition`` at eta's coordinates (positive definite)."""
    eta = validate_param(spec, eta)
    if spec.kind == GAUSSIAN:
        return np.eye(spec.d) / spec.sigma2
    if spec.kind == EXPONENTIAL:
        return np.array([[1.0 / eta[0] ** 2]])
    p = eta[:-1]
    return spec.trials * (np.diag(p) - np.outer(p, p))


# ---------------------------------------------------------------------------
# conjugate updates


def posterior_update(spec: FamilySpec, prior, stats: WeightedStats):
    """Conjugate posterior from prior plus responsibility-weighted statistics."""
    n_k = float(stats.count)
    s = np.atleast_1d(stats.stat_sum)
    if spec.kind == GAUSSIAN:
        precision = prior.precision + n_k / spec.sigma2
        mean = (prior.precision * prior.mean + s / spec.sigma2) / precision
        return GaussianParams(mean, precision)
    if spec.kind == EXPONENTIAL:
        # stat_sum = -sum p_ik x_i, so the rate gains +sum p_ik x_i
        return GammaParams(prior.shape + n_k, prior.rate - float(s[0]))
    return DirichletParams(prior.concentration + s)


def posterior_mean(spec: FamilySpec, post) -> np.ndarray:
    """Mean of q(eta) in the user-facing parameterization."""
    if spec.kind == GAUSSIAN:
        return np.array(post.mean, dtype=float)
    if spec.kind == EXPONENTIAL:
        return np.array([post.shape / post.rate])
    c = post.concentration
    return c / c.sum()


def expected_log_density(spec: FamilySpec, post, x):
    """E_{q(eta)}[ log g(x; eta) ] in closed form (batched like log_density)."""
    X, single = _obs_batch(spec, x)
    return _squeeze(expected_log_density_matrix(spec, [post], X)[:, 0], single)


def expected_log_density_matrix(spec: FamilySpec, posts, x) -> np.ndarray:
    """(n, K) matrix of E_{q(eta_k)}[ log g(x_i; eta_k) ]."""
    X, _ = _obs_batch(spec, x)
    if spec.kind == GAUSSIAN:
        m = np.stack([p.mean for p in posts])
        tau = np.array([p.precision for p in posts])
        xsq = np.einsum("ij,ij->i", X, X)
        msq = np.einsum("ij,ij->i", m, m)
        quad = xsq[:, None] - 2.0 * X @ m.T + msq[None, :]
        return -0.5 * spec.d * np.log(2.0 * np.pi * spec.sigma2) - (
            quad + spec.d / tau[None, :]
        ) / (2.0 * spec.sigma2)
    if spec.kind == EXPONENTIAL:
        a = np.array([p.shape for p in posts])
        b = np.array([p.rate for p in posts])
        return (digamma(a) - np.log(b))[None, :] - X[:, :1] * (a / b)[None, :]
    conc = np.stack([p.concentration for p in posts])
    elog = digamma(conc) - digamma(conc.sum(axis=1))[:, None]
    return _log_multinomial_coef(spec, X)[:, None] + X @ elog.T


def kl_to_prior(spec: FamilySpec, post, prior) -> float:
    """KL( q(eta) || pi(eta) ) between same-family distributions."""
    if spec.kind == GAUSSIAN:
        d = spec.d
        ratio = prior.precision / post.precision
        shift = post.mean - prior.mean
        val = 0.5 * (d * ratio + prior.precision * float(shift @ shift) - d - d * np.log(ratio))
    elif spec.kind == EXPONENTIAL:
        a, b = post.shape, post.rate
        a0, b0 = prior.shape, prior.rate
        val = (
            (a - a0) * digamma(a)
            - log_gamma(a)
            + log_gamma(a0)
            + a0 * (np.log(b) - np.log(b0))
            + a * (b0 - b) / b
        )
    else:
        return dirichlet_kl_general(post.concentration, prior.concentration)
    return max(float(val), 0.0)


def log_prior_density(spec: FamilySpec, prior, eta) -> float:
    """log pi(eta) under the conjugate prior, in the user-facing parameterization."""
    eta = validate_param(spec, eta)
    if spec.kind == GAUSSIAN:
        d = spec.d
        diff = eta - prior.mean
        return float(
            0.5 * d * np.log(prior.precision / (2.0 * np.pi))
            - 0.5 * prior.precision * diff @ diff
        )
    if spec.kind == EXPONENTIAL:
        a0, b0 = prior.shape, prior.rate
        return float(a0 * np.log(b0) - log_gamma(a0) + (a0 - 1.0) * np.log(eta[0]) - b0 * eta[0])
    c = prior.concentration
    return float(log_gamma(c.sum()) - log_gamma(c).sum() + (c - 1.0) @ np.log(eta))


def sample_prior(spec: FamilySpec, prior, rng: np.random.Generator) -> np.ndarray:
    """One draw of eta from the conjugate prior."""
    if spec.kind == GAUSSIAN:
        return prior.mean + rng.normal(size=spec.d) / np.sqrt(prior.precision)
    if spec.kind == EXPONENTIAL:
        return np.array([rng.gamma(prior.shape, 1.0 / prior.rate)])
    return rng.dirichlet(prior.concentration)


def sample_component(spec: FamilySpec, eta, size: int, rng: np.random.Generator) -> np.ndarray:
    """(size, obs_dim) i.i.d. draws from g(. ; eta)."""
    eta = validate_param(spec, eta)
    if spec.kind == GAUSSIAN:
        return eta[None, :] + np.sqrt(spec.sigma2) * rng.normal(size=(size, spec.d))
    if spec.kind == EXPONENTIAL:
        return rng.exponential(1.0 / eta[0], size=(size, 1))
    return rng.multinomial(spec.trials, eta, size=size).astype(float)


def observation_mean(spec: FamilySpec, eta) -> np.ndarray:
    """E[X | eta] (used by sampling-law checks and demos)."""
    eta = validate_param(spec, eta)
    if spec.kind == GAUSSIAN:
        return eta
    if spec.kind == EXPONENTIAL:
        return np.array([1.0 / eta[0]])
    return spec.trials * eta

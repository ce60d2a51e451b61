"""Finite mixtures: densities, sampling, and the induced mixing measure."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import family as fam
from .numerics import log_sum_exp
from .rng import child_rng


@dataclass(frozen=True)
class MixtureParams:
    """theta = (w, eta): weights on the K-simplex plus per-component parameters."""

    spec: fam.FamilySpec
    weights: np.ndarray
    components: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        comps = np.atleast_2d(np.asarray(self.components, dtype=float))
        if w.ndim != 1 or w.size < 1:
            raise ValueError("weights must be a nonempty vector")
        if np.any(w < 0.0) or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("weights must be nonnegative and sum to 1 (tol 1e-12)")
        if comps.shape != (w.size, self.spec.param_dim):
            raise ValueError(f"components must have shape (K, {self.spec.param_dim})")
        for row in comps:
            fam.validate_param(self.spec, row)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "components", comps)

    @property
    def k(self) -> int:
        return self.weights.size


@dataclass(frozen=True)
class MixingMeasure:
    """Discrete measure sum_k masses[k] * delta_{atoms[k]}."""

    atoms: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        atoms = np.atleast_2d(np.asarray(self.atoms, dtype=float))
        masses = np.asarray(self.masses, dtype=float)
        if masses.ndim != 1 or atoms.shape[0] != masses.size:
            raise ValueError("atoms and masses must have matching leading dimension")
        if np.any(masses < 0.0) or abs(masses.sum() - 1.0) > 1e-9:
            raise ValueError("masses must be nonnegative and sum to 1")
        if not np.all(np.isfinite(atoms)):
            raise ValueError("atoms must be finite")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "masses", masses)

    @property
    def k(self) -> int:
        return self.masses.size


@dataclass(frozen=True)
class Dataset:
    """n observation rows (and, when simulated, the latent component labels)."""

    spec: fam.FamilySpec
    observations: np.ndarray
    labels: Optional[np.ndarray] = None

    def __post_init__(self):
        X, _ = fam._obs_batch(self.spec, self.observations)
        if X.shape[0] < 1:
            raise ValueError("dataset must contain at least one observation")
        object.__setattr__(self, "observations", X)
        if self.labels is not None:
            lab = np.asarray(self.labels, dtype=int)
            if lab.shape != (X.shape[0],):
                raise ValueError("labels must be one integer per observation")
            object.__setattr__(self, "labels", lab)

    @property
    def n(self) -> int:
        return self.observations.shape[0]


def mixture_log_density(theta: MixtureParams, x):
    """log sum_k w_k g(x; eta_k) via log_sum_exp (zero weights contribute -inf)."""
    X, single = fam._obs_batch(theta.spec, x)
    logs = log_density_matrix_for(theta, X)
    with np.errstate(divide="ignore"):
        logw = np.log(theta.weights)
    out = log_sum_exp(logw[None, :] + logs, axis=1)
    return float(out[0]) if single else out


def log_density_matrix_for(theta: MixtureParams, X) -> np.ndarray:
    """(n, K) component log densities at theta."""
    return fam.log_density_matrix(theta.spec, theta.components, X)


def total_log_likelihood(theta: MixtureParams, data: Dataset) -> float:
    return float(np.sum(mixture_log_density(theta, data.observations)))


def sample(theta: MixtureParams, n: int, seed: int) -> Dataset:
    """n i.i.d. draws: S_i ~ Categorical(w), X_i ~ g(.; eta_{S_i}).

    Deterministic given the seed; labels are returned with the data.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = child_rng(seed, "mixture.sample")
    labels = rng.choice(theta.k, size=n, p=theta.weights)
    X = np.empty((n, theta.spec.obs_dim))
    for k in range(theta.k):
        idx = np.flatnonzero(labels == k)
        if idx.size:
            X[idx] = fam.sample_component(theta.spec, theta.components[k], idx.size, rng)
    return Dataset(theta.spec, X, labels)


def mixing_measure(theta: MixtureParams) -> MixingMeasure:
    """G(theta) with atoms eta_k and masses w_k; zero-weight atoms retained."""
    return MixingMeasure(theta.components.copy(), theta.weights.copy())


def canonicalize(measure: MixingMeasure, atol: float = 1e-12) -> MixingMeasure:
    """Drop zero-mass atoms and merge atoms closer than ``atol``.

    Applied only on explicit request: transport metrics must see the raw
    fitted atoms, identifiability checks need the canonical form.
    """
    keep = measure.masses > 0.0
    atoms = measure.atoms[keep]
    masses = measure.masses[keep]
    if atoms.shape[0] == 0:
        raise ValueError("canonicalization removed all atoms (zero total mass)")
    order = np.lexsort(atoms.T[::-1])
    atoms, masses = atoms[order], masses[order]
    out_atoms, out_masses = [atoms[0]], [masses[0]]
    for a, m in zip(atoms[1:], masses[1:]):
        if np.max(np.abs(a - out_atoms[-1])) <= atol:
            out_masses[-1] += m
        else:
            out_atoms.append(a)
            out_masses.append(m)
    masses = np.array(out_masses)
    return MixingMeasure(np.array(out_atoms), masses / masses.sum())

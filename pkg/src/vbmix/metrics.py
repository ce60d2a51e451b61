"""Discrepancies between mixing measures and between mixture densities.

The transport problem behind the r-Wasserstein distance is solved exactly:
support sizes here never exceed a dozen atoms, so the transportation LP is
tiny and the HiGHS simplex returns a vertex of the coupling polytope at
machine precision.
"""

import itertools

import numpy as np
from scipy.optimize import linprog

from .errors import CapacityError
from .mixture import MixingMeasure, MixtureParams, mixture_log_density
from . import family as fam

_MAX_TRANSPORT_ATOMS = 12
_MAX_ASSIGNMENTS = 20_000_000
_ASSIGNMENT_CHUNK = 262_144


def wasserstein(G: MixingMeasure, G2: MixingMeasure, r: int = 1) -> float:
    """r-Wasserstein distance between discrete mixing measures.

    Solves min_q sum_ij q_ij |eta_i - eta'_j|^r over couplings with marginals
    (masses, masses2), then takes the 1/r power.
    """
    if r < 1:
        raise ValueError("order r must be a positive integer")
    if G.atoms.shape[1] != G2.atoms.shape[1]:
        raise ValueError("atom dimensions differ")
    if abs(G.masses.sum() - G2.masses.sum()) > 1e-9:
        raise ValueError("total masses differ by more than 1e-9")
    K, K2 = G.k, G2.k
    if K > _MAX_TRANSPORT_ATOMS or K2 > _MAX_TRANSPORT_ATOMS:
        raise CapacityError(f"transport supports are limited to {_MAX_TRANSPORT_ATOMS} atoms")
    diff = G.atoms[:, None, :] - G2.atoms[None, :, :]
    cost = np.linalg.norm(diff, axis=2) ** r
    A_eq = np.zeros((K + K2, K * K2))
    for i in range(K):
        A_eq[i, i * K2 : (i + 1) * K2] = 1.0
    for j in range(K2):
        A_eq[K + j, j::K2] = 1.0
    b_eq = np.concatenate([G.masses, G2.masses])
    res = linprog(cost.ravel(), A_eq=A_eq, b_eq=b_eq, bounds=(0.0, None), method="highs")
    if res.status != 0:
        raise RuntimeError(f"transport LP failed: {res.message}")
    return float(max(res.fun, 0.0)) ** (1.0 / r)


def merged_weight_discrepancy(G: MixingMeasure, G_star: MixingMeasure) -> float:
    """inf over disjoint groups I_1..I_{K*} of sum_k |sum_{j in I_k} w_j - w*_k|.

    Exact enumeration: each of the K atoms is assigned to one of the K*
    groups or left out, giving (K*+1)^K candidate groupings.
    """
    K, Ks = G.k, G_star.k
    if K > _MAX_TRANSPORT_ATOMS or Ks > _MAX_TRANSPORT_ATOMS:
        raise CapacityError(f"enumeration is limited to {_MAX_TRANSPORT_ATOMS} atoms")
    total = (Ks + 1) ** K
    if total > _MAX_ASSIGNMENTS:
        raise CapacityError(f"{total} assignments exceed the enumeration budget")
    w = G.masses
    w_star = G_star.masses
    best = np.inf
    radix = Ks + 1
    for start in range(0, total, _ASSIGNMENT_CHUNK):
        codes = np.arange(start, min(start + _ASSIGNMENT_CHUNK, total), dtype=np.int64)
        cost = np.zeros(codes.size)
        rem = codes
        sums = np.zeros((codes.size, Ks))
        for j in range(K):
            digit = rem % radix
            rem = rem // radix
            for g in range(1, radix):
                sums[digit == g, g - 1] += w[j]
        cost = np.abs(sums - w_star[None, :]).sum(axis=1)
        best = min(best, float(cost.min()))
    return best


def redundant_mass(weights, K_star: int) -> float:
    """Sum of the K - K* smallest weights (mass on redundant components)."""
    w = np.asarray(weights, dtype=float)
    if np.any(w < 0.0) or abs(w.sum() - 1.0) > 1e-9:
        raise ValueError("weights must lie on the simplex")
    if not 1 <= K_star <= w.size:
        raise ValueError("requires K >= K_star >= 1")
    return float(np.sort(w)[: w.size - K_star].sum())


def component_param_error(theta_bar: MixtureParams, theta_star: MixtureParams) -> float:
    """min over matchings of the worst matched-component parameter error.

    Minimizes, over injections of the K* reference components into the K
    fitted ones, the max over matched pairs of |eta_fit - eta*| (Euclidean,
    user-facing parameterization).  Exact enumeration, K <= 10.
    """
    K, Ks = theta_bar.k, theta_star.k
    if K < Ks:
        raise ValueError("requires fitted K >= reference K*")
    if K > 10:
        raise CapacityError("matching enumeration is limited to K <= 10")
    D = np.linalg.norm(
        theta_bar.components[:, None, :] - theta_star.components[None, :, :], axis=2
    )
    best = np.inf
    for perm in itertools.permutations(range(K), Ks):
        worst = float(D[list(perm), range(Ks)].max())
        if worst < best:
            best = worst
    return best


def tv_distance_1d(theta: MixtureParams, theta_star: MixtureParams, tol: float = 1e-5,
                   pad_sd: float = 8.0, max_points: int = 2**21 + 1) -> float:
    """Total variation (1/2) int |p - p*| for 1-D continuous mixtures.

    Adaptive trapezoid on a domain covering ``pad_sd`` standard deviations
    of every component of both mixtures; the grid doubles until the change
    drops below tol/2.
    """
    spec = theta.spec
    if spec.kind == fam.GAUSSIAN and spec.d == 1:
        sd = float(np.sqrt(spec.sigma2))
        mus = np.concatenate([theta.components[:, 0], theta_star.components[:, 0]])
        lo, hi = mus.min() - pad_sd * sd, mus.max() + pad_sd * sd
    elif spec.kind == fam.EXPONENTIAL:
        scales = np.concatenate([1.0 / theta.components[:, 0], 1.0 / theta_star.components[:, 0]])
        lo, hi = 0.0, float(scales.max() * (1.0 + pad_sd))
    else:
        raise CapacityError("tv_distance_1d supports 1-D continuous families only")

    def integrand(grid):
        p = np.exp(mixture_log_density(theta, grid[:, None]))
        q = np.exp(mixture_log_density(theta_star, grid[:, None]))
        return np.abs(p - q)

    n = 1025
    grid = np.linspace(lo, hi, n)
    est = np.trapezoid(integrand(grid), grid)
    while n < max_points:
        n = 2 * n - 1
        grid = np.linspace(lo, hi, n)
        new = np.trapezoid(integrand(grid), grid)
        if abs(new - est) <= tol / 2.0:
            est = new
            break
        est = new
    return float(min(max(0.5 * est, 0.0), 1.0))

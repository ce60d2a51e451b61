"""Stepping-stone evidence vs the exact marginal likelihood and the ELBO.

For a single-component conjugate Gaussian model the log evidence has a
closed form, so the tempered-ladder Monte Carlo estimate can be checked
directly; the ELBO sits just below both, as a lower bound should.
"""

import math

import numpy as np

from vbmix import ChainSettings, ModelPriors, fit_best, stepping_stone_evidence
from vbmix.family import gaussian_location
from vbmix.mixture import Dataset

rng = np.random.default_rng(0)
X = rng.normal(1.0, 1.0, size=(100, 1))
data = Dataset(gaussian_location(1), X)
priors = ModelPriors(data.spec, 1.0)

# exact conjugate evidence (N(0,1) prior on the mean, sigma2 = 1)
n = X.shape[0]
tau_n = 1.0 + n
m_n = float(X.sum()) / tau_n
exact = (-0.5 * n * math.log(2 * math.pi) + 0.5 * math.log(1.0 / tau_n)
         - 0.5 * (float((X ** 2).sum()) - tau_n * m_n ** 2))

est = stepping_stone_evidence(
    data, K=1, priors=priors,
    settings=ChainSettings(n_samples=2000, burn_in=500, seed=4),
    n_rungs=30,
)
fit = fit_best(data, 1, priors, seed=1)

print(f"exact log evidence    : {exact:.4f}")
print(f"stepping-stone        : {est.log_evidence:.4f} +- {est.std_error:.4f}")
print(f"ELBO (lower bound)    : {fit.elbo:.4f}")
print(f"ladder rungs          : {len(est.ladder)}, "
      f"acceptance {est.acceptance_rates.min():.2f}..{est.acceptance_rates.max():.2f}")

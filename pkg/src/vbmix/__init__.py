"""Mixture component-count selection by mean-field ELBO maximization.

The package fits finite mixtures of exponential-family components with
coordinate-ascent variational inference under a symmetric Dirichlet weight
prior, selects the number of components by maximizing the converged ELBO,
and ships the diagnostics used to study that selector: EM/BIC baselines,
exact discrete transport distances between mixing measures, penalty-slope
predictions, and a stepping-stone MCMC estimate of the model evidence.
"""

__version__ = "0.1.0"

from .family import (
    DirichletParams,
    FamilySpec,
    GammaParams,
    GaussianParams,
    WeightedStats,
    default_prior,
    expected_log_density,
    exponential_rate,
    fisher_info,
    gaussian_location,
    kl_to_prior,
    log_density,
    multinomial,
    posterior_mean,
    posterior_update,
    sufficient_stat,
)
from .mixture import (
    Dataset,
    MixingMeasure,
    MixtureParams,
    canonicalize,
    mixing_measure,
    mixture_log_density,
    sample,
)
from .cavi import (
    FitResult,
    ModelPriors,
    VariationalState,
    elbo,
    fit_best,
    init_responsibilities,
    run_cavi,
    update_component_blocks,
    update_responsibilities,
)
from .selection import (
    KRecord,
    SelectionReport,
    bic,
    em_fit,
    predicted_lambda,
    predicted_slope,
    select_k,
)
from .metrics import (
    component_param_error,
    merged_weight_discrepancy,
    redundant_mass,
    tv_distance_1d,
    wasserstein,
)
from .evidence import (
    ChainSettings,
    EvidenceEstimate,
    mh_posterior_sample,
    rlct_location_gaussian,
    stepping_stone_evidence,
    theoretical_evidence_curve,
)
from .errors import CapacityError, DataError, NumericalError

__all__ = [
    "CapacityError",
    "ChainSettings",
    "DataError",
    "Dataset",
    "DirichletParams",
    "EvidenceEstimate",
    "FamilySpec",
    "FitResult",
    "GammaParams",
    "GaussianParams",
    "KRecord",
    "MixingMeasure",
    "MixtureParams",
    "ModelPriors",
    "NumericalError",
    "SelectionReport",
    "VariationalState",
    "WeightedStats",
    "bic",
    "canonicalize",
    "component_param_error",
    "default_prior",
    "elbo",
    "em_fit",
    "expected_log_density",
    "exponential_rate",
    "fisher_info",
    "fit_best",
    "gaussian_location",
    "init_responsibilities",
    "kl_to_prior",
    "log_density",
    "merged_weight_discrepancy",
    "mh_posterior_sample",
    "mixing_measure",
    "mixture_log_density",
    "multinomial",
    "posterior_mean",
    "posterior_update",
    "predicted_lambda",
    "predicted_slope",
    "redundant_mass",
    "rlct_location_gaussian",
    "run_cavi",
    "sample",
    "select_k",
    "stepping_stone_evidence",
    "sufficient_stat",
    "theoretical_evidence_curve",
    "tv_distance_1d",
    "update_component_blocks",
    "update_responsibilities",
    "wasserstein",
]

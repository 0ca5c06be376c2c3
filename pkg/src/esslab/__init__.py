"""esslab: importance-sampling effective-sample-size diagnostics.

The package separates what people usually conflate:

* ``diagnostics`` -- the weight-only rule of thumb 1 / sum(wbar^2) and its
  algebraic relatives (CV, distance-to-uniform, delta-method chain),
* ``ground_truth`` -- the replication engine that measures the actual
  variance and MSE ratios the rule of thumb is supposed to approximate,
* ``experiments`` -- deterministic CSV sweeps showing where the two differ.
"""

from .distributions import (
    Density,
    Gaussian1D,
    GaussianMixture1D,
    InfiniteVarianceError,
    ScaledDensity,
    chi2_gaussian,
)
from .estimators import (
    CsvFormatError,
    TailIndicator,
    WeightedSampleSet,
    compute_weights,
    identity,
    normalize_log_weights,
    raw_mc_estimate,
    snis_estimate,
    uis_estimate,
)
from .diagnostics import (
    DeltaChain,
    EssReport,
    NoMassUnderHError,
    convex_combination_variance,
    cv,
    ess_delta_chain,
    ess_hat,
    ess_hat_from_unnormalized,
    ess_hat_h,
    ess_report,
    l2_discrepancy,
)
from .ground_truth import (
    GroundTruth,
    ReplicationPlan,
    estimate_zhat_variance,
    rrmse,
    run_replication,
)
from .mis import MisScheme, ess_mis, mis_sample, mixture_log_weight
from .seeding import RandomStream, stream, substream, substream_seed

__all__ = [
    "Density", "Gaussian1D", "GaussianMixture1D", "ScaledDensity",
    "InfiniteVarianceError", "chi2_gaussian",
    "CsvFormatError", "TailIndicator", "WeightedSampleSet", "compute_weights",
    "identity", "normalize_log_weights", "raw_mc_estimate", "snis_estimate",
    "uis_estimate",
    "DeltaChain", "EssReport", "NoMassUnderHError",
    "convex_combination_variance", "cv", "ess_delta_chain", "ess_hat",
    "ess_hat_from_unnormalized", "ess_hat_h", "ess_report", "l2_discrepancy",
    "GroundTruth", "ReplicationPlan", "estimate_zhat_variance", "rrmse",
    "run_replication",
    "MisScheme", "ess_mis", "mis_sample", "mixture_log_weight",
    "RandomStream", "stream", "substream", "substream_seed",
]

__version__ = "0.1.0"

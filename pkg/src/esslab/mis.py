"""Multiple importance sampling schemes N1, N3, R3.

All three use J proposals with the implied equal-weight mixture
psi = (1/J) sum_j q_j:

* N1 -- equal deterministic allocation (total/J draws per proposal), each
  sample weighted by its own proposal: w = target / q_j,
* N3 -- same allocation, deterministic-mixture weights: w = target / psi,
* R3 -- iid sampling from psi, weights w = target / psi.

N3 and R3 share the weight function (see ``mixture_log_weight``); they
differ only in how samples are allocated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distributions import Density, Gaussian1D, GaussianMixture1D
from .estimators import WeightedSampleSet, compute_weights
from .seeding import RandomStream

SCHEME_KINDS = ("N1", "N3", "R3")


@dataclass(frozen=True)
class MisScheme:
    """A MIS sampling/weighting rule over a list of proposals.

    The total sample count is supplied at sampling time; for N1 and N3 it
    must be a multiple of the proposal count J.
    """

    kind: str
    proposals: tuple[Gaussian1D, ...]

    def __post_init__(self) -> None:
        if self.kind not in SCHEME_KINDS:
            raise ValueError(f"kind must be one of {SCHEME_KINDS}, got {self.kind!r}")
        object.__setattr__(self, "proposals", tuple(self.proposals))
        if len(self.proposals) < 1:
            raise ValueError("need at least one proposal")
        if not all(isinstance(q, Gaussian1D) for q in self.proposals):
            raise TypeError("MIS proposals must be Gaussian1D densities")

    @property
    def j(self) -> int:
        return len(self.proposals)

    def mixture(self) -> GaussianMixture1D:
        """The equal-weight proposal mixture psi = (1/J) sum_j q_j."""
        w = 1.0 / self.j
        return GaussianMixture1D(tuple((w, q) for q in self.proposals))


def mixture_log_weight(scheme: MisScheme, target: Density, x) -> np.ndarray:
    """log target(x) - log psi(x): the common N3/R3 weight function."""
    psi = scheme.mixture()
    return np.asarray(target.log_density(x), dtype=float) - np.asarray(
        psi.log_density(x), dtype=float
    )


def mis_sample(scheme: MisScheme, target: Density, rng: RandomStream,
               total_n: int) -> WeightedSampleSet:
    """Draw total_n weighted samples under the scheme's sampling rule.

    N1/N3 draw exactly total_n / J samples from each proposal, in proposal
    order; R3 draws total_n iid samples from the mixture.
    """
    if total_n < 1:
        raise ValueError("total_n must be >= 1")
    j = scheme.j
    if scheme.kind in ("N1", "N3") and total_n % j != 0:
        raise ValueError(f"total_n={total_n} must be a multiple of J={j} for {scheme.kind}")

    if scheme.kind == "R3":
        x = scheme.mixture().sample(rng, total_n)
        lw = mixture_log_weight(scheme, target, x)
        return WeightedSampleSet(x, lw, provenance="R3")

    per = total_n // j
    blocks = [q.sample(rng, per) for q in scheme.proposals]
    x = np.concatenate(blocks)
    if scheme.kind == "N1":
        lw = np.concatenate([
            compute_weights(target, q, b).log_weights
            for q, b in zip(scheme.proposals, blocks)
        ])
        return WeightedSampleSet(x, lw, provenance="N1")
    return WeightedSampleSet(x, mixture_log_weight(scheme, target, x), provenance="N3")


def ess_mis(total_n: int, var_zhat: float) -> float:
    """ESS extension for MIS: N / (1 + Var[Zhat]).

    ``var_zhat`` is the variance of the normalizing-constant estimator
    Zhat = (1/N) sum_n w_n computed over the whole set of proposals; it has
    no single-run plug-in here and is estimated by replication (see
    ``ground_truth.estimate_zhat_variance``).
    """
    if total_n < 1:
        raise ValueError("total_n must be >= 1")
    if var_zhat < 0.0:
        raise ValueError("var_zhat must be >= 0")
    return total_n / (1.0 + var_zhat)

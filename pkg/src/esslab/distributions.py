"""Target and proposal densities: univariate Gaussians and finite mixtures.

All densities are immutable, evaluate their log-density exactly (no
underflow: the log is computed directly), know their normalizing constant,
and carry an exact sampler driven by an explicit random stream.
``ScaledDensity`` wraps any density with a constant log-factor so the
unnormalized-target code path can be exercised even though every test
target here has a known constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.special import logsumexp

from .seeding import RandomStream

_LOG_2PI = math.log(2.0 * math.pi)


class InfiniteVarianceError(ValueError):
    """Raised when the second moment of the importance weights diverges."""


@dataclass(frozen=True)
class Gaussian1D:
    """Normal density N(mean, variance) with variance > 0."""

    mean: float
    variance: float

    #: log of the normalizing constant (the density integrates to 1)
    log_z = 0.0

    def __post_init__(self) -> None:
        if not self.variance > 0.0:
            raise ValueError(f"variance must be > 0, got {self.variance}")

    def log_density(self, x):
        """Log-density at x (scalar or array); finite for all finite x."""
        x = np.asarray(x, dtype=float)
        out = -0.5 * (x - self.mean) ** 2 / self.variance - 0.5 * (
            _LOG_2PI + math.log(self.variance)
        )
        return out if out.ndim else float(out)

    def sample(self, rng: RandomStream, n: int) -> np.ndarray:
        """Draw n independent values."""
        if n < 1:
            raise ValueError("n must be >= 1")
        return self.mean + math.sqrt(self.variance) * rng.standard_normal(n)


@dataclass(frozen=True)
class GaussianMixture1D:
    """Finite Gaussian mixture: weighted convex combination of Gaussian1D.

    Parameters
    ----------
    components : tuple of (weight, Gaussian1D)
        Component weights must lie in (0, 1] and sum to 1 within 1e-12.
    """

    components: tuple[tuple[float, Gaussian1D], ...]

    log_z = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "components", tuple(
            (float(w), g) for w, g in self.components
        ))
        if len(self.components) < 1:
            raise ValueError("mixture needs at least one component")
        weights = np.array([w for w, _ in self.components])
        if np.any(weights <= 0.0) or np.any(weights > 1.0):
            raise ValueError("component weights must lie in (0, 1]")
        if abs(weights.sum() - 1.0) > 1e-12:
            raise ValueError(f"component weights sum to {weights.sum()}, not 1")

    def log_density(self, x):
        """Log of the weight-convex combination of component densities."""
        x = np.asarray(x, dtype=float)
        per_comp = np.stack(
            [np.log(w) + g.log_density(np.atleast_1d(x)) for w, g in self.components]
        )
        out = logsumexp(per_comp, axis=0)
        return out.reshape(x.shape) if x.ndim else float(out[0])

    def sample(self, rng: RandomStream, n: int) -> np.ndarray:
        """Draw n values: pick a component index by weight, then sample it."""
        if n < 1:
            raise ValueError("n must be >= 1")
        weights = np.array([w for w, _ in self.components])
        means = np.array([g.mean for _, g in self.components])
        sds = np.array([math.sqrt(g.variance) for _, g in self.components])
        idx = rng.choice(len(self.components), size=n, p=weights)
        return means[idx] + sds[idx] * rng.standard_normal(n)


@dataclass(frozen=True)
class ScaledDensity:
    """A density multiplied by the constant exp(log_z).

    Evaluates the base log-density plus ``log_z``; the sampler is the base
    sampler (scaling does not change where the mass sits).
    """

    base: "Density"
    log_z: float

    def log_density(self, x):
        return self.base.log_density(x) + self.log_z

    def sample(self, rng: RandomStream, n: int) -> np.ndarray:
        return self.base.sample(rng, n)


Density = Union[Gaussian1D, GaussianMixture1D, ScaledDensity]


def chi2_gaussian(target: Gaussian1D, proposal: Gaussian1D) -> float:
    """Closed-form E_q[W^2] for normalized Gaussian target and proposal.

    W = target/proposal.  For target N(m_t, v_t) and proposal N(m_q, v_q),

        E_q[W^2] = v_q / sqrt(v_t * (2 v_q - v_t))
                   * exp((m_t - m_q)^2 / (2 v_q - v_t))

    which is finite only when 2 v_q > v_t.

    Raises
    ------
    InfiniteVarianceError
        When 2 * proposal.variance <= target.variance: the integral
        diverges and the importance weights have infinite variance.
    """
    v_t, v_q = target.variance, proposal.variance
    s = 2.0 * v_q - v_t
    if s <= 0.0:
        raise InfiniteVarianceError(
            f"E_q[W^2] diverges: need 2*proposal.variance > target.variance "
            f"(got {2 * v_q} <= {v_t})"
        )
    delta = target.mean - proposal.mean
    return v_q / math.sqrt(v_t * s) * math.exp(delta * delta / s)

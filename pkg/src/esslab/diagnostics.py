"""Closed-form weight diagnostics.

Everything here is a pure function of the weights (and, for the h-aware
variant, of the integrand values): the rule-of-thumb effective sample size
1 / sum(wbar^2), its algebraic twins through the coefficient of variation
and the Euclidean distance to uniform weights, the particle form computed
straight from unnormalized weights, the h-aware extension, and the
delta-method approximation chain with and without a known normalizing
constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .estimators import Integrand, WeightedSampleSet, normalize_log_weights


class NoMassUnderHError(ValueError):
    """Every |h(x_n)| * w_n vanished: the sample set carries no information
    about this integrand, and the h-aware ESS is undefined."""


def _check_normalized(weights) -> np.ndarray:
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or len(w) < 1:
        raise ValueError("weights must be a non-empty 1-D array")
    if np.any(w < 0.0) or np.any(w > 1.0):
        raise ValueError("normalized weights must lie in [0, 1]")
    total = float(np.sum(w))
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"normalized weights must sum to 1 (got {total!r})")
    return w


def ess_hat(normalized_weights) -> float:
    """Rule-of-thumb effective sample size 1 / sum(wbar_n^2).

    Always lies in [1, N]: N for uniform weights, 1 for a one-hot vector.
    The result is clamped to that range because rounding in the sum of
    squares can otherwise overshoot by an ulp.
    """
    w = _check_normalized(normalized_weights)
    ess = 1.0 / float(np.sum(w * w))
    return min(max(ess, 1.0), float(len(w)))


def ess_hat_from_unnormalized(log_weights) -> float:
    """Particle form N * (mean w)^2 / (mean w^2), from unnormalized log-weights.

    Algebraically identical to ``ess_hat(normalize(...))`` (within 1e-10);
    computed as (sum u)^2 / (sum u^2) with u = exp(lw - max(lw)), which is
    exact when all weights are equal and stable across hundreds of orders
    of magnitude.
    """
    lw = np.asarray(log_weights, dtype=float)
    if lw.ndim != 1 or len(lw) < 1:
        raise ValueError("log_weights must be a non-empty 1-D array")
    m = np.max(lw)
    if not np.isfinite(m):
        raise ValueError("no finite log-weight")
    u = np.exp(lw - m)
    s1 = float(np.sum(u))
    s2 = float(np.sum(u * u))
    return min(max(s1 * s1 / s2, 1.0), float(len(lw)))


def ess_hat_h(ws: WeightedSampleSet, h: Integrand) -> float:
    """Integrand-aware effective sample size.

    Uses the reweighting wbar_n^(h) ∝ |h(x_n)| * w_n and returns
    1 / sum((wbar^(h))^2).  Equals N exactly when the |h| * w products are
    all equal, i.e. when sampling from the optimal proposal for h.

    Raises
    ------
    NoMassUnderHError
        When every |h(x_n)| * w_n is zero; the reweighting is undefined.
    """
    lw = ws.log_weights
    m = np.max(lw)
    a = np.abs(np.asarray(h(ws.samples), dtype=float)) * np.exp(lw - m)
    s1 = float(np.sum(a))
    if s1 <= 0.0:
        raise NoMassUnderHError("|h| * w vanishes at every sample")
    s2 = float(np.sum(a * a))
    return min(max(s1 * s1 / s2, 1.0), float(ws.n))


def cv(normalized_weights) -> float:
    """Coefficient of variation of the normalized weights.

    cv = sqrt((1/N) * sum((N wbar_n - 1)^2)); satisfies
    ess_hat = N / (1 + cv^2).
    """
    w = _check_normalized(normalized_weights)
    n = len(w)
    return float(math.sqrt(np.sum((n * w - 1.0) ** 2) / n))


def l2_discrepancy(normalized_weights) -> float:
    """Euclidean distance between the weights and the uniform vector 1/N.

    Satisfies l2 = sqrt(1/ess_hat - 1/N).
    """
    w = _check_normalized(normalized_weights)
    n = len(w)
    return float(math.sqrt(np.sum((w - 1.0 / n) ** 2)))


@dataclass(frozen=True)
class DeltaChain:
    """Delta-method approximations of the ESS from Var_q[W].

    ``ess_kong`` is N / (1 + var_w), valid for a normalized target;
    ``ess_z_corrected`` is N z^2 / (z^2 + var_w) = N z^2 / E_q[W^2] when
    the constant z is known.  ``source`` records whether var_w came from
    the analytic oracle or an empirical estimate.
    """

    var_w: float
    e_w2: float
    z: float
    ess_kong: float
    ess_z_corrected: float
    source: str = "analytic"


def ess_delta_chain(n: int, var_w: float, z: float = 1.0,
                    source: str = "analytic") -> DeltaChain:
    """Evaluate the delta-method ESS approximations for N samples.

    Parameters
    ----------
    n : int
        Sample count the approximation refers to.
    var_w : float
        Var_q[W] of the unnormalized weights, >= 0.
    z : float
        Target normalizing constant, > 0.  With z = 1 both forms agree.
    """
    if var_w < 0.0:
        raise ValueError("var_w must be >= 0")
    if not z > 0.0:
        raise ValueError("z must be > 0")
    z2 = z * z
    return DeltaChain(
        var_w=var_w,
        e_w2=var_w + z2,
        z=z,
        ess_kong=n / (1.0 + var_w),
        ess_z_corrected=n * z2 / (z2 + var_w),
        source=source,
    )


def convex_combination_variance(unnormalized_weights, sigma2_z: float) -> float:
    """Variance of a fixed-weight convex combination of iid variables.

    For N iid variables with variance sigma2_z combined with (deterministic,
    nonnegative) weights w, the combination sum(w_i Z_i) / sum(w_i) has
    variance sigma2_z * sum(w^2) / (sum w)^2 = sigma2_z / ess_hat.
    """
    w = np.asarray(unnormalized_weights, dtype=float)
    if w.ndim != 1 or len(w) < 1:
        raise ValueError("weights must be a non-empty 1-D array")
    if np.any(w < 0.0):
        raise ValueError("weights must be >= 0")
    s1 = float(np.sum(w))
    if s1 <= 0.0:
        raise ValueError("weights must not all be zero")
    if not sigma2_z > 0.0:
        raise ValueError("sigma2_z must be > 0")
    return sigma2_z * float(np.sum(w * w)) / (s1 * s1)


REPORT_CSV_HEADER = "n,ess_hat,cv,l2,ess_hat_h"


@dataclass(frozen=True)
class EssReport:
    """All weight diagnostics for one weighted sample set."""

    n: int
    ess_hat: float
    cv: float
    l2: float
    ess_hat_h: float | None = None
    delta_chain: DeltaChain | None = None

    def csv_row(self) -> str:
        """Flat CSV row matching ``REPORT_CSV_HEADER`` (ess_hat_h blank if unset)."""
        hcol = "" if self.ess_hat_h is None else repr(self.ess_hat_h)
        return f"{self.n},{self.ess_hat!r},{self.cv!r},{self.l2!r},{hcol}"


def ess_report(ws: WeightedSampleSet, h: Integrand | None = None,
               delta_chain: DeltaChain | None = None) -> EssReport:
    """Compute the full diagnostic report for a weighted sample set."""
    wbar = normalize_log_weights(ws.log_weights)
    return EssReport(
        n=ws.n,
        ess_hat=ess_hat_from_unnormalized(ws.log_weights),
        cv=cv(wbar),
        l2=l2_discrepancy(wbar),
        ess_hat_h=None if h is None else ess_hat_h(ws, h),
        delta_chain=delta_chain,
    )

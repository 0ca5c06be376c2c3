"""Brute-force replication: the reference the approximations are judged by.

For a plan (target, proposal-or-scheme, integrand, N, R) the engine draws,
for each of R replicates, one fresh target sample set and one fresh
weighted sample set, and computes the raw Monte Carlo estimate and the
self-normalized IS estimate of the integral.  Replicate spread then gives
the true estimator variances, the MSE, and hence

    ess      = N * Var[raw] / Var[snis]        (variance-ratio form)
    ess_star = N * Var[raw] / MSE[snis]        (MSE form, bias-aware)

Replicate r always draws from the substream (master_seed, r), so results
are bit-identical no matter how many workers are used.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy.special import logsumexp

from .distributions import Density
from .estimators import (
    Integrand,
    WeightedSampleSet,
    compute_weights,
    raw_mc_estimate,
    snis_estimate,
)
from .diagnostics import ess_hat_from_unnormalized
from .mis import MisScheme, mis_sample
from .seeding import substream

#: replicates are grouped into this many batches for standard errors
SE_BATCHES = 50

GROUND_TRUTH_CSV_HEADER = (
    "n,replicates,var_raw,var_snis,mse_snis,bias_snis,ess,ess_star,se_ess"
)


@dataclass(frozen=True)
class ReplicationPlan:
    """One replication experiment: who samples, what is estimated, how often.

    ``true_value`` must be the exact integral for the (target, integrand)
    pair; it is supplied analytically so the MSE and bias carry no oracle
    error.
    """

    target: Density
    proposal: Union[Density, MisScheme]
    integrand: Integrand
    n_per_run: int
    replicates: int
    true_value: float
    master_seed: int

    def __post_init__(self) -> None:
        if self.n_per_run < 1:
            raise ValueError("n_per_run must be >= 1")
        if self.replicates < 2:
            raise ValueError("replicates must be >= 2")
        if not math.isfinite(self.true_value):
            raise ValueError("true_value must be finite")


@dataclass(frozen=True)
class GroundTruth:
    """Replicate-estimated truth for one plan.

    ``ess_hat_mean`` / ``ess_hat_std`` aggregate the per-run rule-of-thumb
    ESS over replicates (the experiments module plots them next to the
    true values).  ``std_errors`` holds batch-based Monte Carlo standard
    errors keyed by field name.
    """

    n_per_run: int
    replicates: int
    var_raw: float
    var_snis: float
    mse_snis: float
    bias_snis: float
    ess: float
    ess_star: float
    ess_hat_mean: float
    ess_hat_std: float
    std_errors: dict = field(compare=False)

    def csv_row(self) -> str:
        """Flat CSV row matching ``GROUND_TRUTH_CSV_HEADER``."""
        return (
            f"{self.n_per_run},{self.replicates},{self.var_raw!r},{self.var_snis!r},"
            f"{self.mse_snis!r},{self.bias_snis!r},{self.ess!r},{self.ess_star!r},"
            f"{self.std_errors['ess']!r}"
        )


def _draw_weighted(plan: ReplicationPlan, rng) -> WeightedSampleSet:
    if isinstance(plan.proposal, MisScheme):
        return mis_sample(plan.proposal, plan.target, rng, plan.n_per_run)
    x = plan.proposal.sample(rng, plan.n_per_run)
    return compute_weights(plan.target, plan.proposal, x)


def _run_batch(plan: ReplicationPlan, indices: np.ndarray) -> np.ndarray:
    """Run one batch of replicates; returns rows (ibar, itil, esshat)."""
    out = np.empty((len(indices), 3))
    for k, r in enumerate(indices):
        rng = substream(plan.master_seed, int(r))
        xr = plan.target.sample(rng, plan.n_per_run)
        ws = _draw_weighted(plan, rng)
        out[k, 0] = raw_mc_estimate(xr, plan.integrand)
        out[k, 1] = snis_estimate(ws, plan.integrand)
        out[k, 2] = ess_hat_from_unnormalized(ws.log_weights)
    return out


def _batch_indices(replicates: int) -> list[np.ndarray]:
    n_batches = SE_BATCHES if replicates >= 2 * SE_BATCHES else max(1, replicates // 2)
    return np.array_split(np.arange(replicates), n_batches)


def run_replication(plan: ReplicationPlan, workers: int = 1) -> GroundTruth:
    """Estimate the true Var/MSE of both estimators and the true ESS.

    Batches of replicates are dispatched to a process pool when
    ``workers > 1``; per-replicate seeding plus fixed batch order keep the
    result bit-identical for any worker count.

    Raises
    ------
    ValueError
        If the SNIS variance collapses to exactly zero with non-degenerate
        inputs, which signals that ``replicates`` is too small to resolve it.
    """
    batches = _batch_indices(plan.replicates)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_batch, [plan] * len(batches), batches))
    else:
        results = [_run_batch(plan, idx) for idx in batches]

    stacked = np.concatenate(results, axis=0)
    ibar, itil, esshat = stacked[:, 0], stacked[:, 1], stacked[:, 2]
    n, big_r, true = plan.n_per_run, plan.replicates, plan.true_value

    var_raw = float(np.var(ibar, ddof=1))
    var_snis = float(np.var(itil, ddof=1))
    bias = float(np.mean(itil) - true)
    mse = float(np.mean((itil - true) ** 2))
    if var_snis == 0.0:
        raise ValueError(
            "SNIS variance underflowed to zero across replicates; "
            "increase the replicate count"
        )
    ess = n * var_raw / var_snis
    ess_star = n * var_raw / mse

    per_batch: dict[str, list[float]] = {k: [] for k in (
        "var_raw", "var_snis", "mse_snis", "bias_snis", "ess", "ess_star")}
    if all(len(idx) >= 2 for idx in batches) and len(batches) >= 2:
        for res in results:
            vb_raw = float(np.var(res[:, 0], ddof=1))
            vb_snis = float(np.var(res[:, 1], ddof=1))
            mse_b = float(np.mean((res[:, 1] - true) ** 2))
            per_batch["var_raw"].append(vb_raw)
            per_batch["var_snis"].append(vb_snis)
            per_batch["mse_snis"].append(mse_b)
            per_batch["bias_snis"].append(float(np.mean(res[:, 1]) - true))
            per_batch["ess"].append(n * vb_raw / vb_snis if vb_snis > 0 else np.nan)
            per_batch["ess_star"].append(n * vb_raw / mse_b if mse_b > 0 else np.nan)
        n_b = len(batches)
        std_errors = {
            k: float(np.std(v, ddof=1) / math.sqrt(n_b)) for k, v in per_batch.items()
        }
    else:
        std_errors = {k: float("nan") for k in per_batch}

    return GroundTruth(
        n_per_run=n,
        replicates=big_r,
        var_raw=var_raw,
        var_snis=var_snis,
        mse_snis=mse,
        bias_snis=bias,
        ess=ess,
        ess_star=ess_star,
        ess_hat_mean=float(np.mean(esshat)),
        ess_hat_std=float(np.std(esshat, ddof=1)) if big_r > 1 else 0.0,
        std_errors=std_errors,
    )


def rrmse(gt: GroundTruth, true_value: float) -> float:
    """Relative root MSE: sqrt(MSE[snis]) / |true value|."""
    if true_value == 0.0:
        raise ValueError("rrmse undefined for true_value = 0")
    return math.sqrt(gt.mse_snis) / abs(true_value)


def estimate_zhat_variance(target: Density, proposal: Union[Density, MisScheme],
                           n_per_run: int, replicates: int,
                           master_seed: int) -> float:
    """Replicate-estimated Var[Zhat] with Zhat = (1/N) sum_n w_n.

    This is the quantity the MIS-aware ESS extension needs; there is no
    single-run plug-in for it here, only this replication estimate.
    """
    if replicates < 2:
        raise ValueError("replicates must be >= 2")
    zhat = np.empty(replicates)
    for r in range(replicates):
        rng = substream(master_seed, r)
        if isinstance(proposal, MisScheme):
            ws = mis_sample(proposal, target, rng, n_per_run)
        else:
            ws = compute_weights(target, proposal, proposal.sample(rng, n_per_run))
        zhat[r] = math.exp(logsumexp(ws.log_weights) - math.log(n_per_run))
    return float(np.var(zhat, ddof=1))

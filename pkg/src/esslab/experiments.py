"""Experiment harness: deterministic CSV regeneration of the six figures.

Four experiments sweep a grid and, per grid point, run the replication
engine against a fixed target:

* ``mean-mismatch``  -- target N(0,1), proposal N(mu_q, 1), h(x) = x,
* ``var-mismatch``   -- target N(0,1), proposal N(0, sigma_q^2), h(x) = x,
* ``rare-event``     -- target = proposal = N(0,1), h = tail indicator,
* ``mis-scenario``   -- trimodal Gaussian-mixture target, schemes N1/N3/R3.

Each grid point gets its own master seed derived from
(master_seed, experiment id, point index), so a CSV is bit-identical
across runs and worker counts for the same config.  ``diagnose`` is the
generic entry point: it reads an ``x,log_w`` CSV and emits the diagnostic
report row.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .distributions import Gaussian1D, GaussianMixture1D, chi2_gaussian
from .estimators import Integrand, TailIndicator, WeightedSampleSet, identity
from .diagnostics import (
    REPORT_CSV_HEADER,
    EssReport,
    ess_delta_chain,
    ess_report,
)
from .ground_truth import GroundTruth, ReplicationPlan, rrmse, run_replication
from .mis import MisScheme
from .seeding import substream_seed

EXPERIMENT_IDS = {"mean-mismatch": 1, "var-mismatch": 2, "rare-event": 3,
                  "mis-scenario": 4}

DEFAULT_GRIDS = {
    "mean-mismatch": (0.0, 3.0, 0.1),
    "var-mismatch": (0.6, 3.6, 0.1),
    "rare-event": (0.5, 3.5, 0.25),
}
DEFAULT_N_VALUES = {
    "mean-mismatch": (4, 16, 256),
    "var-mismatch": (4, 16, 256),
    "rare-event": (1000,),
    "mis-scenario": tuple(3 * 2 ** k for k in range(10)),
}
DEFAULT_REPLICATES = 10_000

#: trimodal target of the MIS example: equal-weight mixture, unit variance
MIS_TARGET_MEANS = (-3.0, 0.0, 3.0)
MIS_TARGET_VARIANCE = 1.0
#: proposal means and shared variance per scenario (1 = no mismatch)
MIS_SCENARIOS = {
    1: ((-3.0, 0.0, 3.0), 1.0),
    2: ((-3.0, -1.0, 3.0), 2.0),
    3: ((-4.0, -1.0, 1.0), 2.0),
}

MEAN_MISMATCH_FIELDS = (
    "n", "mu_q", "ess_over_n", "ess_star_over_n", "ess_hat_over_n",
    "ess_hat_std_over_n", "ratio_hat_to_true", "delta_chain_over_n",
    "se_ess_over_n",
)
VAR_MISMATCH_FIELDS = (
    "n", "sigma_q", "ess_over_n", "ess_star_over_n", "ess_hat_over_n",
    "ess_hat_std_over_n", "ratio_hat_to_true", "delta_chain_over_n",
    "se_ess_over_n", "divergent",
)
RARE_EVENT_FIELDS = (
    "n", "alpha", "true_value", "var_analytic", "var_raw", "var_snis",
    "mse_snis", "rrmse", "var_over_true", "ess_over_n", "ess_hat_over_n",
)
MIS_SCENARIO_FIELDS = (
    "scheme", "n", "ess_over_n", "ess_star_over_n", "ess_hat_over_n",
    "ess_hat_std_over_n", "ratio_hat_to_true", "se_ess_over_n",
)


@dataclass(frozen=True)
class ExperimentConfig:
    """Resolved settings for one experiment run."""

    experiment: str
    n_values: tuple[int, ...]
    grid: tuple[float, ...]
    replicates: int = DEFAULT_REPLICATES
    master_seed: int = 12345
    scenario: int | None = None
    out: str | Path | None = None
    workers: int = 1

    def __post_init__(self) -> None:
        if self.experiment not in EXPERIMENT_IDS:
            raise ValueError(f"unknown experiment {self.experiment!r}")
        if self.experiment != "mis-scenario" and len(self.grid) == 0:
            raise ValueError("grid must be non-empty")
        if len(self.n_values) == 0:
            raise ValueError("n_values must be non-empty")
        if self.experiment == "mis-scenario" and self.scenario not in MIS_SCENARIOS:
            raise ValueError("scenario must be 1, 2 or 3")


def grid_values(lo: float, hi: float, step: float) -> tuple[float, ...]:
    """Inclusive grid lo, lo+step, ..., hi (endpoint kept within half a step)."""
    if step <= 0.0:
        raise ValueError("step must be > 0")
    return tuple(np.round(np.arange(lo, hi + 0.5 * step, step), 10))


def default_config(experiment: str, **overrides) -> ExperimentConfig:
    """Config with the per-experiment default grid and sample counts."""
    settings = {
        "experiment": experiment,
        "n_values": DEFAULT_N_VALUES[experiment],
        "grid": grid_values(*DEFAULT_GRIDS[experiment])
                if experiment in DEFAULT_GRIDS else (),
        "scenario": 1 if experiment == "mis-scenario" else None,
    }
    settings.update(overrides)
    return ExperimentConfig(**settings)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _config_comments(cfg: ExperimentConfig) -> list[str]:
    lines = [
        f"experiment={cfg.experiment}",
        "n_values=" + ",".join(str(n) for n in cfg.n_values),
        "grid=" + ",".join(repr(g) for g in cfg.grid),
        f"replicates={cfg.replicates}",
        f"master_seed={cfg.master_seed}",
    ]
    if cfg.scenario is not None:
        lines.append(f"scenario={cfg.scenario}")
    return lines


def write_csv(path, comments: Sequence[str], fieldnames: Sequence[str],
              rows: Sequence[dict]) -> None:
    """Write rows as UTF-8, LF-terminated CSV with '#' comment lines on top."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in comments:
            fh.write(f"# {line}\n")
        fh.write(",".join(fieldnames) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(row[k]) for k in fieldnames) + "\n")


def _point_seed(cfg: ExperimentConfig, index: int) -> int:
    exp_id = EXPERIMENT_IDS[cfg.experiment]
    if cfg.scenario is not None:
        return substream_seed(cfg.master_seed, exp_id, cfg.scenario, index)
    return substream_seed(cfg.master_seed, exp_id, index)


def _mismatch_rows(cfg: ExperimentConfig, proposal_for, grid_key: str,
                   delta_var_w) -> list[dict]:
    """Shared sweep for the mean- and variance-mismatch experiments."""
    target = Gaussian1D(0.0, 1.0)
    rows = []
    for i_n, n in enumerate(cfg.n_values):
        for i_g, g in enumerate(cfg.grid):
            seed = _point_seed(cfg, i_n * len(cfg.grid) + i_g)
            plan = ReplicationPlan(
                target=target, proposal=proposal_for(g), integrand=identity,
                n_per_run=n, replicates=cfg.replicates, true_value=0.0,
                master_seed=seed,
            )
            gt = run_replication(plan, workers=cfg.workers)
            var_w = delta_var_w(g)
            delta = (None if var_w is None
                     else ess_delta_chain(n, var_w).ess_kong / n)
            row = {
                "n": n, grid_key: g,
                "ess_over_n": gt.ess / n,
                "ess_star_over_n": gt.ess_star / n,
                "ess_hat_over_n": gt.ess_hat_mean / n,
                "ess_hat_std_over_n": gt.ess_hat_std / n,
                "ratio_hat_to_true": gt.ess_hat_mean / gt.ess,
                "delta_chain_over_n": delta,
                "se_ess_over_n": gt.std_errors["ess"] / n,
            }
            rows.append(row)
    return rows


def run_mean_mismatch(cfg: ExperimentConfig) -> list[dict]:
    """Figure-1 data: proposal N(mu_q, 1) against target N(0, 1)."""
    target = Gaussian1D(0.0, 1.0)

    def var_w(mu):
        return chi2_gaussian(target, Gaussian1D(float(mu), 1.0)) - 1.0

    rows = _mismatch_rows(cfg, lambda mu: Gaussian1D(float(mu), 1.0),
                          "mu_q", var_w)
    if cfg.out is not None:
        write_csv(cfg.out, _config_comments(cfg), MEAN_MISMATCH_FIELDS, rows)
    return rows


def run_var_mismatch(cfg: ExperimentConfig) -> list[dict]:
    """Figure-2 data: proposal N(0, sigma_q^2) against target N(0, 1).

    Rows where 2 sigma_q^2 <= 1 are flagged divergent (the SNIS estimator
    variance is infinite there); the delta-chain column is left blank.
    """
    target = Gaussian1D(0.0, 1.0)

    def var_w(sigma):
        v = float(sigma) ** 2
        if 2.0 * v <= 1.0:
            return None
        return chi2_gaussian(target, Gaussian1D(0.0, v)) - 1.0

    rows = _mismatch_rows(cfg, lambda sigma: Gaussian1D(0.0, float(sigma) ** 2),
                          "sigma_q", var_w)
    for row in rows:
        row["divergent"] = int(2.0 * row["sigma_q"] ** 2 <= 1.0)
    if cfg.out is not None:
        write_csv(cfg.out, _config_comments(cfg), VAR_MISMATCH_FIELDS, rows)
    return rows


def gaussian_two_sided_tail(alpha: float) -> float:
    """P(|X| > alpha) for X ~ N(0,1), i.e. 2 Phi(-alpha)."""
    return math.erfc(alpha / math.sqrt(2.0))


def run_rare_event(cfg: ExperimentConfig) -> list[dict]:
    """Figure-3 data: tail-probability estimation with a perfect proposal.

    All weights are identically 1, so the rule-of-thumb ESS stays pinned at
    N while the relative error explodes as the event gets rarer.
    """
    target = Gaussian1D(0.0, 1.0)
    rows = []
    for i_n, n in enumerate(cfg.n_values):
        for i_g, alpha in enumerate(cfg.grid):
            seed = _point_seed(cfg, i_n * len(cfg.grid) + i_g)
            true = gaussian_two_sided_tail(float(alpha))
            plan = ReplicationPlan(
                target=target, proposal=target,
                integrand=TailIndicator(float(alpha)),
                n_per_run=n, replicates=cfg.replicates,
                true_value=true, master_seed=seed,
            )
            gt = run_replication(plan, workers=cfg.workers)
            rows.append({
                "n": n, "alpha": alpha,
                "true_value": true,
                "var_analytic": true * (1.0 - true) / n,
                "var_raw": gt.var_raw,
                "var_snis": gt.var_snis,
                "mse_snis": gt.mse_snis,
                "rrmse": rrmse(gt, true),
                "var_over_true": gt.var_snis / true,
                "ess_over_n": gt.ess / n,
                "ess_hat_over_n": gt.ess_hat_mean / n,
            })
    if cfg.out is not None:
        write_csv(cfg.out, _config_comments(cfg), RARE_EVENT_FIELDS, rows)
    return rows


def mis_target() -> GaussianMixture1D:
    """The trimodal target shared by all MIS scenarios."""
    w = 1.0 / len(MIS_TARGET_MEANS)
    return GaussianMixture1D(tuple(
        (w, Gaussian1D(m, MIS_TARGET_VARIANCE)) for m in MIS_TARGET_MEANS
    ))


def mis_scheme(kind: str, scenario: int) -> MisScheme:
    """Build scheme ``kind`` with the proposals of the given scenario."""
    means, variance = MIS_SCENARIOS[scenario]
    return MisScheme(kind, tuple(Gaussian1D(m, variance) for m in means))


def run_mis_scenario(cfg: ExperimentConfig) -> list[dict]:
    """Figure-4/5/6 data: target-mean estimation under schemes N1, N3, R3.

    The CSV scheme column is an open slot: rows for additional scheme
    names can coexist in the same schema.
    """
    target = mis_target()
    true = sum(w * g.mean for w, g in target.components)
    rows = []
    for i_s, kind in enumerate(("N1", "N3", "R3")):
        scheme = mis_scheme(kind, cfg.scenario)
        for i_n, n in enumerate(cfg.n_values):
            seed = _point_seed(cfg, i_s * len(cfg.n_values) + i_n)
            plan = ReplicationPlan(
                target=target, proposal=scheme, integrand=identity,
                n_per_run=n, replicates=cfg.replicates,
                true_value=true, master_seed=seed,
            )
            gt = run_replication(plan, workers=cfg.workers)
            rows.append({
                "scheme": kind, "n": n,
                "ess_over_n": gt.ess / n,
                "ess_star_over_n": gt.ess_star / n,
                "ess_hat_over_n": gt.ess_hat_mean / n,
                "ess_hat_std_over_n": gt.ess_hat_std / n,
                "ratio_hat_to_true": gt.ess_hat_mean / gt.ess,
                "se_ess_over_n": gt.std_errors["ess"] / n,
            })
    if cfg.out is not None:
        write_csv(cfg.out, _config_comments(cfg), MIS_SCENARIO_FIELDS, rows)
    return rows


def parse_integrand(spec: str) -> Integrand:
    """Parse an integrand spec: ``identity`` or ``tail:<alpha>``."""
    if spec == "identity":
        return identity
    if spec.startswith("tail:"):
        return TailIndicator(float(spec.split(":", 1)[1]))
    raise ValueError(f"unknown integrand spec {spec!r} (use 'identity' or 'tail:<alpha>')")


def diagnose(input_path, integrand: Integrand | None = None,
             out=None) -> EssReport:
    """Diagnostic report for a weighted sample set stored as an x,log_w CSV."""
    ws = WeightedSampleSet.from_csv(input_path)
    report = ess_report(ws, h=integrand)
    if out is not None:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(REPORT_CSV_HEADER + "\n")
            fh.write(report.csv_row() + "\n")
    return report


RUNNERS = {
    "mean-mismatch": run_mean_mismatch,
    "var-mismatch": run_var_mismatch,
    "rare-event": run_rare_event,
    "mis-scenario": run_mis_scenario,
}

"""Integral estimators and log-space weight handling.

Three estimators of I = E_target[h]:

* ``uis_estimate``  -- unnormalized IS, needs the target's constant Z,
* ``snis_estimate`` -- self-normalized IS, usable when Z is unknown,
* ``raw_mc_estimate`` -- plain Monte Carlo on draws from the target itself.

Weights live in log space end to end; normalized weights are materialized
only at estimate/diagnostic boundaries, via a max-shifted exponential so
that weight vectors spanning hundreds of orders of magnitude normalize
without overflow.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .distributions import Density
from .seeding import RandomStream

Integrand = Callable[[np.ndarray], np.ndarray]


def identity(x):
    """The integrand h(x) = x (target-mean estimation)."""
    return x


@dataclass(frozen=True)
class TailIndicator:
    """Two-sided tail indicator h(x) = 1 if |x| > threshold else 0."""

    threshold: float

    def __post_init__(self) -> None:
        if self.threshold < 0.0:
            raise ValueError("threshold must be >= 0")

    def __call__(self, x):
        return (np.abs(np.asarray(x, dtype=float)) > self.threshold).astype(float)


class CsvFormatError(ValueError):
    """Raised when a weighted-sample CSV does not parse; carries the line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class WeightedSampleSet:
    """Samples with unnormalized log-weights.

    Invariants enforced at construction: equal lengths, N >= 1, no NaN or
    +inf log-weights (-inf marks a zero weight), and at least one finite
    log-weight.
    """

    samples: np.ndarray
    log_weights: np.ndarray
    provenance: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        x = np.asarray(self.samples, dtype=float)
        lw = np.asarray(self.log_weights, dtype=float)
        object.__setattr__(self, "samples", x)
        object.__setattr__(self, "log_weights", lw)
        if x.ndim != 1 or lw.ndim != 1:
            raise ValueError("samples and log_weights must be 1-D")
        if len(x) != len(lw):
            raise ValueError(f"length mismatch: {len(x)} samples, {len(lw)} log-weights")
        if len(x) < 1:
            raise ValueError("need at least one sample")
        if np.any(np.isnan(lw)) or np.any(np.isposinf(lw)):
            raise ValueError("log-weights must be finite or -inf")
        if not np.any(np.isfinite(lw)):
            raise ValueError("all weights are zero: no finite log-weight")

    @property
    def n(self) -> int:
        return len(self.samples)

    def normalized_weights(self) -> np.ndarray:
        """Weights rescaled to sum to 1 (see ``normalize_log_weights``)."""
        return normalize_log_weights(self.log_weights)

    def to_csv(self, path) -> None:
        """Write as CSV with header ``x,log_w``, full double precision."""
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("x,log_w\n")
            for x, lw in zip(self.samples, self.log_weights):
                fh.write(f"{float(x)!r},{float(lw)!r}\n")

    @classmethod
    def from_csv(cls, path, provenance: str = "") -> "WeightedSampleSet":
        """Read a ``x,log_w`` CSV; raises CsvFormatError with the line number."""
        xs: list[float] = []
        lws: list[float] = []
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise CsvFormatError(1, "empty file") from None
            if [c.strip() for c in header] != ["x", "log_w"]:
                raise CsvFormatError(1, f"expected header 'x,log_w', got {','.join(header)!r}")
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                if len(row) != 2:
                    raise CsvFormatError(lineno, f"expected 2 fields, got {len(row)}")
                try:
                    xs.append(float(row[0]))
                    lws.append(float(row[1]))
                except ValueError as exc:
                    raise CsvFormatError(lineno, str(exc)) from None
        if not xs:
            raise CsvFormatError(2, "no data rows")
        try:
            return cls(np.array(xs), np.array(lws), provenance=provenance)
        except ValueError as exc:
            raise CsvFormatError(2, str(exc)) from None


def normalize_log_weights(log_weights) -> np.ndarray:
    """Normalized weights from unnormalized log-weights.

    Computes exp(lw - max(lw)) / sum(...), which is invariant to adding any
    constant to all log-weights and sums to 1 within 1e-12 even when the
    log-weights span hundreds of orders of magnitude.

    The stored convention sums to 1; the mean-normalized convention
    (weights averaging to 1) is exactly N times this vector.
    """
    lw = np.asarray(log_weights, dtype=float)
    if lw.ndim != 1 or len(lw) < 1:
        raise ValueError("log_weights must be a non-empty 1-D array")
    m = np.max(lw)
    if not np.isfinite(m):
        raise ValueError("no finite log-weight to normalize")
    u = np.exp(lw - m)
    return u / np.sum(u)


def compute_weights(target: Density, proposal: Density, samples,
                    provenance: str = "") -> WeightedSampleSet:
    """Attach log importance weights log target(x) - log proposal(x).

    The target may be unnormalized (a ScaledDensity); the constant then
    shifts every log-weight and cancels in self-normalized quantities.
    """
    x = np.asarray(samples, dtype=float)
    log_p = np.asarray(target.log_density(x), dtype=float)
    log_q = np.asarray(proposal.log_density(x), dtype=float)
    with np.errstate(invalid="ignore"):
        lw = log_p - log_q
    # target mass at a point the proposal cannot reach is a contract violation
    lw = np.where(np.isneginf(log_p), -np.inf, lw)
    if np.any(np.isposinf(lw)) or np.any(np.isnan(lw)):
        raise ValueError("proposal has zero density at a sample where the target does not")
    if not np.any(np.isfinite(lw)):
        raise ValueError("all weights are zero: target has no mass at any sample")
    return WeightedSampleSet(x, lw, provenance=provenance)


def uis_estimate(ws: WeightedSampleSet, h: Integrand, z: float) -> float:
    """Unnormalized IS estimate (1 / (N Z)) * sum_n W_n h(x_n); unbiased."""
    if not z > 0.0:
        raise ValueError("normalizing constant z must be > 0")
    lw = ws.log_weights
    m = np.max(lw)
    u = np.exp(lw - m)
    hx = np.asarray(h(ws.samples), dtype=float)
    return float(math.exp(m) * np.sum(u * hx) / (ws.n * z))


def snis_estimate(ws: WeightedSampleSet, h: Integrand) -> float:
    """Self-normalized IS estimate sum_n wbar_n h(x_n).

    Invariant to rescaling all weights; with all weights equal it reduces
    bit-for-bit to the plain sample mean of h.
    """
    lw = ws.log_weights
    m = np.max(lw)
    u = np.exp(lw - m)
    hx = np.asarray(h(ws.samples), dtype=float)
    return float(np.sum(u * hx) / np.sum(u))


def raw_mc_estimate(samples, h: Integrand) -> float:
    """Plain Monte Carlo mean of h over draws from the target."""
    x = np.asarray(samples, dtype=float)
    if x.ndim != 1 or len(x) < 1:
        raise ValueError("samples must be a non-empty 1-D array")
    return float(np.mean(np.asarray(h(x), dtype=float)))

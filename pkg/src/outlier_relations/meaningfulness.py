"""Goodness-of-fit and consistency checks that decide whether a data-trend explains its outliers."""

from __future__ import annotations

import zlib
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DataError, ParameterError

# upper bound on resample matrix cells held in memory at once
_CHUNK_CELLS = 1 << 22


def pair_seed(seed: int, rep_a: str, rep_b: str, direction: str) -> np.random.SeedSequence:
    """Seed derived from the pair identity only, so reruns with other thresholds draw identically."""
    return np.random.SeedSequence(
        [int(seed), zlib.crc32(rep_a.encode()), zlib.crc32(rep_b.encode()), zlib.crc32(direction.encode())]
    )


def percentile(values, level: float, method: str = "linear") -> float:
    return float(np.percentile(np.asarray(values, dtype=np.float64), level, method=method))


def bootstrap_percentile(e_u, level: float = 95.0, B: int = 1000, seed=0, method: str = "linear"):
    """Bootstrap the ``level``-th percentile of ``e_u``.

    Returns ``(estimate, ci_low, ci_high)``: the median of the ``B`` resampled
    percentiles and their 2.5th / 97.5th percentiles.
    """
    values = np.sort(np.asarray(e_u, dtype=np.float64))
    if values.size == 0:
        raise DataError("cannot bootstrap an empty error distribution")
    if B < 200:
        raise ParameterError(f"B must be >= 200, got {B}")
    if not (0.0 <= level <= 100.0):
        raise ParameterError(f"level must lie in [0, 100], got {level}")
    rng = np.random.default_rng(seed)
    n = values.size
    rows = max(1, _CHUNK_CELLS // n)
    out = np.empty(B, dtype=np.float64)
    for start in range(0, B, rows):
        stop = min(B, start + rows)
        idx = rng.integers(0, n, size=(stop - start, n), dtype=np.int64)
        if method == "linear":
            out[start:stop] = kernels.resample_quantiles(values, idx, level / 100.0)
        else:
            out[start:stop] = np.percentile(values[idx], level, axis=1, method=method)
    est = float(np.median(out))
    lo, hi = np.percentile(out, [2.5, 97.5])
    return est, float(min(lo, est)), float(max(hi, est))


@dataclass(frozen=True)
class ErrorDistributions:
    e_u: np.ndarray
    e_o: np.ndarray
    error_metric: str = "absolute-difference"


def error_distributions(model, sample) -> ErrorDistributions:
    e_u = np.abs(np.asarray(model.residuals, dtype=np.float64))
    return ErrorDistributions(e_u=e_u, e_o=e_u[np.asarray(sample.outlier_mask, dtype=bool)])


@dataclass(frozen=True)
class ConsistencyReport:
    rho_percentile: float
    rho_estimate: float
    rho_ci: tuple[float, float]
    bounded_fraction: float
    beta: float
    consistent: bool
    n_outlier_errors: int

    def to_dict(self) -> dict:
        return {
            "rho_percentile": self.rho_percentile,
            "rho_estimate": self.rho_estimate,
            "rho_ci": list(self.rho_ci),
            "bounded_fraction": self.bounded_fraction,
            "beta": self.beta,
            "consistent": self.consistent,
            "n_outlier_errors": self.n_outlier_errors,
        }


def goodness_of_fit_check(model, r2_min: float = 0.25) -> bool:
    return model.adjusted_r2 >= r2_min


def bounded_fraction(e_o, rho: float) -> float:
    e_o = np.asarray(e_o)
    return float(np.count_nonzero(e_o <= rho) / e_o.size)


def consistency_check(model, sample, beta=0.67, rho_level=95.0, B=1000, seed=0, method="linear") -> ConsistencyReport:
    """Compare aligned-outlier errors against a high percentile of all errors.

    The outliers are consistent when at least ``beta`` of their absolute
    errors are at most the bootstrapped ``rho_level`` percentile of the
    absolute errors over every aligned pair.
    """
    if not (0.5 <= beta <= 1.0):
        raise ParameterError(f"beta must lie in [0.5, 1], got {beta}")
    dist = error_distributions(model, sample)
    if dist.e_o.size == 0:
        raise DataError("no aligned outliers to check")
    est, lo, hi = bootstrap_percentile(dist.e_u, rho_level, B, seed, method)
    frac = bounded_fraction(dist.e_o, est)
    return ConsistencyReport(
        rho_percentile=float(rho_level),
        rho_estimate=est,
        rho_ci=(lo, hi),
        bounded_fraction=frac,
        beta=float(beta),
        consistent=frac >= beta,
        n_outlier_errors=int(dist.e_o.size),
    )


@dataclass(frozen=True)
class Verification:
    meaningful: bool
    gof: bool
    consistency: ConsistencyReport | None = None
    reason: str | None = None

    def to_dict(self) -> dict:
        return {
            "meaningful": self.meaningful,
            "gof": self.gof,
            "consistency": None if self.consistency is None else self.consistency.to_dict(),
            "reason": self.reason,
        }


def verify_meaningfulness(model, sample, params, seed=None) -> Verification:
    """Goodness-of-fit first; consistency is only checked for a reasonable fit."""
    gof = goodness_of_fit_check(model, params.r2_min)
    if not gof:
        return Verification(meaningful=False, gof=False, reason="adjusted R2 below r2_min")
    seed = params.seed if seed is None else seed
    report = consistency_check(
        model,
        sample,
        beta=params.beta,
        rho_level=params.rho_level,
        B=params.bootstrap_B,
        seed=seed,
        method=params.percentile_method,
    )
    return Verification(meaningful=report.consistent, gof=True, consistency=report)

"""Outlier-biased weighted regressions between aligned scores and the slope test."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import special

from . import kernels
from .errors import DataError, DegenerateFitError, ParameterError, SampleTooSmallError
from .ingest import join_arrays
from .scoring import Thresholds

DIRECTIONS = ("f1", "f2")
MIN_ALIGNED_FLOOR = 3
# weighted variance below this is treated as zero (scores are O(1))
VARIANCE_EPS = 1e-12


def _check_alpha(alpha):
    if not (0.0 < alpha <= 1.0) or math.isnan(alpha):
        raise ParameterError(f"alpha must lie in (0, 1], got {alpha}")


def omega_array(u, thresholds: Thresholds, alpha: float) -> np.ndarray:
    """Vectorised outlier-biased weight.

    Outliers get 1; an inlier gets ``alpha ** (distance to its side's threshold)``.
    A score sitting exactly on a threshold gets 1 (the limit of both branches).
    If one side's threshold is infinite, that side measures distance against the
    other side's magnitude.
    """
    _check_alpha(alpha)
    u = np.asarray(u, dtype=np.float64)
    pos, neg = thresholds.theta_pos, abs(thresholds.theta_neg)
    if math.isinf(pos) and math.isinf(neg):
        return np.ones_like(u)
    pos_ref = pos if math.isfinite(pos) else neg
    neg_ref = neg if math.isfinite(neg) else pos
    ref = np.where(u >= 0, pos_ref, neg_ref)
    w = np.power(alpha, np.maximum(ref - np.abs(u), 0.0))
    return np.where(thresholds.is_outlier(u), 1.0, w)


def omega(u: float, thresholds: Thresholds, alpha: float) -> float:
    return float(omega_array(np.array([u]), thresholds, alpha)[0])


@dataclass(frozen=True, eq=False)
class AlignedSample:
    """Aligned scores of two representations plus the per-pair weights."""

    timestamps: np.ndarray
    u1: np.ndarray
    u2: np.ndarray
    thresholds1: Thresholds
    thresholds2: Thresholds
    weights: np.ndarray
    outlier_mask: np.ndarray
    rep_a: str = "U1"
    rep_b: str = "U2"
    alpha: float = 0.5

    def __len__(self):
        return len(self.u1)

    @property
    def n_outliers(self) -> int:
        return int(self.outlier_mask.sum())

    def swapped(self) -> "AlignedSample":
        return replace(
            self,
            u1=self.u2,
            u2=self.u1,
            thresholds1=self.thresholds2,
            thresholds2=self.thresholds1,
            rep_a=self.rep_b,
            rep_b=self.rep_a,
        )

    def reweighted(self, alpha: float) -> "AlignedSample":
        w = pair_weights(self.u1, self.u2, self.thresholds1, self.thresholds2, alpha)
        return replace(self, weights=w, alpha=alpha)

    def rows(self):
        """Yield ``(timestamp, u1, u2, is_aligned_outlier, weight)``."""
        return zip(self.timestamps, self.u1.tolist(), self.u2.tolist(), self.outlier_mask.tolist(), self.weights.tolist())


def pair_weights(u1, u2, thr1, thr2, alpha):
    return np.minimum(omega_array(u1, thr1, alpha), omega_array(u2, thr2, alpha))


def make_sample(timestamps, u1, u2, thresholds1=Thresholds(), thresholds2=Thresholds(), alpha=0.5, rep_a="U1", rep_b="U2"):
    u1 = np.ascontiguousarray(u1, dtype=np.float64)
    u2 = np.ascontiguousarray(u2, dtype=np.float64)
    if u1.shape != u2.shape:
        raise ValueError("u1 and u2 must have equal length")
    mask = thresholds1.is_outlier(u1) & thresholds2.is_outlier(u2)
    return AlignedSample(
        timestamps=np.asarray(timestamps),
        u1=u1,
        u2=u2,
        thresholds1=thresholds1,
        thresholds2=thresholds2,
        weights=pair_weights(u1, u2, thresholds1, thresholds2, alpha),
        outlier_mask=mask,
        rep_a=rep_a,
        rep_b=rep_b,
        alpha=alpha,
    )


def align(rep_a, rep_b, alpha: float = 0.5) -> AlignedSample:
    """Inner-join two representations on timestamps and weight the aligned pairs."""
    ts, sa, sb = join_arrays(rep_a.timestamps, rep_a.scores, rep_b.timestamps, rep_b.scores)
    return make_sample(ts, sa, sb, rep_a.thresholds, rep_b.thresholds, alpha, rep_a.rep_id, rep_b.rep_id)


@dataclass(frozen=True, eq=False)
class TrendModel:
    direction: str
    slope: float
    intercept: float
    slope_p_value: float
    adjusted_r2: float
    r2: float
    residuals: np.ndarray
    weighted: bool
    n: int
    stderr: float
    t_stat: float

    def predict(self, x):
        return self.slope * np.asarray(x) + self.intercept

    def summary(self) -> dict:
        return {
            "direction": self.direction,
            "slope": self.slope,
            "intercept": self.intercept,
            "slope_p_value": self.slope_p_value,
            "adjusted_r2": self.adjusted_r2,
            "r2": self.r2,
            "stderr": self.stderr,
            "t_stat": self.t_stat if math.isfinite(self.t_stat) else None,
            "weighted": self.weighted,
            "n": self.n,
        }


@dataclass(frozen=True)
class SlopeTest:
    reject: bool
    p_value: float


def _variables(sample: AlignedSample, direction: str):
    if direction == "f1":
        return sample.u1, sample.u2
    if direction == "f2":
        return sample.u2, sample.u1
    raise ParameterError(f"direction must be one of {DIRECTIONS}, got {direction!r}")


def fit_wls(sample: AlignedSample, direction: str = "f1", min_aligned: int = 10) -> TrendModel:
    """Weighted least-squares line of the response on the predictor.

    ``f1`` regresses ``u2`` on ``u1``; ``f2`` regresses ``u1`` on ``u2``.
    R-squared uses weighted sums of squares about the weighted response mean.
    """
    x, y = _variables(sample, direction)
    w = np.ascontiguousarray(sample.weights, dtype=np.float64)
    n = len(x)
    floor = max(MIN_ALIGNED_FLOOR, int(min_aligned))
    if n < floor:
        raise SampleTooSmallError(f"{n} aligned pairs, need at least {floor}")
    if np.any(w <= 0):
        raise DataError("weights must be positive")
    sw, xbar, ybar, sxx, sxy, syy = kernels.wls_moments(x, y, w)
    if sxx / sw < VARIANCE_EPS:
        raise DegenerateFitError(f"{direction}: predictor has no weighted variance")
    if syy / sw < VARIANCE_EPS:
        # constant response: rounding must not fake a slope
        slope, intercept = 0.0, float(ybar)
    else:
        slope = sxy / sxx
        intercept = ybar - slope * xbar
    residuals = y - (slope * x + intercept)
    ss_res = float(np.dot(w, residuals * residuals))
    r2 = 1.0 - ss_res / syy if syy / sw >= VARIANCE_EPS else 0.0
    adj = 1.0 - (1.0 - r2) * (n - 1) / (n - 2)
    df = n - 2
    stderr = math.sqrt(ss_res / df / sxx)
    if stderr == 0.0:
        t_stat = math.inf if slope != 0.0 else 0.0
        p = 0.0 if slope != 0.0 else 1.0
    else:
        t_stat = slope / stderr
        p = float(2.0 * special.stdtr(df, -abs(t_stat)))
    return TrendModel(
        direction=direction,
        slope=float(slope),
        intercept=float(intercept),
        slope_p_value=p,
        adjusted_r2=float(adj),
        r2=float(r2),
        residuals=residuals,
        weighted=bool(np.any(w != w[0])),
        n=n,
        stderr=stderr,
        t_stat=float(t_stat),
    )


def slope_test(model: TrendModel, significance: float = 0.05) -> SlopeTest:
    """Two-sided test of zero slope, t distribution with n - 2 df."""
    if not (0.0 < significance < 1.0):
        raise ParameterError(f"significance must lie in (0, 1), got {significance}")
    return SlopeTest(reject=model.slope_p_value < significance, p_value=model.slope_p_value)


@dataclass(frozen=True)
class DirectionResult:
    direction: str
    model: TrendModel | None = None
    test: SlopeTest | None = None
    reason: str | None = None

    @property
    def passed(self) -> bool:
        return self.test is not None and self.test.reject

    def summary(self) -> dict:
        out = {"direction": self.direction, "passed": self.passed}
        if self.model is not None:
            out.update(self.model.summary())
        if self.reason is not None:
            out["reason"] = self.reason
        return out


@dataclass(frozen=True)
class DataTrend:
    f1: DirectionResult
    f2: DirectionResult

    @property
    def trend_found(self) -> bool:
        return self.f1.passed or self.f2.passed

    def __iter__(self):
        return iter((self.f1, self.f2))


def detect_data_trend(sample: AlignedSample, significance: float = 0.05, min_aligned: int = 10, alpha: float | None = None) -> DataTrend:
    """Fit both directions with one shared weight vector and test each slope.

    A data-trend exists when at least one slope differs significantly from zero.
    Passing ``alpha`` recomputes the weights first.
    """
    if alpha is not None and alpha != sample.alpha:
        sample = sample.reweighted(alpha)
    results = []
    for direction in DIRECTIONS:
        try:
            model = fit_wls(sample, direction, min_aligned=min_aligned)
        except DataError as exc:
            results.append(DirectionResult(direction, reason=f"{type(exc).__name__}: {exc}"))
            continue
        results.append(DirectionResult(direction, model, slope_test(model, significance)))
    return DataTrend(*results)

"""Outlier-score representations: mean residuals, cumulative and dominant scores."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import EmptyRepresentationError, ParameterError

KINDS = ("mean_residual", "cumulative", "dominant")

# a window whose spread is below this fraction of its magnitude counts as constant
SIGMA_REL_EPS = 1e-12


@dataclass(frozen=True)
class Thresholds:
    theta_pos: float = 3.0
    theta_neg: float = -3.0

    def __post_init__(self):
        if not (self.theta_neg < 0 < self.theta_pos):
            raise ParameterError(
                f"thresholds need theta_neg < 0 < theta_pos, got ({self.theta_neg}, {self.theta_pos})"
            )

    def is_outlier(self, u):
        """Strict comparison: a score equal to a threshold is an inlier."""
        u = np.asarray(u)
        return (u > self.theta_pos) | (u < self.theta_neg)

    def to_dict(self):
        return {"theta_pos": self.theta_pos, "theta_neg": self.theta_neg}


@dataclass(frozen=True, eq=False)
class Representation:
    """Per-timestamp outlier scores for one attribute.

    ``rep_id`` is ``attr_id`` for representations without a window and
    ``"{attr_id}@{phi}"`` otherwise, so windowings of one attribute stay
    distinguishable in the index.
    """

    attr_id: str
    kind: str
    timestamps: np.ndarray
    scores: np.ndarray
    thresholds: Thresholds = Thresholds()
    phi: int | None = None
    lam: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"kind must be one of {KINDS}, got {self.kind!r}")
        ts = np.asarray(self.timestamps)
        if np.issubdtype(ts.dtype, np.datetime64):
            ts = ts.astype("datetime64[ns]")
        scores = np.asarray(self.scores, dtype=np.float64)
        if ts.shape != scores.shape or ts.ndim != 1:
            raise ValueError("timestamps and scores must be 1-D arrays of equal length")
        if len(ts) > 1 and not np.all(ts[1:] > ts[:-1]):
            raise ValueError(f"{self.attr_id}: timestamps must be strictly increasing")
        if not np.all(np.isfinite(scores)):
            raise ValueError(f"{self.attr_id}: scores must be finite")
        ts = ts.copy()
        scores = scores.copy()
        ts.flags.writeable = False
        scores.flags.writeable = False
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "scores", scores)

    @property
    def rep_id(self) -> str:
        return self.attr_id if self.phi is None else f"{self.attr_id}@{self.phi}"

    def __len__(self):
        return len(self.scores)

    def outlier_mask(self) -> np.ndarray:
        return self.thresholds.is_outlier(self.scores)

    def as_dict(self) -> dict:
        return dict(zip(self.timestamps, self.scores.tolist()))

    def derive(self, kind, scores, **changes):
        fields = dict(
            attr_id=self.attr_id,
            kind=kind,
            timestamps=self.timestamps,
            scores=scores,
            thresholds=self.thresholds,
            phi=self.phi,
            lam=self.lam,
        )
        fields.update(changes)
        return Representation(**fields)


def mean_residuals(series, phi: int, thresholds: Thresholds = Thresholds(), ddof: int = 0) -> Representation:
    """Z-score of each value against the ``phi`` observations preceding it.

    Windows count observed points, not calendar units. Timestamps without a
    full window, or whose window is constant, are left out. ``ddof=0`` uses the
    population standard deviation.
    """
    if not isinstance(phi, (int, np.integer)) or phi < 2:
        raise ParameterError(f"phi must be an integer >= 2, got {phi!r}")
    if ddof not in (0, 1):
        raise ParameterError("ddof must be 0 or 1")
    values = np.ascontiguousarray(series.values, dtype=np.float64)
    if len(values) < phi + 1:
        raise EmptyRepresentationError(
            f"{series.id}: {len(values)} points, need at least {phi + 1} for phi={phi}"
        )
    scores, valid = kernels.rolling_zscore(values, int(phi), ddof, SIGMA_REL_EPS)
    return Representation(
        attr_id=series.id,
        kind="mean_residual",
        timestamps=series.timestamps[valid],
        scores=scores[valid],
        thresholds=thresholds,
        phi=int(phi),
    )


def _gap_lambdas(timestamps, lam, unit):
    gaps = np.diff(timestamps)
    if np.issubdtype(timestamps.dtype, np.datetime64):
        unit = np.timedelta64(1, "D") if unit is None else unit
        steps = gaps / unit
    else:
        steps = gaps / (1 if unit is None else unit)
    lams = np.empty(len(timestamps), dtype=np.float64)
    lams[0] = lam
    lams[1:] = np.power(lam, steps.astype(np.float64))
    return lams


def cumulative_scores(rep: Representation, lam: float, gap_decay: bool = False, unit=None) -> Representation:
    """Exponential-decay blend ``c_i = (1 - lam) u_i + lam c_{i-1}`` with ``c_0 = u_0``.

    The recurrence steps over observed timestamps. With ``gap_decay`` the decay
    factor of each step becomes ``lam ** gap`` where ``gap`` is the calendar
    distance to the previous observation in ``unit`` (default one day).
    """
    if not (0.0 <= lam <= 1.0) or math.isnan(lam):
        raise ParameterError(f"lambda must lie in [0, 1], got {lam}")
    u = np.ascontiguousarray(rep.scores, dtype=np.float64)
    if gap_decay and len(u):
        lams = _gap_lambdas(rep.timestamps, lam, unit)
    else:
        lams = np.full(len(u), float(lam))
    c = kernels.decay_recurrence(u, lams)
    return rep.derive("cumulative", c, lam=float(lam))


def dominant_scores(initial: Representation, cumulative: Representation) -> Representation:
    """Keep whichever of the initial and cumulative score is larger in magnitude (ties keep initial)."""
    if initial.attr_id != cumulative.attr_id:
        raise ValueError(f"attribute mismatch: {initial.attr_id} vs {cumulative.attr_id}")
    if len(initial) != len(cumulative) or not np.array_equal(initial.timestamps, cumulative.timestamps):
        raise ValueError(f"{initial.attr_id}: initial and cumulative timestamps differ")
    d = kernels.dominant(
        np.ascontiguousarray(initial.scores, dtype=np.float64),
        np.ascontiguousarray(cumulative.scores, dtype=np.float64),
    )
    return initial.derive("dominant", d, lam=cumulative.lam)


def classify(rep: Representation) -> tuple[set, set]:
    mask = rep.outlier_mask()
    ts = list(rep.timestamps)
    outliers = {t for t, m in zip(ts, mask) if m}
    inliers = {t for t, m in zip(ts, mask) if not m}
    return outliers, inliers


def dominant_representation(initial: Representation, lam: float, gap_decay: bool = False, unit=None):
    return dominant_scores(initial, cumulative_scores(initial, lam, gap_decay=gap_decay, unit=unit))


def score_series(series, phi, lam=0.5, thresholds=Thresholds(), ddof=0, gap_decay=False, unit=None):
    """Return ``(initial, cumulative, dominant)`` representations for one window size."""
    initial = mean_residuals(series, phi, thresholds, ddof=ddof)
    cumulative = cumulative_scores(initial, lam, gap_decay=gap_decay, unit=unit)
    return initial, cumulative, dominant_scores(initial, cumulative)

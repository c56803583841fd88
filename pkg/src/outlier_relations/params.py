"""Discovery parameters and their legal ranges."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields

from .errors import ParameterError
from .scoring import Thresholds

DEFAULT_PHI = (28, 30, 64, 90, 128, 180, 256, 360, 365)


@dataclass(frozen=True)
class PodsParams:
    alpha: float = 0.5
    beta: float = 0.67
    r2_min: float = 0.25
    lam: float = 0.5
    theta_pos: float = 3.0
    theta_neg: float = -3.0
    phi_list: tuple[int, ...] = DEFAULT_PHI
    significance: float = 0.05
    rho_level: float = 95.0
    bootstrap_B: int = 1000
    min_aligned: int = 10
    seed: int = 0
    exclusion: str = "same-attribute"
    gap_decay: bool = False
    ddof: int = 0
    percentile_method: str = "linear"
    n_jobs: int = 1
    threshold_overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "phi_list", tuple(int(p) for p in self.phi_list))
        overrides = {}
        for attr, thr in dict(self.threshold_overrides).items():
            if isinstance(thr, Thresholds):
                overrides[attr] = thr
            else:
                overrides[attr] = _checked(f"threshold_overrides[{attr}]", lambda: Thresholds(**thr))
        object.__setattr__(self, "threshold_overrides", overrides)
        _range("alpha", self.alpha, 0.0, 1.0, lo_open=True, legal="(0, 1]")
        _range("beta", self.beta, 0.5, 1.0, legal="[0.5, 1]")
        _range("r2_min", self.r2_min, -math.inf, 1.0, legal="(-inf, 1]")
        _range("lam", self.lam, 0.0, 1.0, legal="[0, 1]")
        _range("significance", self.significance, 0.0, 1.0, lo_open=True, hi_open=True, legal="(0, 1)")
        _range("rho_level", self.rho_level, 0.0, 100.0, legal="[0, 100]")
        if not (self.theta_neg < 0 < self.theta_pos):
            raise ParameterError("theta_neg/theta_pos must satisfy theta_neg < 0 < theta_pos")
        if not self.phi_list or any(p < 2 for p in self.phi_list):
            raise ParameterError("phi_list must hold integers >= 2")
        if len(set(self.phi_list)) != len(self.phi_list):
            raise ParameterError("phi_list entries must be distinct")
        if int(self.bootstrap_B) < 200:
            raise ParameterError(f"bootstrap_B must be >= 200, got {self.bootstrap_B}")
        if int(self.min_aligned) < 3:
            raise ParameterError(f"min_aligned must be >= 3, got {self.min_aligned}")
        if self.exclusion not in ("same-attribute", "none"):
            raise ParameterError("exclusion must be 'same-attribute' or 'none'")
        if self.ddof not in (0, 1):
            raise ParameterError("ddof must be 0 or 1")
        if int(self.n_jobs) < 1:
            raise ParameterError("n_jobs must be >= 1")

    @property
    def thresholds(self) -> Thresholds:
        return Thresholds(self.theta_pos, self.theta_neg)

    def thresholds_for(self, attr_id: str) -> Thresholds:
        return self.threshold_overrides.get(attr_id, self.thresholds)

    def with_(self, **changes) -> "PodsParams":
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        values.update(changes)
        return PodsParams(**values)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["phi_list"] = list(self.phi_list)
        d["threshold_overrides"] = {k: v.to_dict() for k, v in sorted(self.threshold_overrides.items())}
        return d


def _checked(name, build):
    try:
        return build()
    except (TypeError, ParameterError) as exc:
        raise ParameterError(f"{name}: {exc}") from None


def _range(name, value, lo, hi, lo_open=False, hi_open=False, legal=""):
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise ParameterError(f"{name} must be a number, got {value!r}") from None
    bad = math.isnan(v) or v < lo or v > hi or (lo_open and v == lo) or (hi_open and v == hi)
    if bad:
        raise ParameterError(f"{name}={value} is outside its legal range {legal}")

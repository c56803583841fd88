"""End-to-end discovery: scoring, alignment index, trend detection and verification."""

from __future__ import annotations

import gc
import hashlib
import logging
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, EmptyRepresentationError
from .index import build_index
from .meaningfulness import Verification, pair_seed, verify_meaningfulness
from .params import PodsParams
from .scoring import dominant_representation, mean_residuals
from .trend import align, detect_data_trend

log = logging.getLogger(__name__)


@dataclass
class DiscoveryRecord:
    rep_a: str
    rep_b: str
    n_aligned: int = 0
    n_aligned_outliers: int = 0
    f1: dict | None = None
    f2: dict | None = None
    trend_found: bool = False
    meaningful: bool = False
    meaningful_direction: str | None = None
    verifications: dict = field(default_factory=dict)
    error: str | None = None
    elapsed_s: float = 0.0

    @property
    def key(self):
        return (self.rep_a, self.rep_b)

    def to_dict(self, timing=True) -> dict:
        d = {
            "rep_a": self.rep_a,
            "rep_b": self.rep_b,
            "n_aligned": self.n_aligned,
            "n_aligned_outliers": self.n_aligned_outliers,
            "f1": self.f1,
            "f2": self.f2,
            "trend_found": self.trend_found,
            "meaningful": self.meaningful,
            "meaningful_direction": self.meaningful_direction,
            "verifications": self.verifications,
            "error": self.error,
        }
        if timing:
            d["elapsed_s"] = self.elapsed_s
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "DiscoveryRecord":
        known = {k: d[k] for k in cls.__dataclass_fields__ if k in d}
        return cls(**known)


def initial_representations(series_list, params: PodsParams):
    """Mean-residual representations for every (attribute, window) combination.

    Series too short for a window are skipped and reported in the second return value.
    """
    reps, skipped = [], []
    for series in series_list:
        thr = params.thresholds_for(series.id)
        for phi in params.phi_list:
            try:
                rep = mean_residuals(series, phi, thr, ddof=params.ddof)
            except EmptyRepresentationError as exc:
                skipped.append(str(exc))
                continue
            if len(rep):
                reps.append(rep)
            else:
                skipped.append(f"{series.id}@{phi}: every window is constant")
    return reps, skipped


def dominant_representations(initial_reps, params: PodsParams):
    return [dominant_representation(rep, params.lam, gap_decay=params.gap_decay) for rep in initial_reps]


def evaluate_pair(rep_a, rep_b, params: PodsParams) -> DiscoveryRecord:
    """Trend detection then verification for one pair, f1 before f2.

    Never raises for data problems; they end up in ``record.error`` or in the
    per-direction ``reason``.
    """
    start = time.perf_counter()
    rec = DiscoveryRecord(rep_a.rep_id, rep_b.rep_id)
    try:
        sample = align(rep_a, rep_b, params.alpha)
        rec.n_aligned = len(sample)
        rec.n_aligned_outliers = sample.n_outliers
        trend = detect_data_trend(sample, params.significance, params.min_aligned)
        rec.f1 = trend.f1.summary()
        rec.f2 = trend.f2.summary()
        rec.trend_found = trend.trend_found
        for result in trend:
            if rec.meaningful or not result.passed:
                continue
            seed = pair_seed(params.seed, rec.rep_a, rec.rep_b, result.direction)
            try:
                ver = verify_meaningfulness(result.model, sample, params, seed=seed)
            except DataError as exc:
                ver = Verification(meaningful=False, gof=True, reason=str(exc))
            rec.verifications[result.direction] = ver.to_dict()
            if ver.meaningful:
                rec.meaningful = True
                rec.meaningful_direction = result.direction
    except Exception as exc:  # per-pair isolation
        log.warning("pair %s / %s failed: %s", rec.rep_a, rec.rep_b, exc)
        rec.error = f"{type(exc).__name__}: {exc}"
        rec.meaningful = False
    rec.elapsed_s = time.perf_counter() - start
    return rec


_worker_state: dict = {}


def _init_worker(catalog, params):
    _worker_state["catalog"] = catalog
    _worker_state["params"] = params


def _evaluate_key(key):
    catalog = _worker_state["catalog"]
    return evaluate_pair(catalog[key[0]], catalog[key[1]], _worker_state["params"])


def evaluate_pairs(catalog, keys, params: PodsParams) -> list[DiscoveryRecord]:
    if params.n_jobs > 1 and len(keys) > 1:
        with ProcessPoolExecutor(params.n_jobs, initializer=_init_worker, initargs=(catalog, params)) as pool:
            records = list(pool.map(_evaluate_key, keys, chunksize=max(1, len(keys) // (4 * params.n_jobs))))
    else:
        records = [evaluate_pair(catalog[a], catalog[b], params) for a, b in keys]
    return sorted(records, key=lambda r: r.key)


@dataclass
class DiscoveryResult:
    records: list
    representations: list
    pruning: dict
    skipped: list = field(default_factory=list)
    elapsed_s: float = 0.0

    @property
    def detected(self) -> set:
        return {r.key for r in self.records if r.meaningful}


def discover(dominant_reps, params: PodsParams = PodsParams(), use_index: bool = True) -> DiscoveryResult:
    """Evaluate indexed pairs (or the whole post-exclusion universe) of dominant representations."""
    start = time.perf_counter()
    index = build_index(dominant_reps)
    indexed = [p.key for p in index.candidate_pairs(params.exclusion)]
    universe = index.universe(params.exclusion)
    universe_size = len(universe)
    keys = indexed if use_index else universe
    records = evaluate_pairs(index.catalog, keys, params)
    pruning = {
        "total_pairs": universe_size,
        "indexed_pairs": len(indexed),
        "pruned_fraction": 1.0 if universe_size == 0 else 1.0 - len(indexed) / universe_size,
    }
    return DiscoveryResult(records, list(dominant_reps), pruning, elapsed_s=time.perf_counter() - start)


def discover_initial(initial_reps, params: PodsParams = PodsParams(), use_index: bool = True) -> DiscoveryResult:
    """Start from initial outlier scores (any scoring function); build dominant scores, then discover."""
    return discover(dominant_representations(initial_reps, params), params, use_index)


def run_discovery(series_list, params: PodsParams = PodsParams(), use_index: bool = True) -> DiscoveryResult:
    if len(series_list) < 2:
        raise DataError("discovery needs at least two attributes")
    initial, skipped = initial_representations(series_list, params)
    result = discover_initial(initial, params, use_index)
    result.skipped = skipped
    return result


def timing_report(dominant_reps, params: PodsParams = PodsParams(), with_index: bool = True) -> dict:
    """Wall and process CPU time of index construction plus pair evaluation.

    CPU time excludes cycles stolen by other processes on a shared host; it only
    covers this process, so it undercounts when ``n_jobs > 1``.
    """
    cpu = time.process_time()
    result = discover(dominant_reps, params, use_index=with_index)
    cpu = time.process_time() - cpu
    return {
        "with_index": with_index,
        "elapsed": result.elapsed_s,
        "cpu": cpu,
        "n_pairs_evaluated": len(result.records),
        "n_meaningful": len(result.detected),
        "pruned_fraction": result.pruning["pruned_fraction"],
        "total_pairs": result.pruning["total_pairs"],
        "indexed_pairs": result.pruning["indexed_pairs"],
    }


def median_timings(dominant_reps, params: PodsParams = PodsParams(), repeat: int = 5) -> dict:
    """Median timing reports with and without the index.

    Runs alternate between the two modes; garbage collection is paused inside
    each run (as ``timeit`` does) so collector passes do not land in one mode.
    """
    runs = {True: [], False: []}
    for _ in range(repeat):
        for with_index in (True, False):
            gc.collect()
            gc.disable()
            try:
                runs[with_index].append(timing_report(dominant_reps, params, with_index))
            finally:
                gc.enable()
    out = {}
    for with_index, reports in runs.items():
        median = dict(reports[0])
        median["elapsed"] = statistics.median(r["elapsed"] for r in reports)
        median["cpu"] = statistics.median(r["cpu"] for r in reports)
        out["with_index" if with_index else "without_index"] = median
    return out


def corpus_digest(reps) -> str:
    h = hashlib.sha256()
    for rep in sorted(reps, key=lambda r: r.rep_id):
        h.update(rep.rep_id.encode())
        ts = rep.timestamps
        if np.issubdtype(ts.dtype, np.datetime64):
            ts = ts.view("int64")
        h.update(np.ascontiguousarray(ts, dtype=np.int64).tobytes())
        h.update(np.ascontiguousarray(rep.scores).tobytes())
    return h.hexdigest()


def build_report(result: DiscoveryResult, params: PodsParams, timing: bool = True) -> dict:
    return {
        "metadata": {
            "params": params.to_dict(),
            "seed": params.seed,
            "corpus_digest": corpus_digest(result.representations),
            "n_representations": len(result.representations),
            "representation_ids": sorted(r.rep_id for r in result.representations),
            "pruning": result.pruning,
            "skipped": result.skipped,
            "n_meaningful": len(result.detected),
        },
        "records": [r.to_dict(timing=timing) for r in result.records],
    }

"""Inverted index from timestamps to representations with a dominant outlier there."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import ParameterError

EXCLUSIONS = ("same-attribute", "none")


@dataclass(frozen=True)
class CandidatePair:
    rep_a: str
    rep_b: str
    shared_outlier_timestamps: frozenset

    def __post_init__(self):
        if self.rep_a == self.rep_b:
            raise ValueError("a pair needs two distinct representations")
        if self.rep_a > self.rep_b:
            a, b = self.rep_b, self.rep_a
            object.__setattr__(self, "rep_a", a)
            object.__setattr__(self, "rep_b", b)
        if not self.shared_outlier_timestamps:
            raise ValueError("candidate pairs share at least one outlier timestamp")

    @property
    def key(self):
        return (self.rep_a, self.rep_b)


def excluded(rep_a, rep_b, exclusion: str) -> bool:
    """True when the pair is removed from the comparison universe."""
    if exclusion == "none":
        return False
    if exclusion == "same-attribute":
        return rep_a.attr_id == rep_b.attr_id
    raise ParameterError(f"exclusion must be one of {EXCLUSIONS}, got {exclusion!r}")


class AlignmentIndex:
    """Postings ``timestamp -> set of rep ids`` plus a catalog ``rep id -> Representation``.

    Only outlier timestamps are stored; scores stay in the catalog.
    """

    def __init__(self):
        self.postings: dict = {}
        self.catalog: dict = {}

    def add(self, rep):
        rid = rep.rep_id
        if rid in self.catalog:
            raise ValueError(f"duplicate representation id {rid!r}")
        self.catalog[rid] = rep
        for t in rep.timestamps[rep.outlier_mask()]:
            self.postings.setdefault(t, set()).add(rid)

    def __len__(self):
        return len(self.catalog)

    def __contains__(self, rid):
        return rid in self.catalog

    def outlier_timestamps(self, rid) -> set:
        return {t for t, ids in self.postings.items() if rid in ids}

    def candidate_pairs(self, exclusion: str = "same-attribute") -> list[CandidatePair]:
        if exclusion not in EXCLUSIONS:
            raise ParameterError(f"exclusion must be one of {EXCLUSIONS}, got {exclusion!r}")
        shared: dict = {}
        for t, ids in self.postings.items():
            if len(ids) < 2:
                continue
            for a, b in combinations(sorted(ids), 2):
                shared.setdefault((a, b), set()).add(t)
        pairs = []
        for (a, b), ts in sorted(shared.items()):
            if excluded(self.catalog[a], self.catalog[b], exclusion):
                continue
            pairs.append(CandidatePair(a, b, frozenset(ts)))
        return pairs

    def universe(self, exclusion: str = "same-attribute") -> list[tuple[str, str]]:
        """Every non-excluded unordered pair of catalog ids, sorted."""
        ids = sorted(self.catalog)
        return [
            (a, b)
            for a, b in combinations(ids, 2)
            if not excluded(self.catalog[a], self.catalog[b], exclusion)
        ]

    def snapshot(self, paths=None) -> dict:
        """JSON-ready view: postings keyed by ISO timestamp, catalog as id -> path (or null)."""
        paths = paths or {}
        postings = {
            _ts_key(t): sorted(ids) for t, ids in sorted(self.postings.items(), key=lambda kv: kv[0])
        }
        return {"postings": postings, "catalog": {rid: paths.get(rid) for rid in sorted(self.catalog)}}


def _ts_key(t):
    if isinstance(t, np.datetime64):
        return np.datetime_as_string(t, unit="s")
    return str(t)


def build_index(reps) -> AlignmentIndex:
    index = AlignmentIndex()
    for rep in reps:
        index.add(rep)
    return index


def candidate_pairs(index: AlignmentIndex, exclusion: str = "same-attribute") -> list[CandidatePair]:
    return index.candidate_pairs(exclusion)


def pruning_stats(total_pairs: int, indexed_pairs: int) -> dict:
    pruned = 1.0 if total_pairs == 0 else 1.0 - indexed_pairs / total_pairs
    return {"total_pairs": total_pairs, "indexed_pairs": indexed_pairs, "pruned_fraction": pruned}


def pruning_report(index: AlignmentIndex, n_reps: int | None = None, exclusion: str = "same-attribute") -> dict:
    """Total vs. indexed pair counts.

    With ``n_reps`` the universe is ``n_reps * (n_reps - 1) / 2``; otherwise it
    is the non-excluded pairs of the catalog.
    """
    indexed = len(index.candidate_pairs(exclusion))
    if n_reps is not None:
        total = n_reps * (n_reps - 1) // 2
    else:
        total = len(index.universe(exclusion))
    return pruning_stats(total, indexed)

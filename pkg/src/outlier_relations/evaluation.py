"""Precision / recall / F-measure against labeled pairs, and parameter sweeps."""

from __future__ import annotations

import csv
from pathlib import Path

from .errors import DataError
from .params import PodsParams
from .pipeline import discover, dominant_representations

LABELS = ("positive", "negative")

# sweep grids: alpha in steps of 0.01 around its default, the rest in steps of 0.1
SENSITIVITY_GRIDS = {
    "alpha": [0.45, 0.46, 0.47, 0.48, 0.49, 0.5, 0.51, 0.52, 0.53, 0.54, 0.55],
    "beta": [0.5, 0.6, 0.67, 0.7, 0.8, 0.9, 1.0],
    "lam": [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9],
    "r2_min": [0.05, 0.15, 0.25, 0.35, 0.45, 0.55, 0.65, 0.75, 0.85, 0.95],
}


def canonical(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a <= b else (b, a)


def read_labels(path) -> dict:
    """Read ``pair_a, pair_b, label`` rows; a header row is optional."""
    labels = {}
    with open(Path(path), newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].startswith("#"):
                continue
            if len(row) != 3:
                raise DataError(f"label rows need 3 fields, got {row!r}")
            a, b, label = (c.strip() for c in row)
            if label.lower() == "label":
                continue
            label = label.lower()
            if label not in LABELS:
                raise DataError(f"label must be one of {LABELS}, got {label!r}")
            labels[canonical(a, b)] = label
    return labels


def evaluate(records, labels: dict, known_ids=None) -> dict:
    """Score discovery verdicts against labels.

    A labeled pair without a record is an error unless both ids are in
    ``known_ids``; such a pair was pruned by the index and counts as not meaningful.
    Precision (recall) is 1 when nothing was predicted (nothing was positive).
    """
    verdicts = {canonical(r.rep_a, r.rep_b): r.meaningful for r in records}
    known = set(known_ids or ())
    tp = fp = fn = tn = 0
    for (a, b), label in labels.items():
        key = canonical(a, b)
        if key in verdicts:
            predicted = verdicts[key]
        elif a in known and b in known:
            predicted = False
        else:
            raise DataError(f"label for unknown pair {key}")
        positive = label == "positive"
        if predicted and positive:
            tp += 1
        elif predicted:
            fp += 1
        elif positive:
            fn += 1
        else:
            tn += 1
    precision = 1.0 if tp + fp == 0 else tp / (tp + fp)
    recall = 1.0 if tp + fn == 0 else tp / (tp + fn)
    f = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    return {"precision": precision, "recall": recall, "f_measure": f, "tp": tp, "fp": fp, "fn": fn, "tn": tn}


def sensitivity(initial_reps, labels: dict, params: PodsParams = PodsParams(), grids=None) -> list[dict]:
    """F-measure table: vary one parameter at a time, others at ``params``.

    Dominant scores are recomputed only when lambda changes.
    """
    grids = SENSITIVITY_GRIDS if grids is None else grids
    base_dominant = dominant_representations(initial_reps, params)
    known = {r.rep_id for r in initial_reps}
    rows = []
    for name, values in grids.items():
        for value in values:
            p = params.with_(**{name: value})
            reps = dominant_representations(initial_reps, p) if name == "lam" else base_dominant
            result = discover(reps, p)
            scores = evaluate(result.records, labels, known_ids=known)
            rows.append({"param": name, "value": value, **scores})
    return rows

"""Synthetic score corpora with known ground truth.

Scores are generated directly as initial (mean-residual-like) representations,
standard normal apart from planted outliers.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

from .scoring import Representation, Thresholds

START = np.datetime64("2015-01-01", "D")


def days(n, start=START):
    return start + np.arange(n)


def _rep(attr_id, scores, kind="mean_residual", start=START):
    return Representation(attr_id, kind, days(len(scores), start), scores, Thresholds())


def _magnitudes(rng, k, lo=3.5, hi=5.0):
    return rng.uniform(lo, hi, size=k) * rng.choice([-1.0, 1.0], size=k)


def planted_pair(rng, kind="on_trend", n=365, n_outliers=6, noise=0.2, slope=-1.0, offset=8.0,
                 slots=None, names=("X", "Y")):
    """Two initial representations sharing planted aligned outliers.

    ``on_trend``: ``y = slope * x + noise`` with outliers exactly on the line.
    ``off_trend``: same inlier trend, outliers at ``slope * x + offset``.
    ``coincidence``: independent noise with one aligned outlier.
    """
    x = rng.standard_normal(n)
    if kind == "coincidence":
        y = rng.standard_normal(n)
        n_outliers = 1
    else:
        y = slope * x + rng.normal(0.0, noise, size=n)
    if slots is None:
        slots = rng.choice(np.arange(5, n), size=n_outliers, replace=False)
    slots = np.asarray(slots)[:n_outliers]
    xo = _magnitudes(rng, len(slots))
    x[slots] = xo
    if kind == "on_trend":
        y[slots] = slope * xo
    elif kind == "off_trend":
        y[slots] = slope * xo + offset
    elif kind == "coincidence":
        y[slots] = _magnitudes(rng, len(slots))
    else:
        raise ValueError(f"unknown kind {kind!r}")
    return _rep(names[0], x), _rep(names[1], y)


def labeled_corpus(seed=0, n_pos=20, n_neg=20, n=500, n_outliers=6):
    """Independent planted pairs with labels known by construction.

    Positives are on-trend with varied slope and noise; negatives alternate
    between off-trend outliers and coincidental single alignments. Planted
    outlier days never collide across pairs.
    """
    rng = np.random.default_rng(seed)
    free = rng.permutation(np.arange(5, n))
    reps, labels = [], {}
    cursor = 0
    specs = [("pos", i, "on_trend") for i in range(n_pos)]
    specs += [("neg", i, "off_trend" if i % 2 == 0 else "coincidence") for i in range(n_neg)]
    for tag, i, kind in specs:
        slots = free[cursor:cursor + n_outliers]
        cursor += n_outliers
        slope = rng.uniform(0.9, 1.3) * rng.choice([-1.0, 1.0])
        noise = rng.uniform(0.2, 0.5)
        offset = rng.uniform(6.0, 9.0) * rng.choice([-1.0, 1.0])
        names = (f"{tag}{i:02d}.x", f"{tag}{i:02d}.y")
        a, b = planted_pair(rng, kind, n, n_outliers, noise, slope, offset, slots, names)
        reps += [a, b]
        labels[tuple(sorted(names))] = "positive" if tag == "pos" else "negative"
    return reps, labels


def indexed_pair_fixture(n_reps, n_indexed, n=None, seed=0, kind="dominant"):
    """Representations whose alignment index yields exactly ``n_indexed`` pairs.

    Each chosen pair gets its own timestamp where both members (and nobody else)
    score an outlier; all other scores are zero.
    """
    all_pairs = list(combinations(range(n_reps), 2))
    if n_indexed > len(all_pairs):
        raise ValueError("more indexed pairs than pairs")
    rng = np.random.default_rng(seed)
    chosen = [all_pairs[i] for i in sorted(rng.choice(len(all_pairs), n_indexed, replace=False))]
    n = max(n or 0, n_indexed + 1)
    scores = np.zeros((n_reps, n))
    for slot, (a, b) in enumerate(chosen):
        scores[a, slot] = 4.0
        scores[b, slot] = -4.0
    reps = [Representation(f"r{i:03d}", kind, days(n), scores[i]) for i in range(n_reps)]
    return reps, {(f"r{a:03d}", f"r{b:03d}") for a, b in chosen}


def scaling_corpus(n_reps, n_active=25, n=400, n_pairs=None, edge_prob=0.7, loading=0.8, seed=0):
    """Corpus whose indexed-pair count does not depend on ``n_reps``.

    ``n_active`` representations share a latent factor and planted pairwise
    outlier alignments (exactly ``n_pairs`` of them if given, else each pair
    with probability ``edge_prob``); the remaining ones are clipped noise with
    no outliers. The active block is drawn from its own generator, so it is
    identical for every ``n_reps``. Inliers are clipped at 2.5 so that with
    lambda = 0.5 the cumulative score cannot spill a planted outlier into the
    next timestamp.
    """
    rng = np.random.default_rng(seed)
    latent = rng.standard_normal(n)
    active = loading * latent + np.sqrt(1 - loading**2) * rng.standard_normal((n_active, n))
    active = np.clip(active, -2.5, 2.5)
    every = list(combinations(range(n_active), 2))
    if n_pairs is None:
        pairs = [p for p in every if rng.random() < edge_prob]
    else:
        if n_pairs > min(len(every), n):
            raise ValueError("n_pairs exceeds the available pairs or timestamps")
        pairs = [every[i] for i in sorted(rng.choice(len(every), n_pairs, replace=False))]
    slots = rng.choice(n, size=len(pairs), replace=len(pairs) > n)
    for (a, b), slot in zip(pairs, slots):
        v = 3.5 + rng.random()
        active[a, slot] = v
        active[b, slot] = v
    reps = [_rep(f"a{i:03d}", active[i]) for i in range(n_active)]
    inert_rng = np.random.default_rng([seed, 1])
    for j in range(n_reps - n_active):
        reps.append(_rep(f"z{j:03d}", np.clip(inert_rng.standard_normal(n), -1.4, 1.4)))
    return reps

"""Acceptance gate: one test per criterion, each recording a PASS/FAIL line."""

import time
from itertools import combinations

import numpy as np
import pytest

from outlier_relations.evaluation import SENSITIVITY_GRIDS, evaluate, sensitivity
from outlier_relations.index import build_index, pruning_stats
from outlier_relations.params import PodsParams
from outlier_relations.pipeline import (
    discover,
    discover_initial,
    dominant_representations,
    median_timings,
    timing_report,
)
from outlier_relations.scoring import Representation, Thresholds, cumulative_scores, dominant_scores, mean_residuals
from outlier_relations.synthetic import days, indexed_pair_fixture, labeled_corpus, planted_pair, scaling_corpus
from outlier_relations.trend import fit_wls, make_sample, slope_test

from conftest import CRITERIA, make_series


def record(number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title} ({detail})"
    CRITERIA.append(line)
    print(line)
    assert ok, line


def closed_form(u, lam):
    """c_i = lam^i u_0 + sum_{k=0}^{i-1} lam^k (1 - lam) u_{i-k}, summed term by term."""
    n = len(u)
    out = np.empty(n)
    for i in range(n):
        k = np.arange(i)
        out[i] = lam**i * u[0] + np.sum(lam**k * (1 - lam) * u[i - k])
    return out


def test_criterion_01_recurrence_closed_form():
    rng = np.random.default_rng(101)
    seqs = [rng.normal(0, 3, rng.integers(1, 201)) for _ in range(100)]
    lams = (0.0, 0.25, 0.5, 0.9, 1.0)
    reps = [Representation("s", "mean_residual", days(len(u)), u) for u in seqs]
    start = time.perf_counter()
    outputs = {(i, lam): cumulative_scores(rep, lam).scores for i, rep in enumerate(reps) for lam in lams}
    elapsed = time.perf_counter() - start
    worst = max(np.max(np.abs(c - closed_form(seqs[i], lam))) for (i, lam), c in outputs.items())
    ok = worst <= 1e-9 and elapsed < 1.0
    record(1, "recurrence matches closed form", ok, f"max err {worst:.2e}, {elapsed:.3f}s for 500 runs")


def test_criterion_02_dominance_never_fewer_outliers():
    rng = np.random.default_rng(202)
    violations = 0
    for i in range(100):
        n = int(rng.integers(60, 400))
        x = rng.standard_t(4, size=n).cumsum() * rng.uniform(0.1, 1) + rng.standard_t(3, size=n)
        phi = int(rng.integers(2, 40))
        thr = Thresholds(rng.uniform(1.5, 4), -rng.uniform(1.5, 4))
        initial = mean_residuals(make_series(f"r{i}", x), phi, thr)
        dominant = dominant_scores(initial, cumulative_scores(initial, rng.uniform(0, 1)))
        violations += int(dominant.outlier_mask().sum() < initial.outlier_mask().sum())
    record(2, "dominant outlier count >= initial", violations == 0, f"{violations} violations in 100")


def test_criterion_03_ols_reduction():
    rng = np.random.default_rng(303)
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(10, 300))
        u1 = rng.normal(0, 2, n)
        u2 = rng.uniform(-2, 2) * u1 + rng.normal(0, 2, n)
        sample = make_sample(np.arange(n), u1, u2, alpha=1.0)
        for direction, (x, y) in (("f1", (u1, u2)), ("f2", (u2, u1))):
            m = fit_wls(sample, direction)
            (b, a), *_ = np.linalg.lstsq(np.column_stack([x, np.ones(n)]), y, rcond=None)
            worst = max(worst, abs(m.slope - b), abs(m.intercept - a))
    record(3, "alpha = 1 equals OLS", worst <= 1e-9, f"max coef diff {worst:.2e} over 50 samples x 2 directions")


@pytest.mark.slow
def test_criterion_04_slope_test_calibration():
    # constant weights (alpha = 1): the classical test whose nominal level is being checked
    rng = np.random.default_rng(404)
    trials, rejected = 10_000, 0
    for _ in range(trials):
        s = make_sample(np.arange(100), rng.standard_normal(100), rng.standard_normal(100), alpha=1.0)
        rejected += slope_test(fit_wls(s)).reject
    rate = rejected / trials
    # informational: the default outlier-biased weights depend on the response itself
    rng = np.random.default_rng(405)
    biased = sum(
        slope_test(fit_wls(make_sample(np.arange(100), rng.standard_normal(100), rng.standard_normal(100)))).reject
        for _ in range(2000)
    ) / 2000
    CRITERIA.append(f"       criterion  4 note: rejection rate with alpha = 0.5 weights is {biased:.3f} (not asserted)")
    record(4, "slope test calibrated at 0.05 +- 0.01", abs(rate - 0.05) <= 0.01, f"rate {rate:.4f} over {trials} trials")


def random_fixture(rng, n_reps, n=80):
    """Scores with a shared factor, planted pairwise alignments and some same-attribute reps."""
    latent = rng.standard_normal(n)
    reps = []
    for i in range(n_reps):
        load = rng.uniform(-0.9, 0.9)
        s = load * latent + np.sqrt(1 - load**2) * rng.standard_normal(n)
        reps.append(s)
    for _ in range(rng.integers(0, 2 * n_reps + 1)):
        a, b = rng.choice(n_reps, 2, replace=False)
        t = rng.integers(n)
        v = rng.uniform(3.2, 5) * rng.choice([-1, 1])
        reps[a][t] = v
        reps[b][t] = -v if rng.random() < 0.5 else v
    out = []
    for i, s in enumerate(reps):
        keep = rng.random(n) < 0.95
        out.append(Representation(f"x{i // 3}", "dominant", days(n)[keep], s[keep], phi=i % 3 + 2))
    return out


def brute_force_pairs(reps, exclusion):
    sets = {r.rep_id: (r, set(r.timestamps[r.outlier_mask()].tolist())) for r in reps}
    pairs = {}
    for a, b in combinations(sorted(sets), 2):
        (ra, sa), (rb, sb) = sets[a], sets[b]
        if exclusion == "same-attribute" and ra.attr_id == rb.attr_id:
            continue
        if sa & sb:
            pairs[(a, b)] = sa & sb
    return pairs


def test_criterion_05_index_equivalence():
    rng = np.random.default_rng(505)
    mismatched_pairs = mismatched_sets = 0
    total_meaningful = 0
    p = PodsParams(bootstrap_B=300)
    for k in range(50):
        reps = random_fixture(rng, int(rng.integers(2, 31)))
        exclusion = "same-attribute" if k % 2 == 0 else "none"
        index = build_index(reps)
        got = {c.key: set(np.asarray(list(c.shared_outlier_timestamps), dtype="datetime64[ns]").astype(np.int64).tolist())
               for c in index.candidate_pairs(exclusion)}
        want = {key: {int(np.datetime64(t, "ns").astype(np.int64)) for t in ts}
                for key, ts in brute_force_pairs(reps, exclusion).items()}
        mismatched_pairs += got != want
        params = p.with_(exclusion=exclusion)
        with_index = discover(reps, params, use_index=True).detected
        without = discover(reps, params, use_index=False).detected
        mismatched_sets += with_index != without
        total_meaningful += len(with_index)
    ok = mismatched_pairs == 0 and mismatched_sets == 0
    record(5, "index equals brute force; verdicts unchanged by index", ok,
           f"{mismatched_pairs} pair-set and {mismatched_sets} verdict mismatches over 50 fixtures, "
           f"{total_meaningful} meaningful pairs seen")


def test_criterion_06_end_to_end_fixture():
    start = time.perf_counter()
    on = off = 0
    for seed in range(100):
        on += discover_initial(list(planted_pair(np.random.default_rng(seed), "on_trend"))).records[0].meaningful
        rec = discover_initial(list(planted_pair(np.random.default_rng(seed), "off_trend"))).records
        off += not (rec and rec[0].meaningful)
    elapsed = time.perf_counter() - start
    ok = on >= 95 and off >= 95 and elapsed < 30
    record(6, "on-trend meaningful, off-trend not", ok, f"on {on}/100, off rejected {off}/100, {elapsed:.1f}s")


def test_criterion_07_coincidence_rejection():
    flagged = 0
    for seed in range(200):
        records = discover_initial(list(planted_pair(np.random.default_rng(10_000 + seed), "coincidence"))).records
        flagged += bool(records and records[0].meaningful)
    record(7, "coincidental alignment rarely meaningful", flagged <= 20, f"{flagged}/200 flagged")


@pytest.mark.slow
def test_criterion_08_index_scaling_shape():
    params = PodsParams()
    sizes = (25, 30, 40, 70)
    table5 = {25: (300, 0.30), 30: (435, 0.52), 40: (780, 0.73), 70: (2415, 0.91)}
    corpora = {n: dominant_representations(scaling_corpus(n, n_pairs=209), params) for n in sizes}
    for reps in corpora.values():
        timing_report(reps, params, True)  # warm-up
    # process CPU time, sizes interleaved per round: wall time on a shared host includes stolen cycles
    runs = {n: {True: [], False: []} for n in sizes}
    for _ in range(7):
        for n in sizes:
            t = median_timings(corpora[n], params, repeat=1)
            runs[n][True].append(t["with_index"])
            runs[n][False].append(t["without_index"]["cpu"])
    rows = {n: (min(r["cpu"] for r in runs[n][True]), min(runs[n][False]), runs[n][True][0]) for n in sizes}
    with_times = [rows[n][0] for n in sizes]
    without_times = [rows[n][1] for n in sizes]
    spread = (max(with_times) - min(with_times)) / min(with_times)
    monotone = all(a < b for a, b in zip(without_times, without_times[1:]))
    shape_rows_ok = all(
        rows[n][2]["indexed_pairs"] == 209
        and rows[n][2]["total_pairs"] == table5[n][0]
        and round(rows[n][2]["pruned_fraction"], 2) == table5[n][1]
        for n in sizes
    )
    # Table 4 arithmetic on fixtures with exactly the published counts
    arithmetic_ok = True
    for n, indexed, rounded in ((10, 32, 0.29), (25, 209, 0.30), (50, 798, 0.35), (100, 2966, 0.40)):
        reps, _ = indexed_pair_fixture(n, indexed)
        rep = pruning_stats(n * (n - 1) // 2, len(build_index(reps).candidate_pairs()))
        arithmetic_ok &= rep["indexed_pairs"] == indexed and round(rep["pruned_fraction"], 2) == rounded
    ok = spread < 0.25 and monotone and shape_rows_ok and arithmetic_ok
    detail = (
        "CPU with index " + "/".join(f"{t:.3f}" for t in with_times) + f"s (spread {spread:.0%}), "
        "without " + "/".join(f"{t:.3f}" for t in without_times) + "s, "
        f"counts match tables: {shape_rows_ok and arithmetic_ok}"
    )
    record(8, "index time flat, no-index time grows", ok, detail)


def test_criterion_09_labeled_metrics():
    reps, labels = labeled_corpus(seed=0)
    result = discover_initial(reps, PodsParams())
    m = evaluate(result.records, labels, known_ids={r.rep_id for r in reps})
    assert m["tp"] + m["fn"] == 20 and m["fp"] + m["tn"] == 20
    record(9, "F >= 0.85 on planted corpus", m["f_measure"] >= 0.85,
           f"P {m['precision']:.3f} R {m['recall']:.3f} F {m['f_measure']:.3f}")


@pytest.mark.slow
def test_criterion_10_sensitivity_monotone():
    reps, labels = labeled_corpus(seed=0)
    rows = sensitivity(reps, labels, PodsParams(), SENSITIVITY_GRIDS)
    table = {}
    for r in rows:
        table.setdefault(r["param"], []).append((r["value"], r["f_measure"], r["recall"]))
    assert set(table) == {"alpha", "beta", "lam", "r2_min"}
    bad = []
    for name in ("beta", "r2_min"):
        series = sorted(table[name])
        for (v1, f1, r1), (v2, f2, r2) in zip(series, series[1:]):
            if f2 > f1 + 1e-12 or r2 > r1 + 1e-12:
                bad.append(f"{name} {v1}->{v2}")
    summary = ", ".join(f"{k}: F " + "/".join(f"{f:.2f}" for _, f, _ in sorted(v)) for k, v in table.items())
    record(10, "F nonincreasing in beta and r2_min", not bad, (", ".join(bad) or "no violations") + "; " + summary)

"""Command line entry point.

Exit codes: 0 success, 1 usage or configuration error, 2 data error. Errors
are also written to stderr as one JSON object per line.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import kernels
from .config import Config, load_config
from .errors import ConfigError, DataError, ParameterError
from .evaluation import evaluate, read_labels
from .index import build_index, pruning_report
from .ingest import read_series
from .params import DEFAULT_PHI, PodsParams
from .pipeline import (
    DiscoveryRecord,
    build_report,
    discover,
    initial_representations,
    median_timings,
)
from .scoring import cumulative_scores, dominant_scores
from .storage import dumps, read_scores, write_json, write_scatter, write_scores
from .trend import align

log = logging.getLogger("outlier_relations")

EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _load_config(args) -> Config:
    if getattr(args, "config", None):
        return load_config(args.config)
    return Config()


def _params(args, config: Config) -> PodsParams:
    changes = {}
    for flag, name in (("lam", "lam"), ("theta_pos", "theta_pos"), ("theta_neg", "theta_neg"), ("seed", "seed"), ("exclusion", "exclusion"), ("n_jobs", "n_jobs")):
        value = getattr(args, flag, None)
        if value is not None:
            changes[name] = value
    if getattr(args, "phi", None):
        changes["phi_list"] = tuple(args.phi)
    if getattr(args, "gap_decay", False):
        changes["gap_decay"] = True
    return config.params.with_(**changes) if changes else config.params


def _ingest(config: Config):
    if not config.ingest:
        raise ConfigError("config has no ingest entries")
    series, reports = [], []
    for entry in config.ingest:
        s, report = read_series(config.resolve(entry.path), entry.schema)
        series += s
        reports.append(report.to_dict())
    return series, reports


def _score_triples(series, params):
    initial, skipped = initial_representations(series, params)
    triples = []
    for rep in initial:
        cum = cumulative_scores(rep, params.lam, gap_decay=params.gap_decay)
        triples.append((rep, cum, dominant_scores(rep, cum)))
    return triples, skipped


def _dominant_reps(args, config, params):
    """Dominant representations from --scores, else ingest + score from the config."""
    if getattr(args, "scores", None):
        loaded = read_scores(args.scores)
        return [v["dominant"] for _, v in sorted(loaded.items())], []
    series, _ = _ingest(config)
    triples, skipped = _score_triples(series, params)
    return [t[2] for t in triples], skipped


def _output_dir(args, config, default):
    if getattr(args, "out", None):
        return Path(args.out)
    if config.output.get("dir"):
        return config.resolve(config.output["dir"]) / default
    return Path(default)


def cmd_score(args):
    config = _load_config(args)
    params = _params(args, config)
    series, reports = _ingest(config)
    triples, skipped = _score_triples(series, params)
    out = _output_dir(args, config, "scores")
    manifest = write_scores(out, triples, params.lam, params.gap_decay, reports)
    print(dumps({"manifest": str(manifest), "n_representations": len(triples), "skipped": skipped, "ingest": reports}))


def cmd_index(args):
    loaded = read_scores(args.scores)
    reps = [v["dominant"] for _, v in sorted(loaded.items())]
    index = build_index(reps)
    report = pruning_report(index, exclusion=args.exclusion)
    snapshot = index.snapshot({rid: v["file"] for rid, v in loaded.items()})
    snapshot["exclusion"] = args.exclusion
    snapshot["pruning"] = report
    out = Path(args.out) if args.out else Path(args.scores) / "index.json"
    write_json(out, snapshot)
    print(dumps({"index": str(out), **report}))


def cmd_discover(args):
    config = _load_config(args)
    params = _params(args, config)
    reps, skipped = _dominant_reps(args, config, params)
    result = discover(reps, params, use_index=not args.no_index)
    result.skipped = skipped
    report = build_report(result, params, timing=not args.no_timing)
    out = Path(args.out) if args.out else _output_dir(args, config, "report.json")
    write_json(out, report)
    print(
        dumps(
            {
                "report": str(out),
                "pairs_evaluated": len(result.records),
                "meaningful": sorted([list(k) for k in result.detected]),
                **result.pruning,
            }
        )
    )


def cmd_eval(args):
    report = json.loads(Path(args.report).read_text())
    records = [DiscoveryRecord.from_dict(r) for r in report["records"]]
    labels = read_labels(args.labels)
    known = report.get("metadata", {}).get("representation_ids")
    print(dumps(evaluate(records, labels, known_ids=known)))


def cmd_bench(args):
    config = _load_config(args)
    params = _params(args, config)
    if args.synthetic:
        from .pipeline import dominant_representations
        from .synthetic import scaling_corpus

        reps = dominant_representations(scaling_corpus(args.synthetic, n_active=min(25, args.synthetic)), params)
    else:
        reps, _ = _dominant_reps(args, config, params)
    runs = median_timings(reps, params, args.repeat)
    w, wo = runs["with_index"]["elapsed"], runs["without_index"]["elapsed"]
    runs["speedup"] = wo / w if w > 0 else None
    runs["backend"] = kernels.BACKEND
    print(dumps(runs))


def cmd_export_scatter(args):
    config = _load_config(args)
    params = _params(args, config)
    loaded = read_scores(args.scores)
    catalog = {rid: v["dominant"] for rid, v in loaded.items()}
    if args.pair:
        pairs = [tuple(p) for p in args.pair]
    elif args.report:
        report = json.loads(Path(args.report).read_text())
        pairs = [(r["rep_a"], r["rep_b"]) for r in report["records"] if r["meaningful"] or args.all]
    else:
        raise UsageError("export-scatter needs --pair or --report")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for a, b in pairs:
        for rid in (a, b):
            if rid not in catalog:
                raise DataError(f"unknown representation {rid!r}")
        sample = align(catalog[a], catalog[b], params.alpha)
        path = out / f"{a}__{b}.csv".replace("/", "_")
        write_scatter(path, sample)
        written.append(str(path))
    print(dumps({"written": written}))


def build_parser():
    p = _Parser(prog="outlier-relations", description="Discover meaningful relationships between aligned outliers.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, config_required=False):
        sp.add_argument("--config", required=config_required, help="YAML configuration file")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--n-jobs", dest="n_jobs", type=int)

    def scoring_flags(sp):
        sp.add_argument("--phi", type=int, action="append", help=f"window size, repeatable (default {','.join(map(str, DEFAULT_PHI))})")
        sp.add_argument("--lambda", dest="lam", type=float, help="cumulative decay coefficient (default 0.5)")
        sp.add_argument("--theta-pos", dest="theta_pos", type=float, help="positive outlier threshold (default 3)")
        sp.add_argument("--theta-neg", dest="theta_neg", type=float, help="negative outlier threshold (default -3)")
        sp.add_argument("--gap-decay", action="store_true", help="decay lambda over calendar gaps")

    sp = sub.add_parser("score", help="ingest and write per-(attribute, phi) score files")
    common(sp, config_required=True)
    scoring_flags(sp)
    sp.add_argument("--out", help="output directory")
    sp.set_defaults(func=cmd_score)

    sp = sub.add_parser("index", help="build the alignment index from score files")
    sp.add_argument("--scores", required=True, help="score directory written by 'score'")
    sp.add_argument("--exclusion", choices=("same-attribute", "none"), default="same-attribute")
    sp.add_argument("--out", help="snapshot path (default SCORES/index.json)")
    sp.set_defaults(func=cmd_index)

    sp = sub.add_parser("discover", help="run discovery and write a JSON report")
    common(sp)
    scoring_flags(sp)
    sp.add_argument("--scores", help="use precomputed score files instead of ingesting")
    sp.add_argument("--exclusion", choices=("same-attribute", "none"))
    sp.add_argument("--no-index", action="store_true", help="evaluate every pair")
    sp.add_argument("--no-timing", action="store_true", help="omit timing fields for reproducible output")
    sp.add_argument("--out", help="report path")
    sp.set_defaults(func=cmd_discover)

    sp = sub.add_parser("eval", help="precision / recall / F-measure of a report against labels")
    sp.add_argument("--report", required=True)
    sp.add_argument("--labels", required=True, help="CSV rows: pair_a, pair_b, positive|negative")
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("bench", help="timing with and without the alignment index")
    common(sp)
    scoring_flags(sp)
    sp.add_argument("--scores")
    sp.add_argument("--synthetic", type=int, metavar="N", help="benchmark a synthetic corpus of N representations")
    sp.add_argument("--exclusion", choices=("same-attribute", "none"))
    sp.add_argument("--repeat", type=int, default=3)
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("export-scatter", help="write per-pair aligned score tables")
    common(sp)
    sp.add_argument("--scores", required=True)
    sp.add_argument("--pair", nargs=2, action="append", metavar=("REP_A", "REP_B"))
    sp.add_argument("--report", help="export pairs from a discovery report (meaningful ones unless --all)")
    sp.add_argument("--all", action="store_true")
    sp.add_argument("--out", required=True, help="output directory")
    sp.set_defaults(func=cmd_export_scatter)
    return p


def _fail(kind, message, code):
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)
    return code


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        return _fail("usage", str(exc), EXIT_USAGE)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except UsageError as exc:
        return _fail("usage", str(exc), EXIT_USAGE)
    except (ConfigError, ParameterError) as exc:
        return _fail("config", str(exc), EXIT_USAGE)
    except (DataError, FileNotFoundError, json.JSONDecodeError) as exc:
        return _fail("data", str(exc), EXIT_DATA)
    return 0


if __name__ == "__main__":
    sys.exit(main())

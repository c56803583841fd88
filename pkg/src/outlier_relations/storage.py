"""On-disk formats: score files with their manifest, JSON reports, scatter tables."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .errors import DataError
from .scoring import Representation, Thresholds

MANIFEST = "manifest.json"
SCORE_COLUMNS = ("timestamp", "initial", "cumulative", "dominant")
SCATTER_COLUMNS = ("timestamp", "u1", "u2", "is_aligned_outlier", "weight")


def format_timestamps(ts) -> list[str]:
    ts = np.asarray(ts)
    if not np.issubdtype(ts.dtype, np.datetime64):
        return [str(t) for t in ts.tolist()]
    ts = ts.astype("datetime64[ns]")
    whole_days = bool(np.all(ts == ts.astype("datetime64[D]")))
    return list(np.datetime_as_string(ts, unit="D" if whole_days else "s"))


def parse_timestamps(values) -> np.ndarray:
    return np.array(values, dtype="datetime64[ns]")


def _filename(rep_id: str) -> str:
    return rep_id.replace("/", "_").replace("\\", "_") + ".csv"


def write_scores(out_dir, triples, lam, gap_decay=False, ingest_reports=()) -> Path:
    """Write one CSV per ``(initial, cumulative, dominant)`` triple plus ``manifest.json``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    for initial, cumulative, dominant in triples:
        fname = _filename(initial.rep_id)
        with open(out_dir / fname, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(SCORE_COLUMNS)
            for row in zip(format_timestamps(initial.timestamps), initial.scores, cumulative.scores, dominant.scores):
                w.writerow([row[0], repr(float(row[1])), repr(float(row[2])), repr(float(row[3]))])
        entries.append(
            {
                "id": initial.rep_id,
                "attr_id": initial.attr_id,
                "phi": initial.phi,
                "file": fname,
                "n_points": len(initial),
                "thresholds": initial.thresholds.to_dict(),
            }
        )
    manifest = {
        "lambda": lam,
        "gap_decay": gap_decay,
        "representations": entries,
        "ingest_reports": list(ingest_reports),
    }
    path = out_dir / MANIFEST
    write_json(path, manifest)
    return path


def read_scores(score_dir):
    """Load a score directory; returns ``{rep_id: {"initial": rep, "dominant": rep, "file": path}}``."""
    score_dir = Path(score_dir)
    mpath = score_dir / MANIFEST
    if not mpath.exists():
        raise DataError(f"no {MANIFEST} in {score_dir}")
    manifest = json.loads(mpath.read_text())
    out = {}
    for entry in manifest["representations"]:
        path = score_dir / entry["file"]
        if not path.exists():
            raise DataError(f"missing score file {path}")
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        ts = parse_timestamps([r["timestamp"] for r in rows])
        thr = Thresholds(**entry["thresholds"])
        cols = {c: np.array([float(r[c]) for r in rows]) for c in SCORE_COLUMNS[1:]}
        common = dict(attr_id=entry["attr_id"], timestamps=ts, thresholds=thr, phi=entry["phi"])
        out[entry["id"]] = {
            "initial": Representation(kind="mean_residual", scores=cols["initial"], **common),
            "dominant": Representation(kind="dominant", scores=cols["dominant"], lam=manifest["lambda"], **common),
            "file": str(path),
        }
    return out


def _default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"not JSON serialisable: {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, default=_default, allow_nan=True)


def write_json(path, obj):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(dumps(obj) + "\n")


def write_scatter(path, sample):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SCATTER_COLUMNS)
        stamps = format_timestamps(sample.timestamps)
        for t, (_, u1, u2, out, weight) in zip(stamps, sample.rows()):
            w.writerow([t, repr(u1), repr(u2), int(out), repr(weight)])

"""Loading delimited files into timestamp-ordered attribute series."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from .errors import IngestError, ParameterError

AGGREGATORS = ("sum", "mean", "count")
GRANULARITIES = ("hour", "day", "week")


@dataclass(frozen=True)
class AttributeSpec:
    name: str
    column: str | None = None
    aggregator: str = "sum"

    def __post_init__(self):
        if self.aggregator not in AGGREGATORS:
            raise ParameterError(f"aggregator must be one of {AGGREGATORS}, got {self.aggregator!r}")
        if self.column is None and self.aggregator != "count":
            raise ParameterError(f"attribute {self.name!r}: aggregator {self.aggregator!r} needs a column")


@dataclass(frozen=True)
class IngestSchema:
    timestamp_column: str
    attributes: tuple[AttributeSpec, ...]
    timestamp_format: str | None = None
    granularity: str = "day"
    delimiter: str = ","
    dataset: str | None = None

    def __post_init__(self):
        if self.granularity not in GRANULARITIES:
            raise ParameterError(f"granularity must be one of {GRANULARITIES}, got {self.granularity!r}")
        if not self.attributes:
            raise ParameterError("schema needs at least one attribute")
        object.__setattr__(self, "attributes", tuple(self.attributes))


@dataclass(frozen=True, eq=False)
class AttributeSeries:
    """A named series with strictly increasing timestamps and finite values."""

    id: str
    timestamps: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        ts = np.asarray(self.timestamps)
        if np.issubdtype(ts.dtype, np.datetime64):
            ts = ts.astype("datetime64[ns]")
        vals = np.asarray(self.values, dtype=np.float64)
        if ts.shape != vals.shape or ts.ndim != 1:
            raise ValueError("timestamps and values must be 1-D arrays of equal length")
        if len(ts) > 1 and not np.all(ts[1:] > ts[:-1]):
            raise ValueError(f"{self.id}: timestamps must be strictly increasing")
        if not np.all(np.isfinite(vals)):
            raise ValueError(f"{self.id}: values must be finite")
        ts = ts.copy()
        vals = vals.copy()
        ts.flags.writeable = False
        vals.flags.writeable = False
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return len(self.values)

    @property
    def points(self):
        return list(zip(self.timestamps, self.values))


@dataclass
class IngestReport:
    file: str
    rows_read: int = 0
    rows_rejected: int = 0
    attributes: list[dict] = field(default_factory=list)

    def to_dict(self):
        return {
            "file": self.file,
            "rows_read": self.rows_read,
            "rows_rejected": self.rows_rejected,
            "attributes": self.attributes,
        }


def truncate(ts: pd.Series, granularity: str) -> pd.Series:
    """Floor naive UTC timestamps to the start of their granularity bucket."""
    if granularity == "hour":
        return ts.dt.floor("h")
    if granularity == "day":
        return ts.dt.floor("D")
    if granularity == "week":
        # weeks start on Monday
        return ts.dt.to_period("W-SUN").dt.start_time
    raise ParameterError(f"unknown granularity {granularity!r}")


def parse_timestamps(raw: pd.Series, fmt: str | None) -> pd.Series:
    parsed = pd.to_datetime(raw, format=fmt or "mixed", errors="coerce", utc=True)
    return parsed.dt.tz_localize(None)


def read_series(path, schema: IngestSchema) -> tuple[list[AttributeSeries], IngestReport]:
    """Load one file and aggregate it per the schema.

    Rows with an unparseable timestamp or a non-numeric value in any summed or
    averaged column are dropped and counted in the returned report.
    """
    path = Path(path)
    if not path.exists():
        raise IngestError(f"no such file: {path}")
    frame = pd.read_csv(path, sep=schema.delimiter, dtype=str, keep_default_na=False)
    report = IngestReport(file=str(path), rows_read=len(frame))

    needed = {schema.timestamp_column} | {a.column for a in schema.attributes if a.column}
    missing = sorted(needed - set(frame.columns))
    if missing:
        raise IngestError(f"{path}: missing columns {missing}")

    ts = parse_timestamps(frame[schema.timestamp_column], schema.timestamp_format)
    ok = ts.notna()
    numeric = {}
    for spec in schema.attributes:
        if spec.aggregator == "count" or spec.column in numeric:
            continue
        col = pd.to_numeric(frame[spec.column].str.strip(), errors="coerce")
        numeric[spec.column] = col
        ok &= col.notna() & np.isfinite(col)
    report.rows_rejected = int((~ok).sum())

    buckets = truncate(ts[ok], schema.granularity)
    dataset = schema.dataset or path.stem
    out = []
    for spec in schema.attributes:
        if spec.aggregator == "count":
            agg = buckets.groupby(buckets).size().astype(np.float64)
        else:
            col = numeric[spec.column][ok]
            agg = col.groupby(buckets).agg(spec.aggregator)
        agg = agg.sort_index()
        series = AttributeSeries(
            id=f"{dataset}.{spec.name}",
            timestamps=agg.index.values.astype("datetime64[ns]"),
            values=agg.to_numpy(dtype=np.float64),
        )
        out.append(series)
        report.attributes.append(
            {
                "id": series.id,
                "n_points": len(series),
                "t_min": str(series.timestamps[0]) if len(series) else None,
                "t_max": str(series.timestamps[-1]) if len(series) else None,
            }
        )
    if not any(len(s) for s in out):
        raise IngestError(f"{path}: no valid rows after parsing ({report.rows_rejected} rejected)")
    return out, report


def load_series(path, schema: IngestSchema) -> list[AttributeSeries]:
    return read_series(path, schema)[0]


def aggregate(series: AttributeSeries, granularity: str, aggregator: str = "mean") -> AttributeSeries:
    """Re-aggregate an existing series to a (coarser or equal) granularity."""
    if aggregator not in AGGREGATORS:
        raise ParameterError(f"aggregator must be one of {AGGREGATORS}")
    ts = truncate(pd.Series(series.timestamps), granularity)
    vals = pd.Series(series.values)
    if aggregator == "count":
        agg = vals.groupby(ts.values).size().astype(np.float64)
    else:
        agg = vals.groupby(ts.values).agg(aggregator)
    return AttributeSeries(series.id, agg.index.values, agg.to_numpy(dtype=np.float64))


def join_arrays(ts_a, scores_a, ts_b, scores_b):
    """Inner join two timestamp-sorted score arrays; returns (ts, a, b)."""
    common, ia, ib = np.intersect1d(ts_a, ts_b, assume_unique=True, return_indices=True)
    return common, scores_a[ia], scores_b[ib]


def inner_join_timestamps(a, b):
    """Aligned ``(timestamp, score_a, score_b)`` triples of two representations."""
    ts, sa, sb = join_arrays(a.timestamps, a.scores, b.timestamps, b.scores)
    return list(zip(ts, sa.tolist(), sb.tolist()))

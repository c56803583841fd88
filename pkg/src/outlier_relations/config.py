"""YAML configuration: ingest schemas, discovery parameters, exclusion policy, outputs, seed.

Layout::

    ingest:
      - path: weather.csv            # relative to the config file
        dataset: weather             # optional, defaults to the file stem
        timestamp_column: date
        timestamp_format: null       # strftime pattern, or null to infer
        granularity: day             # hour | day | week
        delimiter: ","
        attributes:
          - {name: rain, column: prcp, aggregator: mean}   # sum | mean | count
    params:                          # every key optional
      alpha: 0.5
      beta: 0.67
      r2_min: 0.25
      lambda: 0.5
      theta_pos: 3.0
      theta_neg: -3.0
      phi_list: [28, 30, 64, 90, 128, 180, 256, 360, 365]
      significance: 0.05
      rho_level: 95
      bootstrap_B: 1000
      min_aligned: 10
      gap_decay: false
      ddof: 0
      percentile_method: linear
      n_jobs: 1
      thresholds: {weather.rain: {theta_pos: 2.5, theta_neg: -.inf}}
    exclusion: same-attribute        # or none
    seed: 0
    output: {dir: out}
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .errors import ConfigError, ParameterError
from .ingest import AttributeSpec, IngestSchema
from .params import PodsParams

TOP_KEYS = {"ingest", "params", "exclusion", "seed", "output"}
INGEST_KEYS = {"path", "dataset", "timestamp_column", "timestamp_format", "granularity", "delimiter", "attributes"}
ATTRIBUTE_KEYS = {"name", "column", "aggregator"}
OUTPUT_KEYS = {"dir"}
# YAML name -> PodsParams field; seed and exclusion live at the top level
PARAM_KEYS = {
    "alpha": "alpha",
    "beta": "beta",
    "r2_min": "r2_min",
    "lambda": "lam",
    "theta_pos": "theta_pos",
    "theta_neg": "theta_neg",
    "phi_list": "phi_list",
    "significance": "significance",
    "rho_level": "rho_level",
    "bootstrap_B": "bootstrap_B",
    "min_aligned": "min_aligned",
    "gap_decay": "gap_decay",
    "ddof": "ddof",
    "percentile_method": "percentile_method",
    "n_jobs": "n_jobs",
    "thresholds": "threshold_overrides",
}


@dataclass(frozen=True)
class IngestEntry:
    path: str
    schema: IngestSchema


@dataclass(frozen=True)
class Config:
    ingest: tuple[IngestEntry, ...] = ()
    params: PodsParams = PodsParams()
    output: dict = field(default_factory=dict)
    base_dir: str = "."

    @property
    def seed(self) -> int:
        return self.params.seed

    @property
    def exclusion(self) -> str:
        return self.params.exclusion

    def resolve(self, path) -> Path:
        p = Path(path)
        return p if p.is_absolute() else Path(self.base_dir) / p

    def __eq__(self, other):
        if not isinstance(other, Config):
            return NotImplemented
        return (self.ingest, self.params, self.output) == (other.ingest, other.params, other.output)


def _reject_unknown(where, mapping, allowed):
    if not isinstance(mapping, dict):
        raise ConfigError(f"{where}: expected a mapping, got {type(mapping).__name__}")
    unknown = sorted(set(mapping) - allowed)
    if unknown:
        raise ConfigError(f"{where}: unknown keys {unknown}")


def _schema(i, entry) -> IngestEntry:
    where = f"ingest[{i}]"
    _reject_unknown(where, entry, INGEST_KEYS)
    for key in ("path", "timestamp_column", "attributes"):
        if key not in entry:
            raise ConfigError(f"{where}: missing required key {key!r}")
    attrs = []
    for j, a in enumerate(entry["attributes"] or []):
        _reject_unknown(f"{where}.attributes[{j}]", a, ATTRIBUTE_KEYS)
        if "name" not in a:
            raise ConfigError(f"{where}.attributes[{j}]: missing 'name'")
        try:
            attrs.append(AttributeSpec(str(a["name"]), a.get("column"), a.get("aggregator", "sum")))
        except ParameterError as exc:
            raise ConfigError(f"{where}.attributes[{j}]: {exc}") from None
    try:
        schema = IngestSchema(
            timestamp_column=str(entry["timestamp_column"]),
            attributes=tuple(attrs),
            timestamp_format=entry.get("timestamp_format"),
            granularity=entry.get("granularity", "day"),
            delimiter=entry.get("delimiter", ","),
            dataset=entry.get("dataset"),
        )
    except ParameterError as exc:
        raise ConfigError(f"{where}: {exc}") from None
    return IngestEntry(str(entry["path"]), schema)


def config_from_dict(raw: dict, base_dir=".") -> Config:
    raw = raw or {}
    _reject_unknown("config", raw, TOP_KEYS)
    entries = tuple(_schema(i, e) for i, e in enumerate(raw.get("ingest") or []))
    praw = raw.get("params") or {}
    _reject_unknown("params", praw, set(PARAM_KEYS))
    kwargs = {PARAM_KEYS[k]: v for k, v in praw.items()}
    if "phi_list" in kwargs and not isinstance(kwargs["phi_list"], (list, tuple)):
        raise ConfigError("params.phi_list: expected a list of integers")
    kwargs["seed"] = int(raw.get("seed", 0))
    kwargs["exclusion"] = raw.get("exclusion", "same-attribute")
    try:
        params = PodsParams(**kwargs)
    except (ParameterError, TypeError, ValueError) as exc:
        raise ConfigError(f"params: {exc}") from None
    output = raw.get("output") or {}
    _reject_unknown("output", output, OUTPUT_KEYS)
    return Config(entries, params, dict(output), str(base_dir))


def load_config(path) -> Config:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML: {exc}") from None
    return config_from_dict(raw, base_dir=path.parent)


def config_to_dict(config: Config) -> dict:
    ingest = []
    for e in config.ingest:
        s = e.schema
        ingest.append(
            {
                "path": e.path,
                "dataset": s.dataset,
                "timestamp_column": s.timestamp_column,
                "timestamp_format": s.timestamp_format,
                "granularity": s.granularity,
                "delimiter": s.delimiter,
                "attributes": [{"name": a.name, "column": a.column, "aggregator": a.aggregator} for a in s.attributes],
            }
        )
    pdict = config.params.to_dict()
    params = {yaml_key: pdict[attr] for yaml_key, attr in PARAM_KEYS.items()}
    return {
        "ingest": ingest,
        "params": params,
        "exclusion": config.params.exclusion,
        "seed": config.params.seed,
        "output": dict(config.output),
    }


def dump_config(config: Config) -> str:
    return yaml.safe_dump(config_to_dict(config), sort_keys=False)

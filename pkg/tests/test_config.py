import math

import pytest
import yaml
from hypothesis import given, settings
from hypothesis import strategies as st

from outlier_relations.config import config_from_dict, config_to_dict, dump_config, load_config
from outlier_relations.errors import ConfigError, ParameterError
from outlier_relations.params import DEFAULT_PHI, PodsParams
from outlier_relations.scoring import Thresholds

MINIMAL = {
    "ingest": [
        {"path": "data.csv", "timestamp_column": "t", "attributes": [{"name": "v", "column": "v", "aggregator": "mean"}]}
    ]
}


def write_cfg(tmp_path, raw):
    p = tmp_path / "cfg.yaml"
    p.write_text(yaml.safe_dump(raw))
    return p


def test_minimal_config_defaults(tmp_path):
    cfg = load_config(write_cfg(tmp_path, MINIMAL))
    p = cfg.params
    assert (p.alpha, p.beta, p.r2_min, p.lam, p.theta_pos, p.theta_neg) == (0.5, 0.67, 0.25, 0.5, 3.0, -3.0)
    assert p.phi_list == DEFAULT_PHI == (28, 30, 64, 90, 128, 180, 256, 360, 365)
    assert (p.significance, p.rho_level, p.bootstrap_B, p.min_aligned) == (0.05, 95.0, 1000, 10)
    assert cfg.seed == 0 and cfg.exclusion == "same-attribute"
    assert cfg.ingest[0].schema.granularity == "day"
    assert cfg.resolve("data.csv") == tmp_path / "data.csv"


@pytest.mark.parametrize(
    "key,value,needle",
    [("alpha", 0, "(0, 1]"), ("alpha", 1.2, "(0, 1]"), ("beta", 0.4, "[0.5, 1]"), ("lambda", 1.5, "[0, 1]"),
     ("significance", 1.0, "(0, 1)"), ("bootstrap_B", 50, ">= 200"), ("min_aligned", 2, ">= 3")],
)
def test_range_violations_name_field(tmp_path, key, value, needle):
    raw = dict(MINIMAL, params={key: value})
    with pytest.raises(ConfigError) as err:
        load_config(write_cfg(tmp_path, raw))
    field = "lam" if key == "lambda" else key
    assert field in str(err.value) and needle in str(err.value)


@pytest.mark.parametrize(
    "raw",
    [
        dict(MINIMAL, extra=1),
        dict(MINIMAL, params={"alpah": 0.5}),
        dict(MINIMAL, output={"dir": "x", "fmt": "y"}),
        {"ingest": [dict(MINIMAL["ingest"][0], sep=";")]},
        {"ingest": [dict(MINIMAL["ingest"][0], attributes=[{"name": "v", "col": "v"}])]},
    ],
)
def test_unknown_keys_rejected(raw):
    with pytest.raises(ConfigError, match="unknown keys"):
        config_from_dict(raw)


def test_missing_file_and_bad_yaml(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.yaml")
    bad = tmp_path / "bad.yaml"
    bad.write_text("ingest: [unclosed")
    with pytest.raises(ConfigError):
        load_config(bad)


def test_threshold_overrides():
    cfg = config_from_dict({"params": {"thresholds": {"d.rain": {"theta_pos": 2.5, "theta_neg": -math.inf}}}})
    assert cfg.params.thresholds_for("d.rain") == Thresholds(2.5, -math.inf)
    assert cfg.params.thresholds_for("d.other") == Thresholds()
    with pytest.raises(ConfigError):
        config_from_dict({"params": {"thresholds": {"d.rain": {"theta_pos": -1}}}})


def test_round_trip(tmp_path):
    raw = dict(
        MINIMAL,
        params={"alpha": 0.7, "phi_list": [7, 14], "gap_decay": True, "thresholds": {"x.v": {"theta_pos": 2.0, "theta_neg": -2.5}}},
        seed=42,
        exclusion="none",
        output={"dir": "out"},
    )
    cfg = load_config(write_cfg(tmp_path, raw))
    again = tmp_path / "again.yaml"
    again.write_text(dump_config(cfg))
    assert load_config(again) == cfg


@settings(max_examples=40, deadline=None)
@given(
    st.floats(0.01, 1.0),
    st.floats(0.5, 1.0),
    st.floats(-1.0, 1.0),
    st.floats(0.0, 1.0),
    st.integers(0, 10**6),
    st.lists(st.integers(2, 400), min_size=1, max_size=5, unique=True),
)
def test_round_trip_property(alpha, beta, r2, lam, seed, phis):
    raw = dict(MINIMAL, params={"alpha": alpha, "beta": beta, "r2_min": r2, "lambda": lam, "phi_list": phis}, seed=seed)
    cfg = config_from_dict(raw)
    assert config_from_dict(yaml.safe_load(dump_config(cfg))) == cfg
    assert config_from_dict(config_to_dict(cfg)) == cfg


def test_params_with_and_validation():
    p = PodsParams()
    assert p.with_(beta=0.9).beta == 0.9 and p.beta == 0.67
    with pytest.raises(ParameterError):
        PodsParams(theta_pos=-1.0)
    with pytest.raises(ParameterError):
        PodsParams(phi_list=(1,))
    with pytest.raises(ParameterError):
        PodsParams(exclusion="sometimes")
    assert PodsParams().to_dict()["phi_list"] == list(DEFAULT_PHI)

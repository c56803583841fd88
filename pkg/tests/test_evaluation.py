import pytest

from outlier_relations.errors import DataError
from outlier_relations.evaluation import SENSITIVITY_GRIDS, evaluate, read_labels, sensitivity
from outlier_relations.params import PodsParams
from outlier_relations.pipeline import DiscoveryRecord
from outlier_relations.synthetic import labeled_corpus


def rec(a, b, meaningful):
    return DiscoveryRecord(a, b, meaningful=meaningful, trend_found=meaningful)


def test_definitional_example():
    records = [rec("a", "b", True), rec("c", "d", True), rec("e", "f", True), rec("g", "h", False)]
    labels = {("a", "b"): "positive", ("c", "d"): "positive", ("e", "f"): "negative", ("g", "h"): "positive"}
    m = evaluate(records, labels)
    assert m["precision"] == pytest.approx(2 / 3)
    assert m["recall"] == pytest.approx(2 / 3)
    assert m["f_measure"] == pytest.approx(2 / 3)
    assert (m["tp"], m["fp"], m["fn"], m["tn"]) == (2, 1, 1, 0)


def test_perfect_and_empty_denominators():
    records = [rec("a", "b", True), rec("c", "d", False)]
    m = evaluate(records, {("b", "a"): "positive", ("c", "d"): "negative"})
    assert m["precision"] == m["recall"] == m["f_measure"] == 1.0
    m = evaluate([rec("a", "b", False)], {("a", "b"): "negative"})
    assert m["precision"] == 1.0 and m["recall"] == 1.0


def test_unknown_pair():
    with pytest.raises(DataError):
        evaluate([rec("a", "b", True)], {("a", "z"): "positive"})
    # a pruned pair of known representations counts as not meaningful
    m = evaluate([rec("a", "b", True)], {("a", "z"): "positive"}, known_ids={"a", "b", "z"})
    assert m["fn"] == 1


def test_read_labels(tmp_path):
    p = tmp_path / "labels.csv"
    p.write_text("pair_a,pair_b,label\nx,y,positive\n# comment\nb,a,Negative\n")
    assert read_labels(p) == {("x", "y"): "positive", ("a", "b"): "negative"}
    p.write_text("x,y,maybe\n")
    with pytest.raises(DataError):
        read_labels(p)


def test_sensitivity_rows_small_grid():
    reps, labels = labeled_corpus(seed=0, n_pos=4, n_neg=4)
    grids = {"beta": [0.5, 1.0], "lam": [0.0, 0.5]}
    rows = sensitivity(reps, labels, PodsParams(), grids)
    assert [(r["param"], r["value"]) for r in rows] == [("beta", 0.5), ("beta", 1.0), ("lam", 0.0), ("lam", 0.5)]
    assert all(0 <= r["f_measure"] <= 1 for r in rows)


def test_grids_cover_defaults():
    defaults = PodsParams()
    for name, values in SENSITIVITY_GRIDS.items():
        assert getattr(defaults, name) in values

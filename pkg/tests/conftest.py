import numpy as np
import pytest

from outlier_relations.ingest import AttributeSeries
from outlier_relations.scoring import Representation, Thresholds

# lines appended by the acceptance suite, echoed in the terminal summary
CRITERIA: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in CRITERIA:
            terminalreporter.write_line(line)


def day_stamps(n, start="2020-01-01"):
    return np.datetime64(start, "D") + np.arange(n)


def make_rep(attr_id, scores, kind="dominant", timestamps=None, thresholds=Thresholds(), phi=None):
    scores = np.asarray(scores, dtype=float)
    ts = day_stamps(len(scores)) if timestamps is None else np.asarray(timestamps)
    return Representation(attr_id, kind, ts, scores, thresholds, phi=phi)


def make_series(name, values, start="2020-01-01"):
    return AttributeSeries(name, day_stamps(len(values), start).astype("datetime64[ns]"), values)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)

"""Discover meaningful relationships between aligned outliers of temporal attributes."""

from .errors import (
    ConfigError,
    DataError,
    DegenerateFitError,
    EmptyRepresentationError,
    IngestError,
    ParameterError,
    SampleTooSmallError,
)
from .evaluation import evaluate, read_labels, sensitivity
from .index import AlignmentIndex, CandidatePair, build_index, candidate_pairs, pruning_report
from .ingest import AttributeSeries, AttributeSpec, IngestSchema, inner_join_timestamps, load_series
from .meaningfulness import (
    ConsistencyReport,
    bootstrap_percentile,
    consistency_check,
    goodness_of_fit_check,
    verify_meaningfulness,
)
from .params import PodsParams
from .pipeline import DiscoveryRecord, discover, run_discovery, timing_report
from .scoring import Representation, Thresholds, classify, cumulative_scores, dominant_scores, mean_residuals
from .trend import AlignedSample, TrendModel, align, detect_data_trend, fit_wls, omega, slope_test

__version__ = "0.1.0"

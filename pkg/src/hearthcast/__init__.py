"""hearthcast: household yearly electricity consumption (CAR) forecasting.

Estimates a household's yearly reference consumption from housing
attributes available at subscription time, with an explainable
level-uniform regression tree alongside classic baselines, an
outlier-aware benchmark harness, a CLI and an HTTP serving endpoint.
"""

from .audit import MonotonicityReport, ProbeGrid, audit_monotonicity, default_probe_grid
from .bench import BenchmarkReport, BenchmarkSpec, emit_report, run_benchmark
from .data import (
    Dataset,
    FeatureCodec,
    HouseholdRecord,
    LabeledExample,
    LowConsumptionRule,
    OutlierPolicy,
    annualize_car,
    encode,
    feature_schema,
    ingest_csv,
    partition_outliers,
    split_train_test,
)
from .metrics import (
    DistributionSummary,
    GapViews,
    MetricsReport,
    PriceConfig,
    compute_metrics,
    distribution_summary,
    gap_views,
    rmsd_delta,
)
from .models import (
    BoostConfig,
    BoostedModel,
    CartConfig,
    CartModel,
    ConstrainedTreeConfig,
    ConstrainedTreeModel,
    ExplanationTrace,
    ForecastModel,
    ForestConfig,
    ForestModel,
    LegacyModel,
    LegacyTable,
    LinearModel,
    feature_importance,
    load_model,
    save_model,
)
from .synth import GeneratorConfig, generate, generate_labeled, oracle_mean

__version__ = "0.1.0"

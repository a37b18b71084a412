"""Two-regime benchmark across the five model families.

Regime A trains on the full training split; regime B trains only on its
inliers (the outlier policy band); both regimes are evaluated on the same
untouched test split, outliers included. Reports carry per-model metrics,
the regime-B-vs-A RMSD delta, gap distribution summaries in kWh, relative
and euro views, and split-gain importance tables for the ensembles.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Sequence

from .data import (
    Dataset,
    FeatureCodec,
    LowConsumptionRule,
    DEFAULT_LOW_CONSUMPTION_RULE,
    OutlierPolicy,
    ingest_csv,
    partition_outliers,
    split_train_test,
)
from .errors import ConfigError, DataError
from .jsonio import dumps_canonical, write_json
from .metrics import (
    DistributionSummary,
    MetricsReport,
    PriceConfig,
    compute_metrics,
    distribution_summary,
    gaps_from,
    rmsd_delta,
)
from .models import (
    BoostConfig,
    BoostedModel,
    ConstrainedTreeConfig,
    ConstrainedTreeModel,
    ForestConfig,
    ForestModel,
    LegacyModel,
    LegacyTable,
    LinearModel,
    importance_table,
)
from .rng import derive_seed
from .synth import GeneratorConfig, generate

# Fixed presentation order for every table.
MODEL_ORDER = ("legacy", "gbm", "forest", "linear", "constrained")
DISPLAY_NAMES = {
    "legacy": "Legacy",
    "gbm": "Gradient Boosting",
    "forest": "Random Forest",
    "linear": "Linear Regression",
    "constrained": "New tree",
}
REGIMES = ("a", "b")  # a = trained with outliers, b = outlier-filtered training

# Benchmark-default ensemble sizes, chosen so a full two-regime run at
# n = 20,000 stays interactive; the model-level defaults remain larger.
DEFAULT_BENCH_FOREST = ForestConfig(n_trees=60, max_depth=12, min_leaf=10)
DEFAULT_BENCH_GBM = BoostConfig(n_stages=150, learning_rate=0.1, max_depth=3, min_leaf=10)


@dataclass(frozen=True)
class BenchmarkSpec:
    csv_path: str | None = None
    generator: GeneratorConfig | None = None
    seed: int = 0
    test_fraction: float = 1.0 / 3.0
    outlier_policy: OutlierPolicy = OutlierPolicy()
    price: PriceConfig = PriceConfig()
    rule: LowConsumptionRule = DEFAULT_LOW_CONSUMPTION_RULE
    legacy_table: LegacyTable | None = None
    forest: ForestConfig = DEFAULT_BENCH_FOREST
    gbm: BoostConfig = DEFAULT_BENCH_GBM
    linear_ridge_epsilon: float = 1e-8
    constrained: ConstrainedTreeConfig = ConstrainedTreeConfig()

    def __post_init__(self):
        if (self.csv_path is None) == (self.generator is None):
            raise ConfigError("spec needs exactly one of csv_path or generator")
        if not (0.0 < self.test_fraction < 1.0):
            raise ConfigError("test_fraction must be in (0, 1)")

    def to_dict(self) -> dict:
        return {
            "csv_path": self.csv_path,
            "generator": self.generator.to_dict() if self.generator else None,
            "seed": self.seed,
            "test_fraction": self.test_fraction,
            "outlier_policy": {"low_bound": self.outlier_policy.low_bound, "high_bound": self.outlier_policy.high_bound},
            "price": {"unit_price_eur_per_kwh": self.price.unit_price_eur_per_kwh},
            "rule": self.rule.to_jsonable(),
            "legacy_table": self.legacy_table.to_jsonable() if self.legacy_table else None,
            "forest": self.forest.to_dict(),
            "gbm": self.gbm.to_dict(),
            "linear_ridge_epsilon": self.linear_ridge_epsilon,
            "constrained": self.constrained.to_dict(),
        }

    @staticmethod
    def from_dict(d: dict) -> "BenchmarkSpec":
        return BenchmarkSpec(
            csv_path=d.get("csv_path"),
            generator=GeneratorConfig.from_dict(d["generator"]) if d.get("generator") else None,
            seed=int(d.get("seed", 0)),
            test_fraction=float(d.get("test_fraction", 1.0 / 3.0)),
            outlier_policy=OutlierPolicy(**d.get("outlier_policy", {})),
            price=PriceConfig(**d.get("price", {})),
            rule=LowConsumptionRule.from_jsonable(d["rule"]) if d.get("rule") else DEFAULT_LOW_CONSUMPTION_RULE,
            legacy_table=LegacyTable.from_jsonable(d["legacy_table"]) if d.get("legacy_table") else None,
            forest=ForestConfig.from_dict(d.get("forest", DEFAULT_BENCH_FOREST.to_dict())),
            gbm=BoostConfig.from_dict(d.get("gbm", DEFAULT_BENCH_GBM.to_dict())),
            linear_ridge_epsilon=float(d.get("linear_ridge_epsilon", 1e-8)),
            constrained=ConstrainedTreeConfig.from_dict(d.get("constrained", {})),
        )


@dataclass(frozen=True)
class RegimeResult:
    metrics: MetricsReport
    metrics_inlier_test: MetricsReport
    gap_summary: dict[str, DistributionSummary | None]

    def to_dict(self) -> dict:
        return {
            "metrics": self.metrics.to_dict(),
            "metrics_inlier_test": self.metrics_inlier_test.to_dict(),
            "gap_summary": {k: (v.to_dict() if v else None) for k, v in self.gap_summary.items()},
        }


@dataclass(frozen=True)
class ModelResult:
    model_id: str
    display_name: str
    config: dict
    regime_a: RegimeResult
    regime_b: RegimeResult
    rmsd_delta_pct: float
    importance: tuple[tuple[str, float], ...] | None

    def to_dict(self) -> dict:
        return {
            "model_id": self.model_id,
            "display_name": self.display_name,
            "config": self.config,
            "regimes": {"a": self.regime_a.to_dict(), "b": self.regime_b.to_dict()},
            "rmsd_delta_pct": self.rmsd_delta_pct,
            "importance": [list(row) for row in self.importance] if self.importance is not None else None,
        }


@dataclass(frozen=True)
class BenchmarkReport:
    spec: dict
    seed: int
    n_total: int
    n_train: int
    n_train_filtered: int
    n_test: int
    models: tuple[ModelResult, ...]

    def model(self, model_id: str) -> ModelResult:
        for m in self.models:
            if m.model_id == model_id:
                return m
        raise KeyError(model_id)

    def metrics_rows(self) -> list[dict]:
        """Flat {model, regime, n, msd, rmsd, mad, mae} rows, table order."""
        rows = []
        for model in self.models:
            for regime in REGIMES:
                metrics = getattr(model, f"regime_{regime}").metrics
                rows.append(
                    {
                        "model": model.display_name,
                        "regime": regime,
                        "n": metrics.n,
                        "msd": metrics.msd,
                        "rmsd": metrics.rmsd,
                        "mad": metrics.mad,
                        "mae": metrics.mae,
                    }
                )
        return rows

    def to_dict(self) -> dict:
        return {
            "spec": self.spec,
            "seed": self.seed,
            "n_total": self.n_total,
            "n_train": self.n_train,
            "n_train_filtered": self.n_train_filtered,
            "n_test": self.n_test,
            "models": [m.to_dict() for m in self.models],
            "metrics_rows": self.metrics_rows(),
        }

    @staticmethod
    def from_dict(d: dict) -> "BenchmarkReport":
        models = []
        for m in d["models"]:
            models.append(
                ModelResult(
                    model_id=m["model_id"],
                    display_name=m["display_name"],
                    config=m["config"],
                    regime_a=_regime_from_dict(m["regimes"]["a"]),
                    regime_b=_regime_from_dict(m["regimes"]["b"]),
                    rmsd_delta_pct=float(m["rmsd_delta_pct"]),
                    importance=tuple((row[0], float(row[1])) for row in m["importance"])
                    if m.get("importance") is not None
                    else None,
                )
            )
        return BenchmarkReport(
            spec=d["spec"],
            seed=int(d["seed"]),
            n_total=int(d["n_total"]),
            n_train=int(d["n_train"]),
            n_train_filtered=int(d["n_train_filtered"]),
            n_test=int(d["n_test"]),
            models=tuple(models),
        )


def _regime_from_dict(d: dict) -> RegimeResult:
    def metrics(m) -> MetricsReport:
        return MetricsReport(msd=float(m["msd"]), rmsd=float(m["rmsd"]), mad=float(m["mad"]), mae=float(m["mae"]), n=int(m["n"]))

    def summary(s) -> DistributionSummary | None:
        if s is None:
            return None
        return DistributionSummary(
            n=int(s["n"]), minimum=float(s["min"]), q1=float(s["q1"]), median=float(s["median"]),
            q3=float(s["q3"]), maximum=float(s["max"]), deciles=tuple(float(x) for x in s["deciles"]),
        )

    return RegimeResult(
        metrics=metrics(d["metrics"]),
        metrics_inlier_test=metrics(d["metrics_inlier_test"]),
        gap_summary={k: summary(v) for k, v in d["gap_summary"].items()},
    )


def _make_model(spec: BenchmarkSpec, codec: FeatureCodec, model_id: str):
    if model_id == "legacy":
        return LegacyModel(table=spec.legacy_table)
    if model_id == "gbm":
        cfg = BoostConfig.from_dict({**spec.gbm.to_dict(), "seed": derive_seed(spec.seed, 11)})
        return BoostedModel(config=cfg, codec=codec)
    if model_id == "forest":
        cfg = ForestConfig.from_dict({**spec.forest.to_dict(), "seed": derive_seed(spec.seed, 12)})
        return ForestModel(config=cfg, codec=codec)
    if model_id == "linear":
        return LinearModel(ridge_epsilon=spec.linear_ridge_epsilon, codec=codec)
    if model_id == "constrained":
        return ConstrainedTreeModel(config=spec.constrained, codec=codec)
    raise ConfigError(f"unknown model id {model_id!r}")


def _config_echo(spec: BenchmarkSpec, model) -> dict:
    if hasattr(model, "config"):
        return model.config.to_dict()
    if isinstance(model, LinearModel):
        return {"ridge_epsilon": spec.linear_ridge_epsilon}
    return {"table_bands": len(model.table.bands)}


def load_benchmark_data(spec: BenchmarkSpec) -> Dataset:
    if spec.csv_path is not None:
        result = ingest_csv(spec.csv_path)
        if len(result.dataset) == 0:
            raise DataError(f"{spec.csv_path}: no usable rows")
        return result.dataset
    return generate(spec.generator)


def _evaluate(predictions: Sequence[float], test: Dataset, inlier_mask: Sequence[bool], price: PriceConfig) -> RegimeResult:
    targets = [ex.car_kwh for ex in test]
    gaps = gaps_from(targets, predictions)
    inlier_gaps = [g for g, keep in zip(gaps, inlier_mask) if keep]
    if not inlier_gaps:
        raise DataError("test split has no inliers to evaluate")
    gap_summary: dict[str, DistributionSummary | None] = {
        "absolute_kwh": distribution_summary(gaps),
        "monetary_eur": distribution_summary([g * price.unit_price_eur_per_kwh for g in gaps]),
    }
    if all(t > 0 for t in targets):
        gap_summary["relative"] = distribution_summary([g / t for g, t in zip(gaps, targets)])
    else:
        gap_summary["relative"] = None  # undefined with zero-consumption targets
    return RegimeResult(
        metrics=compute_metrics(gaps),
        metrics_inlier_test=compute_metrics(inlier_gaps),
        gap_summary=gap_summary,
    )


def run_benchmark(spec: BenchmarkSpec) -> BenchmarkReport:
    """Train all five families in both regimes and score the shared test set."""
    data = load_benchmark_data(spec)
    train, test = split_train_test(data, spec.test_fraction, spec.seed)
    if len(train) == 0 or len(test) == 0:
        raise DataError("train/test split produced an empty side")
    train_inliers, _train_outliers = partition_outliers(train, spec.outlier_policy)
    if len(train_inliers) == 0:
        raise DataError("training split is empty after outlier filtering")
    inlier_mask = [spec.outlier_policy.is_inlier(ex.car_kwh) for ex in test]

    codec = FeatureCodec(rule=spec.rule)
    results = []
    for model_id in MODEL_ORDER:
        per_regime = {}
        fitted_b = None
        for regime, train_set in (("a", train), ("b", train_inliers)):
            model = _make_model(spec, codec, model_id)
            model.fit(train_set)
            predictions = model.predict_dataset(test)
            per_regime[regime] = _evaluate(predictions, test, inlier_mask, spec.price)
            if regime == "b":
                fitted_b = model
        importance = None
        if model_id in ("gbm", "forest"):
            importance = tuple(importance_table(fitted_b))
        results.append(
            ModelResult(
                model_id=model_id,
                display_name=DISPLAY_NAMES[model_id],
                config=_config_echo(spec, fitted_b),
                regime_a=per_regime["a"],
                regime_b=per_regime["b"],
                rmsd_delta_pct=rmsd_delta(per_regime["b"].metrics.rmsd, per_regime["a"].metrics.rmsd),
                importance=importance,
            )
        )
    return BenchmarkReport(
        spec=spec.to_dict(),
        seed=spec.seed,
        n_total=len(data),
        n_train=len(train),
        n_train_filtered=len(train_inliers),
        n_test=len(test),
        models=tuple(results),
    )


# ---------------------------------------------------------------------------
# Emission


def emit_report(report: BenchmarkReport, format: str, path: str) -> list[str]:
    """Write the report as JSON, CSV tables, or both ('bundle').

    path is a directory; it is created if missing. Returns written paths.
    """
    if not path:
        raise DataError("output path must not be empty")
    if format not in ("json", "csv", "bundle"):
        raise ConfigError("format must be 'json', 'csv' or 'bundle'")
    os.makedirs(path, exist_ok=True)
    written: list[str] = []
    if format in ("json", "bundle"):
        target = os.path.join(path, "report.json")
        write_json(target, report.to_dict())
        written.append(target)
    if format in ("csv", "bundle"):
        written.extend(_emit_csv_tables(report, path))
    return written


def _fmt(x: float) -> str:
    return repr(float(x))


def _emit_csv_tables(report: BenchmarkReport, outdir: str) -> list[str]:
    written = []
    for regime in REGIMES:
        target = os.path.join(outdir, f"metrics_regime_{regime}.csv")
        with open(target, "w", newline="", encoding="utf-8") as fh:
            header = ["metric"] + [DISPLAY_NAMES[m] for m in MODEL_ORDER]
            fh.write(",".join(header) + "\n")
            rows = [("MSD", "msd"), ("RMSD", "rmsd"), ("MAD", "mad"), ("MAE", "mae")]
            for label, attr in rows:
                values = [
                    _fmt(getattr(getattr(report.model(m), f"regime_{regime}").metrics, attr))
                    for m in MODEL_ORDER
                ]
                fh.write(",".join([label] + values) + "\n")
            if regime == "b":
                deltas = [_fmt(report.model(m).rmsd_delta_pct) for m in MODEL_ORDER]
                fh.write(",".join(["RMSD difference"] + deltas) + "\n")
        written.append(target)

    for model in report.models:
        for regime in REGIMES:
            target = os.path.join(outdir, f"gaps_{model.model_id}_{regime}.csv")
            result = getattr(model, f"regime_{regime}")
            with open(target, "w", newline="", encoding="utf-8") as fh:
                fh.write("view,n,min,q1,median,q3,max," + ",".join(f"d{i}0" for i in range(1, 10)) + "\n")
                for view in ("absolute_kwh", "relative", "monetary_eur"):
                    s = result.gap_summary.get(view)
                    if s is None:
                        continue
                    cells = [view, str(s.n)] + [
                        _fmt(v) for v in (s.minimum, s.q1, s.median, s.q3, s.maximum, *s.deciles)
                    ]
                    fh.write(",".join(cells) + "\n")
            written.append(target)

    for model in report.models:
        if model.importance is None:
            continue
        target = os.path.join(outdir, f"importance_{model.model_id}.csv")
        with open(target, "w", newline="", encoding="utf-8") as fh:
            fh.write("slot,weight\n")
            for name, weight in model.importance:
                fh.write(f"{name},{_fmt(weight)}\n")
        written.append(target)
    return written


def report_json(report: BenchmarkReport) -> str:
    return dumps_canonical(report.to_dict())

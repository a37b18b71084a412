"""Domain types, CSV ingestion, annualization, outlier handling and encoding.

The regression target throughout is the CAR (consommation annuelle de
reference): the household's yearly reference electricity consumption in kWh.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import ConfigError, DataError, InsufficientWindowError, SchemaError
from .rng import SplitMix64, derive_seed

SCHEMA_VERSION = "hearthcast-1"

# Closed category sets; codes are alphabetical positions within each set.
HEATING_TYPES = ("district", "electric", "fuel", "gas", "heat_pump", "other")
WATER_HEATING_TYPES = ("electric", "gas", "other", "thermodynamic")
COOKING_TYPES = ("electric", "gas", "mixed")
HOUSE_TYPES = ("apartment", "house")
TARIFF_INDEXES = ("base", "peak_offpeak")
MAX_POWER_KVA = (3, 6, 9, 12, 15, 18, 24, 30, 36)

CATEGORY_SETS: dict[str, tuple[str, ...]] = {
    "heating_type": HEATING_TYPES,
    "water_heating_type": WATER_HEATING_TYPES,
    "cooking_type": COOKING_TYPES,
    "house_type": HOUSE_TYPES,
    "tariff_index": TARIFF_INDEXES,
}

MIN_READING_DAYS = 70

CSV_COLUMNS = (
    "surface_m2",
    "heating_type",
    "water_heating_type",
    "cooking_type",
    "occupants",
    "house_type",
    "tariff_index",
    "max_power_kva",
    "reading_days",
    "observed_kwh",
    "car_kwh",
)


@dataclass(frozen=True)
class HouseholdRecord:
    """Housing and user attributes known at subscription time.

    reading_days describes the meter observation window used to derive the
    target; it is 0 for a brand-new subscriber and is not a model feature.
    """

    surface_m2: float
    heating_type: str
    water_heating_type: str
    cooking_type: str
    occupants: int
    house_type: str
    tariff_index: str
    max_power_kva: int
    reading_days: int = 0

    def __post_init__(self):
        if not (self.surface_m2 > 0 and math.isfinite(self.surface_m2)):
            raise DataError(f"surface_m2 must be positive, got {self.surface_m2}")
        if self.occupants < 1:
            raise DataError(f"occupants must be >= 1, got {self.occupants}")
        if self.max_power_kva not in MAX_POWER_KVA:
            raise DataError(
                f"max_power_kva must be one of {MAX_POWER_KVA}, got {self.max_power_kva}"
            )
        if self.reading_days < 0:
            raise DataError(f"reading_days must be >= 0, got {self.reading_days}")
        for field in CATEGORY_SETS:
            value = getattr(self, field)
            if value not in CATEGORY_SETS[field]:
                raise DataError(f"unknown category {value!r} for {field}")


@dataclass(frozen=True)
class LabeledExample:
    record: HouseholdRecord
    car_kwh: float

    def __post_init__(self):
        if not (math.isfinite(self.car_kwh) and self.car_kwh >= 0):
            raise DataError(f"car_kwh must be finite and >= 0, got {self.car_kwh}")


@dataclass(frozen=True)
class Dataset:
    """Ordered, immutable collection of labeled examples.

    Iteration order is stable and equals ingestion order.
    """

    examples: tuple[LabeledExample, ...]
    schema_version: str = SCHEMA_VERSION

    def __len__(self) -> int:
        return len(self.examples)

    def __iter__(self):
        return iter(self.examples)

    def __getitem__(self, i: int) -> LabeledExample:
        return self.examples[i]

    def targets(self) -> np.ndarray:
        return np.array([ex.car_kwh for ex in self.examples], dtype=float)

    @staticmethod
    def from_pairs(pairs: Iterable[tuple[HouseholdRecord, float]]) -> "Dataset":
        return Dataset(tuple(LabeledExample(r, t) for r, t in pairs))


@dataclass(frozen=True)
class OutlierPolicy:
    """Inclusive inlier band for the yearly target, in kWh."""

    low_bound: float = 1000.0
    high_bound: float = 10000.0

    def __post_init__(self):
        if not (0 <= self.low_bound < self.high_bound):
            raise ConfigError("outlier bounds must satisfy 0 <= low < high")

    def is_inlier(self, car_kwh: float) -> bool:
        return self.low_bound <= car_kwh <= self.high_bound


class Rejection(NamedTuple):
    """One rejected CSV row. row_number is 1-based over data rows."""

    row_number: int
    reason: str


class IngestResult(NamedTuple):
    dataset: Dataset
    rejections: list[Rejection]


# ---------------------------------------------------------------------------
# Low-consumption profile rule


_COMPARATORS = {
    "==": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    "<=": lambda a, b: a <= b,
    "<": lambda a, b: a < b,
    ">=": lambda a, b: a >= b,
    ">": lambda a, b: a > b,
    "in": lambda a, b: a in b,
    "not_in": lambda a, b: a not in b,
}

_RECORD_FIELDS = (
    "surface_m2",
    "heating_type",
    "water_heating_type",
    "cooking_type",
    "occupants",
    "house_type",
    "tariff_index",
    "max_power_kva",
    "reading_days",
)


@dataclass(frozen=True)
class LowConsumptionRule:
    """Conjunction of (field, comparator, value) clauses over a record.

    The shipped default profiles a small non-electrically-heated household;
    it is configuration, not a law of nature, and can be replaced wholesale.
    """

    clauses: tuple[tuple[str, str, object], ...]

    def __post_init__(self):
        for field, op, _value in self.clauses:
            if field not in _RECORD_FIELDS:
                raise ConfigError(f"unknown record field {field!r} in rule clause")
            if op not in _COMPARATORS:
                raise ConfigError(f"unknown comparator {op!r} in rule clause")

    def matches(self, record: HouseholdRecord) -> bool:
        return all(
            _COMPARATORS[op](getattr(record, field), value)
            for field, op, value in self.clauses
        )

    def to_jsonable(self) -> list:
        return [[f, op, list(v) if isinstance(v, tuple) else v] for f, op, v in self.clauses]

    @staticmethod
    def from_jsonable(data: Sequence) -> "LowConsumptionRule":
        clauses = []
        for item in data:
            if len(item) != 3:
                raise ConfigError(f"rule clause must be [field, op, value], got {item!r}")
            field, op, value = item
            if isinstance(value, list):
                value = tuple(value)
            clauses.append((field, op, value))
        return LowConsumptionRule(tuple(clauses))


DEFAULT_LOW_CONSUMPTION_RULE = LowConsumptionRule(
    (
        ("heating_type", "!=", "electric"),
        ("water_heating_type", "!=", "electric"),
        ("occupants", "<=", 2),
        ("surface_m2", "<=", 50.0),
    )
)


# ---------------------------------------------------------------------------
# Feature encoding

FEATURE_SLOTS = (
    "surface_m2",
    "heating_type",
    "water_heating_type",
    "cooking_type",
    "occupants",
    "house_type",
    "tariff_index",
    "max_power_kva",
    "low_consumption",
)

# Per slot: 0 for numeric, otherwise the number of category codes.
SLOT_CATEGORY_SIZES = tuple(
    len(CATEGORY_SETS[name]) if name in CATEGORY_SETS else 0 for name in FEATURE_SLOTS
)

SURFACE_SLOT = FEATURE_SLOTS.index("surface_m2")


def feature_schema() -> dict:
    """Published slot/code schema, served by the API and echoed in reports."""
    return {
        "schema_version": SCHEMA_VERSION,
        "slots": list(FEATURE_SLOTS),
        "category_codes": {
            name: {value: code for code, value in enumerate(values)}
            for name, values in CATEGORY_SETS.items()
        },
        "max_power_kva_values": list(MAX_POWER_KVA),
    }


@dataclass(frozen=True)
class FeatureCodec:
    """Deterministic record -> dense vector encoder.

    Categorical slots carry small-integer codes (alphabetical within each
    closed set); the derived low_consumption slot evaluates the rule as 0/1.
    """

    rule: LowConsumptionRule = DEFAULT_LOW_CONSUMPTION_RULE

    @property
    def slots(self) -> tuple[str, ...]:
        return FEATURE_SLOTS

    @property
    def category_sizes(self) -> tuple[int, ...]:
        return SLOT_CATEGORY_SIZES

    def encode(self, record: HouseholdRecord) -> np.ndarray:
        return np.array(
            [
                float(record.surface_m2),
                float(HEATING_TYPES.index(record.heating_type)),
                float(WATER_HEATING_TYPES.index(record.water_heating_type)),
                float(COOKING_TYPES.index(record.cooking_type)),
                float(record.occupants),
                float(HOUSE_TYPES.index(record.house_type)),
                float(TARIFF_INDEXES.index(record.tariff_index)),
                float(record.max_power_kva),
                1.0 if self.rule.matches(record) else 0.0,
            ],
            dtype=float,
        )

    def encode_dataset(self, ds: Dataset) -> tuple[np.ndarray, np.ndarray]:
        if len(ds) == 0:
            return np.zeros((0, len(FEATURE_SLOTS))), np.zeros(0)
        X = np.stack([self.encode(ex.record) for ex in ds])
        y = ds.targets()
        return X, y

    def decode_category(self, slot: int, code: int) -> str:
        name = FEATURE_SLOTS[slot]
        return CATEGORY_SETS[name][code]

    def to_jsonable(self) -> dict:
        return {"schema_version": SCHEMA_VERSION, "rule": self.rule.to_jsonable()}

    @staticmethod
    def from_jsonable(data: dict) -> "FeatureCodec":
        return FeatureCodec(rule=LowConsumptionRule.from_jsonable(data["rule"]))


def encode(record: HouseholdRecord, rule: LowConsumptionRule = DEFAULT_LOW_CONSUMPTION_RULE) -> np.ndarray:
    """Encode one record under the published slot schema."""
    return FeatureCodec(rule=rule).encode(record)


# ---------------------------------------------------------------------------
# Operations


def annualize_car(observed_kwh: float, reading_days: int) -> float:
    """Scale an observed consumption window to a yearly value.

    Plain linear scaling x 365/days; windows shorter than MIN_READING_DAYS
    are refused as too noisy a proxy for yearly behaviour.
    """
    if reading_days < MIN_READING_DAYS:
        raise InsufficientWindowError(
            f"need at least {MIN_READING_DAYS} reading days, got {reading_days}"
        )
    if not (math.isfinite(observed_kwh) and observed_kwh >= 0):
        raise DataError(f"observed_kwh must be finite and >= 0, got {observed_kwh}")
    return observed_kwh * 365.0 / reading_days


def partition_outliers(ds: Dataset, policy: OutlierPolicy = OutlierPolicy()) -> tuple[Dataset, Dataset]:
    """Split a dataset into (inliers, outliers) by the target band.

    Order-preserving and lossless: concatenating the two outputs in order
    reconstructs the input's inlier/outlier subsequences exactly.
    """
    inliers = tuple(ex for ex in ds if policy.is_inlier(ex.car_kwh))
    outliers = tuple(ex for ex in ds if not policy.is_inlier(ex.car_kwh))
    return Dataset(inliers, ds.schema_version), Dataset(outliers, ds.schema_version)


def _test_size(n: int, test_fraction: float) -> int:
    # round-half-up;  fractions above 1/2 are sized as the complement of
    # their mirror so that f and 1-f always partition exactly.
    if test_fraction <= 0.5:
        return int(math.floor(n * test_fraction + 0.5))
    return n - int(math.floor(n * (1.0 - test_fraction) + 0.5))


def split_train_test(ds: Dataset, test_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Deterministic shuffled train/test partition.

    Policy (pinned for cross-implementation reproducibility): Fisher-Yates
    shuffle of indices with SplitMix64(derive_seed(seed, 0)); the test set
    takes the first n_test shuffled indices when test_fraction <= 1/2 and
    the last n_test when test_fraction > 1/2. Each output preserves the
    dataset's original relative order. Swapping f for 1-f under the same
    seed therefore yields exactly complementary sets.
    """
    if len(ds) == 0:
        raise DataError("cannot split an empty dataset")
    if not (0.0 < test_fraction < 1.0):
        raise ConfigError(f"test_fraction must be in (0, 1), got {test_fraction}")
    n = len(ds)
    order = list(range(n))
    SplitMix64(derive_seed(seed, 0)).shuffle(order)
    n_test = _test_size(n, test_fraction)
    if test_fraction <= 0.5:
        test_idx = set(order[:n_test])
    else:
        test_idx = set(order[n - n_test:])
    train = tuple(ds[i] for i in range(n) if i not in test_idx)
    test = tuple(ds[i] for i in range(n) if i in test_idx)
    return Dataset(train, ds.schema_version), Dataset(test, ds.schema_version)


# ---------------------------------------------------------------------------
# CSV ingestion


def _parse_row(row: dict[str, str], has_car: bool) -> LabeledExample:
    def numeric(column: str) -> float:
        raw = row[column].strip()
        try:
            return float(raw)
        except ValueError:
            raise DataError(f"non-numeric {column}: {raw!r}")

    def integer(column: str) -> int:
        value = numeric(column)
        if value != int(value):
            raise DataError(f"{column} must be an integer, got {row[column]!r}")
        return int(value)

    def category(column: str) -> str:
        raw = row[column].strip()
        if raw not in CATEGORY_SETS[column]:
            raise DataError(f"unknown category {raw!r} for {column}")
        return raw

    record = HouseholdRecord(
        surface_m2=numeric("surface_m2"),
        heating_type=category("heating_type"),
        water_heating_type=category("water_heating_type"),
        cooking_type=category("cooking_type"),
        occupants=integer("occupants"),
        house_type=category("house_type"),
        tariff_index=category("tariff_index"),
        max_power_kva=integer("max_power_kva"),
        reading_days=integer("reading_days"),
    )
    car_raw = row.get("car_kwh", "").strip() if has_car else ""
    if car_raw:
        car = float(car_raw) if _is_float(car_raw) else None
        if car is None:
            raise DataError(f"non-numeric car_kwh: {car_raw!r}")
    else:
        car = annualize_car(numeric("observed_kwh"), record.reading_days)
    return LabeledExample(record, car)


def _is_float(s: str) -> bool:
    try:
        float(s)
        return True
    except ValueError:
        return False


def ingest_csv(path) -> IngestResult:
    """Load the published CSV schema into a Dataset.

    Rows that violate an invariant are reported, not fatal; a malformed
    header is fatal. car_kwh may be omitted (column or value) in which case
    it is derived from observed_kwh and reading_days.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise SchemaError(f"{path}: empty file, expected header {CSV_COLUMNS}")
        fields = tuple(name.strip() for name in reader.fieldnames)
        required = CSV_COLUMNS[:-1]  # car_kwh optional
        missing = [c for c in required if c not in fields]
        if missing:
            raise SchemaError(f"{path}: missing columns {missing}")
        unknown = [c for c in fields if c not in CSV_COLUMNS]
        if unknown:
            raise SchemaError(f"{path}: unknown columns {unknown}")
        has_car = "car_kwh" in fields

        examples: list[LabeledExample] = []
        rejections: list[Rejection] = []
        for i, row in enumerate(reader, start=1):
            try:
                examples.append(_parse_row(row, has_car))
            except DataError as err:
                rejections.append(Rejection(i, str(err)))
    return IngestResult(Dataset(tuple(examples)), rejections)


def write_rejections_csv(path, rejections: Sequence[Rejection]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["row_number", "reason"])
        for rej in rejections:
            writer.writerow([rej.row_number, rej.reason])


def write_dataset_csv(path, ds: Dataset) -> None:
    """Emit a dataset in the published CSV schema (car_kwh included)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for ex in ds:
            r = ex.record
            observed = ex.car_kwh * r.reading_days / 365.0
            writer.writerow(
                [
                    _fmt(r.surface_m2),
                    r.heating_type,
                    r.water_heating_type,
                    r.cooking_type,
                    r.occupants,
                    r.house_type,
                    r.tariff_index,
                    r.max_power_kva,
                    r.reading_days,
                    _fmt(observed),
                    _fmt(ex.car_kwh),
                ]
            )


def _fmt(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))

"""Synthetic household population with a closed-form ground-truth oracle.

Targets are built as mu(record) * exp(eps) with lognormal noise, then a
small fraction is replaced by second-home-style low outliers (uniform in
[100, 1000)) or by high outliers (uniform in (10000, 25000]). The mean
function

    mu = base + per_occupant * occupants
         + surface * heating_coefficient(heating_type)
         + water_coefficient(water_heating_type) * occupants

is non-decreasing in occupants and surface by construction, so fitted
models can be audited against a known-monotone truth. All coefficients and
marginals are configuration defaults chosen for qualitative realism, not
calibrated to any real portfolio.

Record i depends only on (seed, i): each row draws from its own
SplitMix64(derive_seed(seed, i)) stream, in a fixed field order, so
generation is order-stable and safely parallelizable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .data import (
    COOKING_TYPES,
    Dataset,
    HEATING_TYPES,
    HOUSE_TYPES,
    HouseholdRecord,
    LabeledExample,
    MAX_POWER_KVA,
    TARIFF_INDEXES,
    WATER_HEATING_TYPES,
)
from .errors import ConfigError
from .rng import SplitMix64, derive_seed

LOW_OUTLIER_RANGE = (100.0, 1000.0)  # [low, high)
HIGH_OUTLIER_RANGE = (10000.0, 25000.0)  # (low, high]


def _default_heating_coefficients() -> dict[str, float]:
    return {"electric": 55.0, "heat_pump": 18.0, "gas": 6.0, "fuel": 6.0, "district": 6.0, "other": 6.0}


def _default_water_coefficients() -> dict[str, float]:
    return {"electric": 800.0, "thermodynamic": 300.0, "gas": 0.0, "other": 0.0}


def _default_marginals() -> dict[str, dict]:
    return {
        "occupants": {1: 0.28, 2: 0.32, 3: 0.17, 4: 0.14, 5: 0.06, 6: 0.03},
        "heating_type": {"electric": 0.38, "gas": 0.30, "heat_pump": 0.10, "district": 0.09, "fuel": 0.08, "other": 0.05},
        "water_heating_type": {"electric": 0.45, "gas": 0.25, "other": 0.18, "thermodynamic": 0.12},
        "cooking_type": {"electric": 0.50, "gas": 0.30, "mixed": 0.20},
        "house_type": {"apartment": 0.55, "house": 0.45},
        "tariff_index": {"base": 0.60, "peak_offpeak": 0.40},
        "max_power_kva": {3: 0.04, 6: 0.38, 9: 0.33, 12: 0.15, 15: 0.05, 18: 0.03, 24: 0.01, 30: 0.005, 36: 0.005},
        "surface_m2_log_range": [15.0, 280.0],
        "reading_days_range": [70, 365],
    }


_CATEGORY_DOMAINS = {
    "heating_type": HEATING_TYPES,
    "water_heating_type": WATER_HEATING_TYPES,
    "cooking_type": COOKING_TYPES,
    "house_type": HOUSE_TYPES,
    "tariff_index": TARIFF_INDEXES,
    "max_power_kva": MAX_POWER_KVA,
}


@dataclass(frozen=True)
class GeneratorConfig:
    n: int = 1000
    seed: int = 0
    base_kwh: float = 500.0
    per_occupant_kwh: float = 600.0
    heating_kwh_per_m2: dict[str, float] = field(default_factory=_default_heating_coefficients)
    water_kwh_per_occupant: dict[str, float] = field(default_factory=_default_water_coefficients)
    noise_sigma: float = 0.15
    p_low_outlier: float = 0.04
    p_high_outlier: float = 0.02
    marginals: dict[str, dict] = field(default_factory=_default_marginals)

    def __post_init__(self):
        if self.n < 1:
            raise ConfigError("n must be >= 1")
        for p in (self.p_low_outlier, self.p_high_outlier):
            if not (0.0 <= p <= 1.0):
                raise ConfigError("outlier probabilities must lie in [0, 1]")
        if self.p_low_outlier + self.p_high_outlier >= 1.0:
            raise ConfigError("p_low_outlier + p_high_outlier must be < 1")
        if self.noise_sigma < 0:
            raise ConfigError("noise_sigma must be >= 0")
        if self.base_kwh < 0 or self.per_occupant_kwh < 0:
            raise ConfigError("consumption coefficients must be >= 0")
        for name, table in (("heating", self.heating_kwh_per_m2), ("water", self.water_kwh_per_occupant)):
            if any(v < 0 for v in table.values()):
                raise ConfigError(f"{name} coefficients must be >= 0")
        for feature, domain in _CATEGORY_DOMAINS.items():
            weights = self.marginals[feature]
            unknown = [k for k in weights if k not in domain]
            if unknown:
                raise ConfigError(f"marginal for {feature} has unknown values {unknown}")
            if sum(weights.values()) <= 0:
                raise ConfigError(f"marginal for {feature} must have positive total weight")

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "seed": self.seed,
            "base_kwh": self.base_kwh,
            "per_occupant_kwh": self.per_occupant_kwh,
            "heating_kwh_per_m2": dict(self.heating_kwh_per_m2),
            "water_kwh_per_occupant": dict(self.water_kwh_per_occupant),
            "noise_sigma": self.noise_sigma,
            "p_low_outlier": self.p_low_outlier,
            "p_high_outlier": self.p_high_outlier,
            "marginals": {
                k: ({str(kk): vv for kk, vv in v.items()} if isinstance(v, dict) else list(v))
                for k, v in self.marginals.items()
            },
        }

    @staticmethod
    def from_dict(d: dict) -> "GeneratorConfig":
        marginals = _default_marginals()
        for key, value in d.get("marginals", {}).items():
            if isinstance(value, dict):
                cast = int if key in ("occupants", "max_power_kva") else str
                marginals[key] = {cast(k): float(v) for k, v in value.items()}
            else:
                marginals[key] = list(value)
        return GeneratorConfig(
            n=int(d.get("n", 1000)),
            seed=int(d.get("seed", 0)),
            base_kwh=float(d.get("base_kwh", 500.0)),
            per_occupant_kwh=float(d.get("per_occupant_kwh", 600.0)),
            heating_kwh_per_m2={**_default_heating_coefficients(), **d.get("heating_kwh_per_m2", {})},
            water_kwh_per_occupant={**_default_water_coefficients(), **d.get("water_kwh_per_occupant", {})},
            noise_sigma=float(d.get("noise_sigma", 0.15)),
            p_low_outlier=float(d.get("p_low_outlier", 0.04)),
            p_high_outlier=float(d.get("p_high_outlier", 0.02)),
            marginals=marginals,
        )


def oracle_mean(record: HouseholdRecord, config: GeneratorConfig) -> float:
    """Noise-free expected yearly consumption of a household."""
    return (
        config.base_kwh
        + config.per_occupant_kwh * record.occupants
        + record.surface_m2 * config.heating_kwh_per_m2[record.heating_type]
        + config.water_kwh_per_occupant[record.water_heating_type] * record.occupants
    )


def _weighted(rng: SplitMix64, weights: dict):
    keys = sorted(weights)
    return rng.choice_weighted(keys, [weights[k] for k in keys])


def _sample_record_from(rng: SplitMix64, config: GeneratorConfig) -> HouseholdRecord:
    # exactly nine draws, in this field order
    m = config.marginals
    lo, hi = m["surface_m2_log_range"]
    surface = float(round(math.exp(math.log(lo) + rng.uniform() * (math.log(hi) - math.log(lo)))))
    heating = _weighted(rng, m["heating_type"])
    water = _weighted(rng, m["water_heating_type"])
    cooking = _weighted(rng, m["cooking_type"])
    occupants = int(_weighted(rng, m["occupants"]))
    house = _weighted(rng, m["house_type"])
    tariff = _weighted(rng, m["tariff_index"])
    max_power = int(_weighted(rng, m["max_power_kva"]))
    d_lo, d_hi = (int(v) for v in m["reading_days_range"])
    reading_days = min(d_lo + int(rng.uniform() * (d_hi - d_lo + 1)), d_hi)
    return HouseholdRecord(
        surface_m2=surface,
        heating_type=heating,
        water_heating_type=water,
        cooking_type=cooking,
        occupants=occupants,
        house_type=house,
        tariff_index=tariff,
        max_power_kva=max_power,
        reading_days=reading_days,
    )


def sample_record(config: GeneratorConfig, index: int) -> HouseholdRecord:
    """Record #index of the population; independent of every other index."""
    return _sample_record_from(SplitMix64(derive_seed(config.seed, index)), config)


def _sample_target_from(rng: SplitMix64, config: GeneratorConfig, record: HouseholdRecord) -> tuple[float, str]:
    eps = config.noise_sigma * rng.normal()
    u_branch = rng.uniform()
    if u_branch < config.p_low_outlier:
        lo, hi = LOW_OUTLIER_RANGE
        return lo + rng.uniform() * (hi - lo), "low"
    if u_branch < config.p_low_outlier + config.p_high_outlier:
        lo, hi = HIGH_OUTLIER_RANGE
        return hi - rng.uniform() * (hi - lo), "high"
    return oracle_mean(record, config) * math.exp(eps), "inlier"


def generate_labeled(config: GeneratorConfig) -> tuple[Dataset, list[str]]:
    """(dataset, per-row branch labels in {'inlier', 'low', 'high'})."""
    examples = []
    labels = []
    for i in range(config.n):
        rng = SplitMix64(derive_seed(config.seed, i))
        record = _sample_record_from(rng, config)
        target, label = _sample_target_from(rng, config, record)
        examples.append(LabeledExample(record, target))
        labels.append(label)
    return Dataset(tuple(examples)), labels


def generate(config: GeneratorConfig) -> Dataset:
    """Deterministic synthetic population of config.n labeled households."""
    dataset, _labels = generate_labeled(config)
    return dataset

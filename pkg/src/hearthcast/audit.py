"""Monotonicity auditing: do predictions move the way the business expects?

A dwelling with more occupants should never be predicted to consume less;
likewise for surface area and meter capacity. The audit probes any fitted
model along per-feature value ladders, holding every other model input
fixed, and reports each adjacent pair that moves the wrong way by more
than a small tolerance.

For models that consume the encoded feature vector, the ladder varies the
audited slot directly, so derived slots (the low-consumption flag) stay at
the base record's value; the flag can be audited as its own feature if
desired. Models without an encoder (the legacy table) are probed through
the raw record.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping, Sequence

from .data import HouseholdRecord, MAX_POWER_KVA
from .errors import ConfigError, DataError

VIOLATION_TOLERANCE_KWH = 1e-6

DEFAULT_DIRECTIONS: dict[str, str] = {
    "occupants": "up",
    "surface_m2": "up",
    "max_power_kva": "up",
}

DEFAULT_LADDERS: dict[str, tuple] = {
    "occupants": tuple(range(1, 9)),
    "surface_m2": tuple(float(v) for v in range(10, 301, 10)),
    "max_power_kva": MAX_POWER_KVA,
}


@dataclass(frozen=True)
class ProbeGrid:
    """Base records plus per-feature value ladders to sweep."""

    bases: tuple[HouseholdRecord, ...]
    ladders: Mapping[str, tuple]

    def __post_init__(self):
        if not self.bases:
            raise ConfigError("probe grid needs at least one base record")
        for feature, ladder in self.ladders.items():
            if len(ladder) < 2:
                raise ConfigError(f"ladder for {feature!r} needs at least two values")

    def describe(self) -> str:
        rungs = ", ".join(f"{f}({len(v)})" for f, v in sorted(self.ladders.items()))
        return f"{len(self.bases)} base records x ladders {rungs}"

    def pair_count(self, features: Sequence[str]) -> int:
        return len(self.bases) * sum(len(self.ladders[f]) - 1 for f in features if f in self.ladders)


@dataclass(frozen=True)
class ViolatingPair:
    base_index: int
    feature: str
    value_low: float
    value_high: float
    prediction_low: float
    prediction_high: float

    def to_dict(self) -> dict:
        return {
            "base_index": self.base_index,
            "feature": self.feature,
            "value_low": self.value_low,
            "value_high": self.value_high,
            "prediction_low": self.prediction_low,
            "prediction_high": self.prediction_high,
        }


@dataclass(frozen=True)
class MonotonicityReport:
    directions: dict[str, str]
    probe_description: str
    pairs_checked: int
    violations: tuple[ViolatingPair, ...]

    @property
    def violation_count(self) -> int:
        return len(self.violations)

    def violation_count_for(self, feature: str) -> int:
        return sum(1 for v in self.violations if v.feature == feature)

    def pairs_checked_for(self, feature: str, grid: ProbeGrid) -> int:
        return grid.pair_count([feature])

    def to_dict(self) -> dict:
        return {
            "directions": dict(self.directions),
            "probe_description": self.probe_description,
            "pairs_checked": self.pairs_checked,
            "violation_count": self.violation_count,
            "violations": [v.to_dict() for v in self.violations],
        }


def _with_value(record: HouseholdRecord, feature: str, value):
    if feature == "occupants":
        return replace(record, occupants=int(value))
    if feature == "surface_m2":
        return replace(record, surface_m2=float(value))
    if feature == "max_power_kva":
        return replace(record, max_power_kva=int(value))
    raise ConfigError(f"unsupported audited feature {feature!r}")


def _ladder_predictions(model, base: HouseholdRecord, feature: str, ladder) -> list[float]:
    codec = getattr(model, "codec", None)
    if codec is not None and hasattr(model, "predict_encoded_row") and feature in codec.slots:
        slot = codec.slots.index(feature)
        row = codec.encode(base)
        predictions = []
        for value in ladder:
            probe = row.copy()
            probe[slot] = float(value)
            predictions.append(model.predict_encoded_row(probe))
        return predictions
    return [model.predict_record(_with_value(base, feature, value)) for value in ladder]


def audit_monotonicity(
    model,
    directions: Mapping[str, str] | None = None,
    probe: ProbeGrid | None = None,
) -> MonotonicityReport:
    """Probe a fitted model for direction violations along feature ladders."""
    directions = dict(DEFAULT_DIRECTIONS if directions is None else directions)
    for feature, direction in directions.items():
        if direction not in ("up", "down"):
            raise ConfigError(f"direction for {feature!r} must be 'up' or 'down'")
    if probe is None:
        probe = default_probe_grid()
    missing = [f for f in directions if f not in probe.ladders]
    if missing:
        raise ConfigError(f"probe grid has no ladder for audited features {missing}")

    violations: list[ViolatingPair] = []
    pairs = 0
    for base_index, base in enumerate(probe.bases):
        for feature, direction in directions.items():
            ladder = probe.ladders[feature]
            predictions = _ladder_predictions(model, base, feature, ladder)
            for low, high, p_low, p_high in zip(ladder, ladder[1:], predictions, predictions[1:]):
                pairs += 1
                delta = p_high - p_low
                bad = delta < -VIOLATION_TOLERANCE_KWH if direction == "up" else delta > VIOLATION_TOLERANCE_KWH
                if bad:
                    violations.append(
                        ViolatingPair(base_index, feature, float(low), float(high), p_low, p_high)
                    )
    return MonotonicityReport(
        directions=directions,
        probe_description=probe.describe(),
        pairs_checked=pairs,
        violations=tuple(violations),
    )


def default_probe_grid(n_bases: int = 25, seed: int = 20_24) -> ProbeGrid:
    """Deterministic grid of typical households with the default ladders."""
    from .synth import GeneratorConfig, sample_record

    if n_bases < 1:
        raise DataError("n_bases must be >= 1")
    config = GeneratorConfig(n=n_bases, seed=seed)
    bases = tuple(sample_record(config, i) for i in range(n_bases))
    return ProbeGrid(bases=bases, ladders=dict(DEFAULT_LADDERS))

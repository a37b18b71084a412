"""The incumbent estimator: a fixed lookup table over coarse housing bands.

Bands follow the closed-left convention: a value exactly on an edge belongs
to the lower band ((gt, le] intervals, null meaning unbounded). The shipped
default table is deliberately coarse and sits well above typical
consumption, reproducing the incumbent's tendency to overestimate; it is
configuration, not a fitted artifact, so it is identical across training
regimes.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..data import Dataset, HEATING_TYPES
from ..errors import ConfigError
from .base import ForecastModel, register_model


@dataclass(frozen=True)
class Band:
    heating_types: tuple[str, ...]
    occupants_gt: float | None
    occupants_le: float | None
    surface_gt: float | None
    surface_le: float | None
    car_kwh: float

    def matches(self, heating_type: str, occupants: float, surface: float) -> bool:
        return (
            heating_type in self.heating_types
            and _in_interval(occupants, self.occupants_gt, self.occupants_le)
            and _in_interval(surface, self.surface_gt, self.surface_le)
        )


def _in_interval(value: float, gt: float | None, le: float | None) -> bool:
    if gt is not None and not value > gt:
        return False
    if le is not None and not value <= le:
        return False
    return True


def _band_to_dict(band: Band) -> dict:
    return {
        "heating_types": list(band.heating_types),
        "occupants_gt": band.occupants_gt,
        "occupants_le": band.occupants_le,
        "surface_gt": band.surface_gt,
        "surface_le": band.surface_le,
        "car_kwh": band.car_kwh,
    }


def _band_from_dict(d: dict) -> Band:
    return Band(
        heating_types=tuple(d["heating_types"]),
        occupants_gt=d.get("occupants_gt"),
        occupants_le=d.get("occupants_le"),
        surface_gt=d.get("surface_gt"),
        surface_le=d.get("surface_le"),
        car_kwh=float(d["car_kwh"]),
    )


class LegacyTable:
    """Total, non-overlapping band lookup; validated at construction."""

    def __init__(self, bands: tuple[Band, ...]):
        self.bands = bands
        self._validate_partition()

    def lookup(self, heating_type: str, occupants: float, surface: float) -> float:
        for band in self.bands:
            if band.matches(heating_type, occupants, surface):
                return band.car_kwh
        raise ConfigError(
            f"legacy table has no band for ({heating_type}, {occupants}, {surface})"
        )

    def _validate_partition(self) -> None:
        for heating in HEATING_TYPES:
            rows = [b for b in self.bands if heating in b.heating_types]
            if not rows:
                raise ConfigError(f"legacy table covers no bands for heating {heating!r}")
            occ_probes = _probe_points([b.occupants_gt for b in rows] + [b.occupants_le for b in rows], 1.0)
            surf_probes = _probe_points([b.surface_gt for b in rows] + [b.surface_le for b in rows], 0.5)
            for occ in occ_probes:
                for surf in surf_probes:
                    matches = sum(b.matches(heating, occ, surf) for b in rows)
                    if matches != 1:
                        raise ConfigError(
                            f"legacy table bands are not a partition: heating={heating!r} "
                            f"occupants={occ} surface={surf} matched {matches} bands"
                        )

    def to_jsonable(self) -> list[dict]:
        return [_band_to_dict(b) for b in self.bands]

    @staticmethod
    def from_jsonable(data: list[dict]) -> "LegacyTable":
        return LegacyTable(tuple(_band_from_dict(d) for d in data))


def _probe_points(bounds: list[float | None], domain_min: float) -> list[float]:
    edges = sorted({float(b) for b in bounds if b is not None})
    probes = [domain_min] + edges
    for a, b in zip(edges, edges[1:]):
        probes.append((a + b) / 2.0)
    if edges:
        probes.append(edges[-1] + 1.0)
    return sorted(set(probes))


def _grid(groups: dict[tuple[str, ...], list[list[float]]],
          occ_edges: list[float], surf_edges: list[float]) -> tuple[Band, ...]:
    """Expand a values grid [occ_band][surface_band] into band entries."""
    bands = []
    occ_bounds = [None] + occ_edges
    surf_bounds = [None] + surf_edges
    for heating_types, values in groups.items():
        for i, row in enumerate(values):
            for j, car in enumerate(row):
                bands.append(
                    Band(
                        heating_types=heating_types,
                        occupants_gt=occ_bounds[i],
                        occupants_le=occ_edges[i] if i < len(occ_edges) else None,
                        surface_gt=surf_bounds[j],
                        surface_le=surf_edges[j] if j < len(surf_edges) else None,
                        car_kwh=car,
                    )
                )
    return tuple(bands)


# Default: 3 heating groups x 2 occupant bands x 3 surface bands, sitting
# roughly 45% above typical consumption in each cell.
DEFAULT_LEGACY_BANDS = _grid(
    {
        ("electric",): [[5500, 9000, 16600], [8700, 12100, 19800]],
        ("heat_pump",): [[4200, 5000, 7600], [7500, 8100, 11200]],
        ("district", "fuel", "gas", "other"): [[3600, 4000, 4800], [6900, 7100, 8000]],
    },
    occ_edges=[2.0],
    surf_edges=[50.0, 100.0],
)


@register_model
class LegacyModel(ForecastModel):
    kind = "legacy"

    def __init__(self, table: LegacyTable | None = None):
        self.table = table or LegacyTable(DEFAULT_LEGACY_BANDS)

    def fit(self, train: Dataset) -> "LegacyModel":
        # the incumbent is configured, never trained
        return self

    def predict_record(self, record) -> float:
        return self.table.lookup(record.heating_type, record.occupants, record.surface_m2)

    def to_payload(self) -> dict:
        return {"table": self.table.to_jsonable()}

    @classmethod
    def from_payload(cls, payload: dict) -> "LegacyModel":
        return cls(table=LegacyTable.from_jsonable(payload["table"]))

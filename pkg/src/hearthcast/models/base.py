"""Common model contract and the versioned model-file format.

Every model family implements fit/predict over household records and
serializes to a JSON document with a "kind" discriminator:

    {"format_version": 1, "kind": "<kind>", "model": {...}}

Fitted models are immutable in use: predict never mutates, so instances are
safe to share across threads.
"""

from __future__ import annotations

from typing import Sequence

from ..data import Dataset, HouseholdRecord
from ..errors import DataError, NotFittedError
from ..jsonio import read_json, write_json

FORMAT_VERSION = 1

_REGISTRY: dict[str, type] = {}


def register_model(cls):
    """Class decorator adding a model family to the file-format registry."""
    _REGISTRY[cls.kind] = cls
    return cls


def model_kinds() -> tuple[str, ...]:
    return tuple(sorted(_REGISTRY))


class ForecastModel:
    """fit/predict/serialize contract shared by all model families."""

    kind: str = "abstract"

    def fit(self, train: Dataset) -> "ForecastModel":
        raise NotImplementedError

    def predict_record(self, record: HouseholdRecord) -> float:
        raise NotImplementedError

    def predict_dataset(self, ds: Dataset) -> list[float]:
        return [self.predict_record(ex.record) for ex in ds]

    def to_payload(self) -> dict:
        raise NotImplementedError

    @classmethod
    def from_payload(cls, payload: dict) -> "ForecastModel":
        raise NotImplementedError

    # -- shared helpers -----------------------------------------------------

    def _require_fitted(self, fitted: bool) -> None:
        if not fitted:
            raise NotFittedError(f"{self.kind} model is not fitted")

    def to_document(self) -> dict:
        return {"format_version": FORMAT_VERSION, "kind": self.kind, "model": self.to_payload()}


def model_from_document(doc: dict) -> ForecastModel:
    if doc.get("format_version") != FORMAT_VERSION:
        raise DataError(f"unsupported model format_version {doc.get('format_version')!r}")
    kind = doc.get("kind")
    if kind not in _REGISTRY:
        raise DataError(f"unknown model kind {kind!r}, known: {model_kinds()}")
    return _REGISTRY[kind].from_payload(doc["model"])


def save_model(model: ForecastModel, path) -> None:
    write_json(path, model.to_document())


def load_model(path) -> ForecastModel:
    return model_from_document(read_json(path))


def _require_nonempty(train: Dataset | Sequence) -> None:
    if len(train) == 0:
        raise DataError("training set must not be empty")

"""Split-gain feature importance for tree ensembles.

Each split contributes its SSE decrease (sse_before - sse_after) to its
slot; contributions are summed over all trees/stages and normalized to 1.
A model with zero splits yields the all-zero vector.
"""

from __future__ import annotations

import csv

import numpy as np

from ..errors import DataError
from .boosting import BoostedModel
from .cart import CartModel, iter_splits
from .forest import ForestModel


def feature_importance(model) -> np.ndarray:
    """Normalized per-slot importance weights for a fitted tree model."""
    if isinstance(model, ForestModel):
        model._require_fitted(model.trees is not None)
        trees = model.trees
    elif isinstance(model, BoostedModel):
        model._require_fitted(model.stages is not None)
        trees = model.stages
    elif isinstance(model, CartModel):
        model._require_fitted(model.root is not None)
        trees = [model.root]
    else:
        raise DataError(f"feature importance undefined for model kind {model.kind!r}")

    totals = np.zeros(len(model.codec.slots))
    for tree in trees:
        for split in iter_splits(tree):
            totals[split.slot] += split.sse_before - split.sse_after
    grand = totals.sum()
    if grand <= 0.0:
        return totals  # stump-only model: documented all-zero exception
    return totals / grand


def importance_table(model) -> list[tuple[str, float]]:
    """(slot_name, weight) rows sorted by descending weight."""
    weights = feature_importance(model)
    rows = list(zip(model.codec.slots, (float(w) for w in weights)))
    return sorted(rows, key=lambda r: (-r[1], r[0]))


def write_importance_csv(path, model) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["slot", "weight"])
        for name, weight in importance_table(model):
            writer.writerow([name, repr(weight)])

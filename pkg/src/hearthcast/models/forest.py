"""Random forest regressor: bagged CART trees with per-split feature sampling.

Tree #k draws every random decision (bootstrap rows, per-split slot
samples) from its own stream seeded with derive_seed(config.seed, k), so
the forest is identical whether trees are built sequentially, in another
order, or concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..data import Dataset, FeatureCodec
from ..errors import ConfigError
from ..rng import SplitMix64, derive_seed
from .base import ForecastModel, _require_nonempty, register_model
from .cart import CartConfig, TreeNode, grow_tree, node_from_dict, node_to_dict, predict_matrix, predict_row


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 200
    bootstrap: bool = True
    features_per_split: int | None = None  # None = ceil(sqrt(slot count))
    max_depth: int | None = None
    min_leaf: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.n_trees < 1:
            raise ConfigError("n_trees must be >= 1")
        if self.features_per_split is not None and self.features_per_split < 1:
            raise ConfigError("features_per_split must be >= 1 or None")

    def to_dict(self) -> dict:
        return {
            "n_trees": self.n_trees,
            "bootstrap": self.bootstrap,
            "features_per_split": self.features_per_split,
            "max_depth": self.max_depth,
            "min_leaf": self.min_leaf,
            "seed": self.seed,
        }

    @staticmethod
    def from_dict(d: dict) -> "ForestConfig":
        return ForestConfig(
            n_trees=int(d.get("n_trees", 200)),
            bootstrap=bool(d.get("bootstrap", True)),
            features_per_split=d.get("features_per_split"),
            max_depth=d.get("max_depth"),
            min_leaf=int(d.get("min_leaf", 1)),
            seed=int(d.get("seed", 0)),
        )


def fit_forest_tree(
    X: np.ndarray, y: np.ndarray, category_sizes, config: ForestConfig, tree_index: int
) -> TreeNode:
    """Build tree #tree_index exactly as the full forest fit would."""
    rng = SplitMix64(derive_seed(config.seed, tree_index))
    n = X.shape[0]
    if config.bootstrap:
        rows = np.array([rng.randint_below(n) for _ in range(n)])
        Xb, yb = X[rows], y[rows]
    else:
        Xb, yb = X, y
    n_slots = X.shape[1]
    fps = config.features_per_split
    if fps is None:
        fps = min(n_slots, math.ceil(math.sqrt(n_slots)))
    if fps > n_slots:
        raise ConfigError(f"features_per_split {fps} exceeds slot count {n_slots}")
    return grow_tree(
        Xb,
        yb,
        category_sizes,
        CartConfig(max_depth=config.max_depth, min_leaf=config.min_leaf),
        rng=rng,
        features_per_split=fps if fps < n_slots else None,
    )


@register_model
class ForestModel(ForecastModel):
    kind = "forest"

    def __init__(self, config: ForestConfig = ForestConfig(), codec: FeatureCodec | None = None):
        self.config = config
        self.codec = codec or FeatureCodec()
        self.trees: list[TreeNode] | None = None

    def fit(self, train: Dataset) -> "ForestModel":
        _require_nonempty(train)
        X, y = self.codec.encode_dataset(train)
        sizes = self.codec.category_sizes
        self.trees = [
            fit_forest_tree(X, y, sizes, self.config, k) for k in range(self.config.n_trees)
        ]
        return self

    def predict_record(self, record) -> float:
        self._require_fitted(self.trees is not None)
        return self.predict_encoded_row(self.codec.encode(record))

    def predict_encoded_row(self, row: np.ndarray) -> float:
        self._require_fitted(self.trees is not None)
        return float(np.mean([predict_row(t, row) for t in self.trees]))

    def predict_dataset(self, ds: Dataset) -> list[float]:
        self._require_fitted(self.trees is not None)
        X, _ = self.codec.encode_dataset(ds)
        acc = np.zeros(X.shape[0])
        for tree in self.trees:
            acc += predict_matrix(tree, X)
        return list(acc / len(self.trees))

    def to_payload(self) -> dict:
        self._require_fitted(self.trees is not None)
        return {
            "config": self.config.to_dict(),
            "codec": self.codec.to_jsonable(),
            "trees": [node_to_dict(t) for t in self.trees],
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "ForestModel":
        model = cls(
            config=ForestConfig.from_dict(payload["config"]),
            codec=FeatureCodec.from_jsonable(payload["codec"]),
        )
        model.trees = [node_from_dict(t) for t in payload["trees"]]
        return model

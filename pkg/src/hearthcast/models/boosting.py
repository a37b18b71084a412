"""Gradient boosting for squared loss: stagewise CART fits to residuals.

F_0 is the training mean; stage m fits a tree h_m to the current residuals
and updates F_m = F_{m-1} + learning_rate * h_m. With squared loss the
negative gradient IS the residual, so no separate gradient code is needed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..data import Dataset, FeatureCodec
from ..errors import ConfigError
from .base import ForecastModel, _require_nonempty, register_model
from .cart import CartConfig, TreeNode, grow_tree, node_from_dict, node_to_dict, predict_matrix, predict_row


@dataclass(frozen=True)
class BoostConfig:
    n_stages: int = 300
    learning_rate: float = 0.1
    max_depth: int = 3
    min_leaf: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.n_stages < 1:
            raise ConfigError("n_stages must be >= 1")
        if not (0.0 < self.learning_rate <= 1.0):
            raise ConfigError("learning_rate must be in (0, 1]")

    def to_dict(self) -> dict:
        return {
            "n_stages": self.n_stages,
            "learning_rate": self.learning_rate,
            "max_depth": self.max_depth,
            "min_leaf": self.min_leaf,
            "seed": self.seed,
        }

    @staticmethod
    def from_dict(d: dict) -> "BoostConfig":
        return BoostConfig(
            n_stages=int(d.get("n_stages", 300)),
            learning_rate=float(d.get("learning_rate", 0.1)),
            max_depth=int(d.get("max_depth", 3)),
            min_leaf=int(d.get("min_leaf", 1)),
            seed=int(d.get("seed", 0)),
        )


@register_model
class BoostedModel(ForecastModel):
    kind = "gbm"

    def __init__(self, config: BoostConfig = BoostConfig(), codec: FeatureCodec | None = None):
        self.config = config
        self.codec = codec or FeatureCodec()
        self.base_value: float | None = None
        self.stages: list[TreeNode] | None = None
        self.train_mse_by_stage: list[float] = []

    def fit(self, train: Dataset) -> "BoostedModel":
        _require_nonempty(train)
        X, y = self.codec.encode_dataset(train)
        cfg = CartConfig(max_depth=self.config.max_depth, min_leaf=self.config.min_leaf)
        self.base_value = float(np.mean(y))
        self.stages = []
        self.train_mse_by_stage = []
        current = np.full(y.shape, self.base_value)
        for _ in range(self.config.n_stages):
            residuals = y - current
            tree = grow_tree(X, residuals, self.codec.category_sizes, cfg)
            current = current + self.config.learning_rate * predict_matrix(tree, X)
            self.stages.append(tree)
            self.train_mse_by_stage.append(float(np.mean((y - current) ** 2)))
        return self

    def predict_record(self, record) -> float:
        self._require_fitted(self.stages is not None)
        return self.predict_encoded_row(self.codec.encode(record))

    def predict_encoded_row(self, row: np.ndarray) -> float:
        self._require_fitted(self.stages is not None)
        acc = self.base_value
        for tree in self.stages:
            acc += self.config.learning_rate * predict_row(tree, row)
        return float(acc)

    def predict_dataset(self, ds: Dataset) -> list[float]:
        self._require_fitted(self.stages is not None)
        X, _ = self.codec.encode_dataset(ds)
        acc = np.full(X.shape[0], self.base_value)
        for tree in self.stages:
            acc += self.config.learning_rate * predict_matrix(tree, X)
        return list(acc)

    def to_payload(self) -> dict:
        self._require_fitted(self.stages is not None)
        return {
            "config": self.config.to_dict(),
            "codec": self.codec.to_jsonable(),
            "base_value": self.base_value,
            "stages": [node_to_dict(t) for t in self.stages],
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "BoostedModel":
        model = cls(
            config=BoostConfig.from_dict(payload["config"]),
            codec=FeatureCodec.from_jsonable(payload["codec"]),
        )
        model.base_value = float(payload["base_value"])
        model.stages = [node_from_dict(t) for t in payload["stages"]]
        return model

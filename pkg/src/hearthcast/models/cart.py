"""Greedy binary regression tree (variance-reduction splits, mean leaves).

Used standalone and as the base learner for the forest and boosting models.
The array-level functions (grow_tree, predict_matrix) are the workhorses;
CartModel wraps them behind the household record interface.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..data import Dataset, FeatureCodec
from ..errors import ConfigError
from ..rng import SplitMix64
from .base import ForecastModel, _require_nonempty, register_model
from .splitting import SplitDecision, best_split, split_from_dict, split_to_dict


@dataclass(frozen=True)
class CartConfig:
    max_depth: int | None = None
    min_leaf: int = 1

    def __post_init__(self):
        if self.min_leaf < 1:
            raise ConfigError("min_leaf must be >= 1")
        if self.max_depth is not None and self.max_depth < 0:
            raise ConfigError("max_depth must be >= 0")

    def to_dict(self) -> dict:
        return {"max_depth": self.max_depth, "min_leaf": self.min_leaf}

    @staticmethod
    def from_dict(d: dict) -> "CartConfig":
        return CartConfig(max_depth=d.get("max_depth"), min_leaf=int(d.get("min_leaf", 1)))


class TreeNode:
    """Internal node (split set) or leaf (split None, value = mean target)."""

    __slots__ = ("split", "left", "right", "value", "n")

    def __init__(self, value: float, n: int):
        self.split: SplitDecision | None = None
        self.left: "TreeNode | None" = None
        self.right: "TreeNode | None" = None
        self.value = value
        self.n = n

    def is_leaf(self) -> bool:
        return self.split is None


def grow_tree(
    X: np.ndarray,
    y: np.ndarray,
    category_sizes: Sequence[int],
    config: CartConfig,
    rng: SplitMix64 | None = None,
    features_per_split: int | None = None,
) -> TreeNode:
    """Depth-first greedy growth; optional per-split feature subsampling.

    When features_per_split is given, each node scans a fresh sample of
    that many slots drawn from rng (the forest's per-split subsampling).
    """
    n_slots = X.shape[1]

    def build(idx: np.ndarray, depth: int) -> TreeNode:
        y_node = y[idx]
        node = TreeNode(value=float(np.mean(y_node)), n=int(idx.size))
        if config.max_depth is not None and depth >= config.max_depth:
            return node
        if idx.size < 2 * config.min_leaf:
            return node
        if features_per_split is not None and features_per_split < n_slots:
            slots = rng.sample_indices(features_per_split, n_slots)
        else:
            slots = None
        split = best_split(X[idx], y_node, category_sizes, config.min_leaf, slots=slots)
        if split is None:
            return node
        go_left = _left_mask(X[idx, split.slot], split)
        node.split = split
        node.left = build(idx[go_left], depth + 1)
        node.right = build(idx[~go_left], depth + 1)
        return node

    return build(np.arange(X.shape[0]), 0)


def _left_mask(column: np.ndarray, split: SplitDecision) -> np.ndarray:
    if split.kind == "num":
        return column <= split.threshold
    return np.isin(column.astype(int), split.left_categories)


def predict_matrix(root: TreeNode, X: np.ndarray) -> np.ndarray:
    """Vectorized routing of many rows through one tree."""
    out = np.empty(X.shape[0])

    def route(node: TreeNode, idx: np.ndarray) -> None:
        if node.is_leaf():
            out[idx] = node.value
            return
        go_left = _left_mask(X[idx, node.split.slot], node.split)
        route(node.left, idx[go_left])
        route(node.right, idx[~go_left])

    route(root, np.arange(X.shape[0]))
    return out


def predict_row(root: TreeNode, row: np.ndarray) -> float:
    node = root
    while not node.is_leaf():
        node = node.left if node.split.goes_left(row[node.split.slot]) else node.right
    return node.value


def tree_depth(root: TreeNode) -> int:
    if root.is_leaf():
        return 0
    return 1 + max(tree_depth(root.left), tree_depth(root.right))


def iter_splits(root: TreeNode):
    """All SplitDecisions in the tree, depth-first."""
    stack = [root]
    while stack:
        node = stack.pop()
        if not node.is_leaf():
            yield node.split
            stack.append(node.right)
            stack.append(node.left)


def node_to_dict(node: TreeNode) -> dict:
    if node.is_leaf():
        return {"value": node.value, "n": node.n}
    return {
        "split": split_to_dict(node.split),
        "value": node.value,
        "n": node.n,
        "left": node_to_dict(node.left),
        "right": node_to_dict(node.right),
    }


def node_from_dict(d: dict) -> TreeNode:
    node = TreeNode(value=float(d["value"]), n=int(d["n"]))
    if "split" in d:
        node.split = split_from_dict(d["split"])
        node.left = node_from_dict(d["left"])
        node.right = node_from_dict(d["right"])
    return node


@register_model
class CartModel(ForecastModel):
    kind = "cart"

    def __init__(self, config: CartConfig = CartConfig(), codec: FeatureCodec | None = None):
        self.config = config
        self.codec = codec or FeatureCodec()
        self.root: TreeNode | None = None

    def fit(self, train: Dataset) -> "CartModel":
        _require_nonempty(train)
        X, y = self.codec.encode_dataset(train)
        self.root = grow_tree(X, y, self.codec.category_sizes, self.config)
        return self

    def predict_record(self, record) -> float:
        self._require_fitted(self.root is not None)
        return predict_row(self.root, self.codec.encode(record))

    def predict_encoded_row(self, row: np.ndarray) -> float:
        self._require_fitted(self.root is not None)
        return predict_row(self.root, row)

    def predict_dataset(self, ds: Dataset) -> list[float]:
        self._require_fitted(self.root is not None)
        X, _ = self.codec.encode_dataset(ds)
        return list(predict_matrix(self.root, X))

    def to_payload(self) -> dict:
        self._require_fitted(self.root is not None)
        return {
            "config": self.config.to_dict(),
            "codec": self.codec.to_jsonable(),
            "tree": node_to_dict(self.root),
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "CartModel":
        model = cls(
            config=CartConfig.from_dict(payload["config"]),
            codec=FeatureCodec.from_jsonable(payload["codec"]),
        )
        model.root = node_from_dict(payload["tree"])
        return model

"""Model families: incumbent table, linear, CART, forest, boosting, and the
level-uniform explainable tree. Importing this package registers every kind
with the model-file format."""

from .base import (
    FORMAT_VERSION,
    ForecastModel,
    load_model,
    model_from_document,
    model_kinds,
    save_model,
)
from .boosting import BoostConfig, BoostedModel
from .cart import CartConfig, CartModel
from .constrained import (
    ConstrainedTreeConfig,
    ConstrainedTreeModel,
    DEFAULT_CANDIDATE_FEATURES,
    DEFAULT_SCHEDULE,
    ExplanationTrace,
    TraceStep,
    fit_leaf_linear,
)
from .forest import ForestConfig, ForestModel
from .importance import feature_importance, importance_table, write_importance_csv
from .legacy import DEFAULT_LEGACY_BANDS, LegacyModel, LegacyTable
from .linear import LinearModel
from .splitting import SplitDecision, best_split, best_split_on_slot, node_sse

__all__ = [
    "FORMAT_VERSION",
    "ForecastModel",
    "load_model",
    "model_from_document",
    "model_kinds",
    "save_model",
    "BoostConfig",
    "BoostedModel",
    "CartConfig",
    "CartModel",
    "ConstrainedTreeConfig",
    "ConstrainedTreeModel",
    "DEFAULT_CANDIDATE_FEATURES",
    "DEFAULT_SCHEDULE",
    "ExplanationTrace",
    "TraceStep",
    "fit_leaf_linear",
    "ForestConfig",
    "ForestModel",
    "feature_importance",
    "importance_table",
    "write_importance_csv",
    "DEFAULT_LEGACY_BANDS",
    "LegacyModel",
    "LegacyTable",
    "LinearModel",
    "SplitDecision",
    "best_split",
    "best_split_on_slot",
    "node_sse",
]

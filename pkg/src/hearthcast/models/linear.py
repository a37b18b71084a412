"""Ordinary least squares with a tiny ridge term for numerical safety."""

from __future__ import annotations

import numpy as np

from ..data import Dataset, FeatureCodec
from .base import ForecastModel, _require_nonempty, register_model


def solve_normal_equations(X: np.ndarray, y: np.ndarray, ridge_epsilon: float) -> tuple[float, np.ndarray]:
    """(intercept, coefficients) minimizing SSE + ridge_epsilon * |coeffs|^2.

    The intercept is unpenalized; the ridge term keeps the Gram matrix
    invertible for duplicated or constant columns.
    """
    n, p = X.shape
    A = np.hstack([np.ones((n, 1)), X])
    gram = A.T @ A
    penalty = np.eye(p + 1) * ridge_epsilon
    penalty[0, 0] = 0.0
    beta = np.linalg.solve(gram + penalty, A.T @ y)
    return float(beta[0]), beta[1:]


@register_model
class LinearModel(ForecastModel):
    """Closed-form normal-equations fit of target on the feature slots.

    Minimizes sum((y - b0 - b.x)^2) + ridge_epsilon * |b|^2; the intercept
    is unpenalized. The ridge term keeps the system nonsingular even with
    duplicated or constant slots.
    """

    kind = "linear"

    def __init__(self, ridge_epsilon: float = 1e-8, codec: FeatureCodec | None = None):
        self.ridge_epsilon = ridge_epsilon
        self.codec = codec or FeatureCodec()
        self.intercept: float | None = None
        self.coefficients: np.ndarray | None = None

    def fit(self, train: Dataset) -> "LinearModel":
        _require_nonempty(train)
        X, y = self.codec.encode_dataset(train)
        self.intercept, self.coefficients = solve_normal_equations(X, y, self.ridge_epsilon)
        return self

    def predict_record(self, record) -> float:
        self._require_fitted(self.coefficients is not None)
        return float(self.intercept + self.codec.encode(record) @ self.coefficients)

    def predict_encoded_row(self, row: np.ndarray) -> float:
        self._require_fitted(self.coefficients is not None)
        return float(self.intercept + row @ self.coefficients)

    def predict_dataset(self, ds: Dataset) -> list[float]:
        self._require_fitted(self.coefficients is not None)
        X, _ = self.codec.encode_dataset(ds)
        return list(X @ self.coefficients + self.intercept)

    def to_payload(self) -> dict:
        self._require_fitted(self.coefficients is not None)
        return {
            "ridge_epsilon": self.ridge_epsilon,
            "codec": self.codec.to_jsonable(),
            "intercept": self.intercept,
            "coefficients": [float(c) for c in self.coefficients],
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "LinearModel":
        model = cls(
            ridge_epsilon=float(payload["ridge_epsilon"]),
            codec=FeatureCodec.from_jsonable(payload["codec"]),
        )
        model.intercept = float(payload["intercept"])
        model.coefficients = np.array([float(c) for c in payload["coefficients"]])
        return model

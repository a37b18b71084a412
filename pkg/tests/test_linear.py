"""Closed-form linear model: recovery, degenerate fits, residual geometry."""

import numpy as np
import pytest

from hearthcast.data import Dataset, FeatureCodec, LabeledExample
from hearthcast.models import LinearModel, load_model, save_model

from test_data import make_record


def linear_set(slope=30.0, intercept=0.0, n=20):
    examples = []
    for i in range(n):
        record = make_record(surface_m2=float(10 + i * 7))
        examples.append(LabeledExample(record, intercept + slope * record.surface_m2))
    return Dataset(tuple(examples))


def test_recovers_noiseless_line():
    # target depends on the surface slot only: slope recovered to 1e-6
    model = LinearModel().fit(linear_set(slope=2.0))
    codec = FeatureCodec()
    surface_slot = codec.slots.index("surface_m2")
    assert model.coefficients[surface_slot] == pytest.approx(2.0, abs=1e-6)
    record = make_record(surface_m2=10.0)
    assert model.predict_record(record) == pytest.approx(20.0, abs=1e-4)


def test_constant_targets():
    examples = tuple(
        LabeledExample(make_record(surface_m2=float(20 + i), occupants=1 + i % 4), 4200.0)
        for i in range(12)
    )
    model = LinearModel().fit(Dataset(examples))
    assert model.intercept == pytest.approx(4200.0, rel=1e-3)
    # constant slots are collinear with the intercept; the ridge term keeps
    # their coefficients near zero but not exactly zero
    assert np.allclose(model.coefficients, 0.0, atol=0.01)
    assert model.predict_record(make_record()) == pytest.approx(4200.0, abs=0.5)


def test_collinear_features_stay_finite():
    # max_power mirrors occupants exactly: the ridge term keeps the solve stable
    examples = tuple(
        LabeledExample(make_record(occupants=o, max_power_kva=[3, 6, 9][o - 1]), 1000.0 * o)
        for o in (1, 2, 3)
        for _ in range(5)
    )
    model = LinearModel().fit(Dataset(examples))
    assert np.all(np.isfinite(model.coefficients))
    assert np.isfinite(model.intercept)


def test_residuals_orthogonal_to_slots():
    rng = np.random.default_rng(3)
    examples = []
    for _ in range(80):
        record = make_record(
            surface_m2=float(rng.integers(10, 250)),
            occupants=int(rng.integers(1, 6)),
            max_power_kva=int(rng.choice([6, 9, 12])),
        )
        examples.append(LabeledExample(record, float(rng.uniform(1000, 9000))))
    train = Dataset(tuple(examples))
    model = LinearModel().fit(train)
    X, y = FeatureCodec().encode_dataset(train)
    residuals = y - (X @ model.coefficients + model.intercept)
    # normal equations: X'r = ridge * beta, essentially zero at this scale
    for j in range(X.shape[1]):
        assert abs(float(X[:, j] @ residuals)) < 1e-4 * max(1.0, float(np.abs(X[:, j]).sum()))
    assert abs(float(residuals.sum())) < 1e-6 * len(residuals)


def test_round_trip(tmp_path):
    model = LinearModel().fit(linear_set())
    path = tmp_path / "linear.json"
    save_model(model, path)
    again = load_model(path)
    record = make_record(surface_m2=123.0)
    assert again.predict_record(record) == model.predict_record(record)

"""Gradient boosting: stagewise behaviour and limiting cases."""

import numpy as np
import pytest

from hearthcast.data import Dataset, LabeledExample
from hearthcast.errors import ConfigError
from hearthcast.models import BoostConfig, BoostedModel, load_model, save_model
from hearthcast.rng import SplitMix64

from test_data import make_record


def training_set(n=120, seed=31):
    rng = SplitMix64(seed)
    examples = []
    for _ in range(n):
        record = make_record(
            surface_m2=float(10 + rng.randint_below(200)),
            occupants=1 + rng.randint_below(5),
        )
        target = 500.0 + 20.0 * record.surface_m2 + 700.0 * record.occupants + float(rng.randint_below(300))
        examples.append(LabeledExample(record, target))
    return Dataset(tuple(examples))


def two_group_set():
    examples = []
    for x, target in ((1.0, 1.0), (1.0, 1.0), (1.0, 1.0), (4.0, 9.0), (4.0, 9.0), (4.0, 9.0)):
        examples.append(LabeledExample(make_record(occupants=int(x)), target))
    return Dataset(tuple(examples))


def test_single_stump_stage_predicts_mean():
    train = training_set(n=40)
    model = BoostedModel(BoostConfig(n_stages=1, max_depth=0)).fit(train)
    mean = float(np.mean([ex.car_kwh for ex in train]))
    assert model.predict_record(make_record()) == pytest.approx(mean, rel=1e-12)


def test_one_full_rate_stage_fits_two_groups_exactly():
    # mean 5; one depth-1 residual tree recovers -4/+4
    model = BoostedModel(BoostConfig(n_stages=1, learning_rate=1.0, max_depth=1)).fit(two_group_set())
    assert model.base_value == 5.0
    assert model.predict_record(make_record(occupants=1)) == pytest.approx(1.0, rel=1e-12)
    assert model.predict_record(make_record(occupants=4)) == pytest.approx(9.0, rel=1e-12)


def test_vanishing_learning_rate_approaches_mean():
    train = training_set(n=50)
    model = BoostedModel(BoostConfig(n_stages=10, learning_rate=1e-9, max_depth=2)).fit(train)
    mean = float(np.mean([ex.car_kwh for ex in train]))
    assert model.predict_record(make_record()) == pytest.approx(mean, rel=1e-6)


def test_learning_rate_domain():
    with pytest.raises(ConfigError):
        BoostConfig(learning_rate=0.0)
    with pytest.raises(ConfigError):
        BoostConfig(learning_rate=1.5)
    BoostConfig(learning_rate=1.0)


def test_training_mse_non_increasing_over_stages():
    train = training_set(n=200, seed=8)
    model = BoostedModel(BoostConfig(n_stages=100, learning_rate=0.1, max_depth=3, min_leaf=2)).fit(train)
    curve = model.train_mse_by_stage
    assert len(curve) == 100
    for earlier, later in zip(curve, curve[1:]):
        assert later <= earlier + 1e-9


def test_round_trip_preserves_predictions(tmp_path):
    train = training_set(n=80)
    model = BoostedModel(BoostConfig(n_stages=25, max_depth=3, min_leaf=2)).fit(train)
    path = tmp_path / "gbm.json"
    save_model(model, path)
    again = load_model(path)
    for ex in train:
        assert again.predict_record(ex.record) == model.predict_record(ex.record)

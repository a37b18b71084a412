"""Random forest: reductions, determinism, seed independence, aggregation."""

import numpy as np
import pytest

from hearthcast.data import Dataset, FeatureCodec, LabeledExample
from hearthcast.jsonio import dumps_canonical
from hearthcast.models import (
    CartConfig,
    CartModel,
    ForestConfig,
    ForestModel,
    load_model,
    save_model,
)
from hearthcast.models.cart import predict_row
from hearthcast.models.forest import fit_forest_tree
from hearthcast.rng import SplitMix64

from test_data import make_record


def training_set(n=150, seed=21):
    rng = SplitMix64(seed)
    examples = []
    for _ in range(n):
        record = make_record(
            surface_m2=float(10 + rng.randint_below(250)),
            occupants=1 + rng.randint_below(5),
            heating_type=["electric", "gas", "heat_pump"][rng.randint_below(3)],
        )
        noise = float(rng.randint_below(400))
        target = 800.0 + 25.0 * record.surface_m2 + 600.0 * record.occupants + noise
        examples.append(LabeledExample(record, target))
    return Dataset(tuple(examples))


def test_single_tree_no_bagging_equals_cart():
    train = training_set()
    slots = len(FeatureCodec().slots)
    forest = ForestModel(
        ForestConfig(n_trees=1, bootstrap=False, features_per_split=slots, max_depth=5, min_leaf=3)
    ).fit(train)
    cart = CartModel(CartConfig(max_depth=5, min_leaf=3)).fit(train)
    for ex in train:
        assert forest.predict_record(ex.record) == cart.predict_record(ex.record)


def test_prediction_is_mean_of_trees():
    train = training_set(n=80)
    forest = ForestModel(ForestConfig(n_trees=7, max_depth=4, min_leaf=2, seed=3)).fit(train)
    record = make_record(surface_m2=77.0)
    row = FeatureCodec().encode(record)
    per_tree = [predict_row(t, row) for t in forest.trees]
    assert forest.predict_record(record) == pytest.approx(float(np.mean(per_tree)), rel=1e-12)
    assert min(per_tree) - 1e-9 <= forest.predict_record(record) <= max(per_tree) + 1e-9


def test_same_seed_same_model_file(tmp_path):
    train = training_set()
    config = ForestConfig(n_trees=5, max_depth=4, min_leaf=2, seed=11)
    a = ForestModel(config).fit(train)
    b = ForestModel(config).fit(train)
    assert dumps_canonical(a.to_document()) == dumps_canonical(b.to_document())
    c = ForestModel(ForestConfig(n_trees=5, max_depth=4, min_leaf=2, seed=12)).fit(train)
    assert dumps_canonical(c.to_document()) != dumps_canonical(a.to_document())


def test_tree_streams_independent_of_build_order():
    # tree #k rebuilt in isolation matches tree #k inside the forest
    train = training_set(n=100)
    config = ForestConfig(n_trees=6, max_depth=4, min_leaf=2, seed=9)
    forest = ForestModel(config).fit(train)
    X, y = forest.codec.encode_dataset(train)
    for k in (5, 2, 0, 3):
        lone = fit_forest_tree(X, y, forest.codec.category_sizes, config, k)
        assert np.array_equal(
            [predict_row(lone, row) for row in X],
            [predict_row(forest.trees[k], row) for row in X],
        )


def test_no_bagging_all_features_makes_identical_trees():
    train = training_set(n=60)
    slots = len(FeatureCodec().slots)
    forest = ForestModel(
        ForestConfig(n_trees=4, bootstrap=False, features_per_split=slots, max_depth=3, min_leaf=2)
    ).fit(train)
    X, _ = forest.codec.encode_dataset(train)
    reference = [predict_row(forest.trees[0], row) for row in X]
    for tree in forest.trees[1:]:
        assert [predict_row(tree, row) for row in X] == reference


def test_round_trip_preserves_predictions(tmp_path):
    train = training_set(n=90)
    forest = ForestModel(ForestConfig(n_trees=8, max_depth=5, min_leaf=2, seed=2)).fit(train)
    path = tmp_path / "forest.json"
    save_model(forest, path)
    again = load_model(path)
    for ex in train:
        assert again.predict_record(ex.record) == forest.predict_record(ex.record)

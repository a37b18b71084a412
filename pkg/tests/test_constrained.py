"""Level-uniform tree: structure, leaf fits, traces, and search optimality.

The schedule enumerator at the bottom re-implements level-wise fitting with
plain loops and direct SSE arithmetic; exhaustive search must match its
minimum exactly on random instances (integer data keeps both sides exact).
"""

import math

import numpy as np
import pytest

from hearthcast.data import Dataset, LabeledExample
from hearthcast.errors import ConfigError, DataError
from hearthcast.models import (
    ConstrainedTreeConfig,
    ConstrainedTreeModel,
    load_model,
    save_model,
)
from hearthcast.models.constrained import (
    DEFAULT_SCHEDULE,
    MAX_LEVELS,
    exhaustive_schedule,
    fit_leaf_linear,
    fit_level_tree,
    greedy_schedule,
    iter_level_leaves,
    iter_level_nodes,
    predict_level_matrix,
    training_sse,
)
from hearthcast.rng import SplitMix64

from test_data import make_record


# ---------------------------------------------------------------------------
# Leaf fitting


class TestLeafLinear:
    def test_two_point_line(self):
        alpha, beta = fit_leaf_linear(np.array([50.0, 100.0]), np.array([5000.0, 10000.0]))
        assert alpha == pytest.approx(0.0, abs=1e-9)
        assert beta == pytest.approx(100.0, rel=1e-12)
        assert alpha + beta * 75.0 == pytest.approx(7500.0, rel=1e-12)

    def test_constant_surface_falls_back_to_mean(self):
        alpha, beta = fit_leaf_linear(np.array([60.0, 60.0, 60.0]), np.array([1.0, 2.0, 6.0]))
        assert beta == 0.0
        assert alpha == pytest.approx(3.0, rel=1e-12)

    def test_negative_slope_clamped(self):
        alpha, beta = fit_leaf_linear(np.array([10.0, 50.0, 90.0]), np.array([9000.0, 5000.0, 1000.0]))
        assert beta == 0.0
        assert alpha == pytest.approx(5000.0, rel=1e-12)

    def test_empty_leaf_rejected(self):
        with pytest.raises(DataError):
            fit_leaf_linear(np.array([]), np.array([]))


# ---------------------------------------------------------------------------
# Array-level structure


def occupants_toy():
    X = np.array([[1.0], [1.0], [1.0], [4.0], [4.0], [4.0]])
    y = np.array([2000.0] * 3 + [6000.0] * 3)
    return X, y


class TestFitWithSchedule:
    def test_occupants_toy(self):
        X, y = occupants_toy()
        root = fit_level_tree(X, y, [0], [0], min_bucket=1, leaf_model="mean")
        assert root.split.threshold == 2.5
        assert (root.left.alpha, root.right.alpha) == (2000.0, 6000.0)
        assert training_sse(root, X, y, None) == 0.0

    def test_schedule_too_long(self):
        X, y = occupants_toy()
        with pytest.raises(ConfigError):
            fit_level_tree(X, y, [0], [0] * 8, min_bucket=1)

    def test_min_bucket_keeps_leaf(self):
        X, y = occupants_toy()
        root = fit_level_tree(X, y, [0], [0], min_bucket=4, leaf_model="mean")
        assert root.is_leaf()
        assert root.alpha == pytest.approx(4000.0)

    def test_too_few_rows(self):
        X, y = occupants_toy()
        with pytest.raises(DataError):
            fit_level_tree(X, y, [0], [0], min_bucket=10)

    def test_refinement_never_hurts(self):
        rng = SplitMix64(3)
        X = np.array([[float(rng.randint_below(6)), float(rng.randint_below(4))] for _ in range(90)])
        y = np.array([float(rng.randint_below(100)) for _ in range(90)])
        single = fit_level_tree(X, y, [0, 0], [], min_bucket=5, leaf_model="mean")
        deeper = fit_level_tree(X, y, [0, 0], [0, 1], min_bucket=5, leaf_model="mean")
        assert training_sse(deeper, X, y, None) <= training_sse(single, X, y, None) + 1e-9


def synth_household_set(n=600, seed=17, min_bucket_signal=True):
    rng = SplitMix64(seed)
    examples = []
    for _ in range(n):
        record = make_record(
            surface_m2=float(15 + rng.randint_below(250)),
            occupants=1 + rng.randint_below(5),
            heating_type=["electric", "gas", "heat_pump", "fuel"][rng.randint_below(4)],
            water_heating_type=["electric", "gas"][rng.randint_below(2)],
            tariff_index=["base", "peak_offpeak"][rng.randint_below(2)],
        )
        heat = {"electric": 50.0, "heat_pump": 15.0}.get(record.heating_type, 5.0)
        target = (
            400.0
            + heat * record.surface_m2
            + 550.0 * record.occupants
            + (700.0 * record.occupants if record.water_heating_type == "electric" else 0.0)
            + float(rng.randint_below(600))
        )
        examples.append(LabeledExample(record, target))
    return Dataset(tuple(examples))


class TestHouseholdModel:
    def test_structural_invariants(self):
        train = synth_household_set()
        config = ConstrainedTreeConfig(min_bucket=30)
        model = ConstrainedTreeModel(config).fit(train)
        root = model.root
        slots = model.codec.slots
        schedule_slots = [slots.index(f) for f in model.schedule_used]
        supports = []

        for node in iter_level_nodes(root):
            assert node.split.slot == schedule_slots[node.level]
        max_depth = 0
        for leaf in iter_level_leaves(root):
            assert leaf.support >= config.min_bucket
            assert leaf.beta >= 0.0
            supports.append(leaf.support)
            max_depth = max(max_depth, len(leaf.path))
        assert max_depth <= MAX_LEVELS
        assert sum(supports) == len(train)  # leaves partition the training set

    def test_trace_reconstruction_bit_exact(self):
        train = synth_household_set()
        model = ConstrainedTreeModel(ConstrainedTreeConfig(min_bucket=30)).fit(train)
        rng = SplitMix64(5)
        for _ in range(50):
            record = make_record(
                surface_m2=float(10 + rng.randint_below(290)),
                occupants=1 + rng.randint_below(6),
            )
            car, trace = model.predict_explain(record)
            assert trace.alpha + trace.beta * trace.surface_m2 == car
            assert car == model.predict_record(record)
            assert len(trace.steps) <= MAX_LEVELS

    def test_single_leaf_trace(self):
        train = synth_household_set(n=40)
        model = ConstrainedTreeModel(
            ConstrainedTreeConfig(min_bucket=40, schedule=("occupants",))
        ).fit(train)
        car, trace = model.predict_explain(make_record(surface_m2=120.0))
        assert trace.steps == ()
        assert car == trace.alpha + trace.beta * 120.0

    def test_within_leaf_surface_linearity(self):
        train = synth_household_set()
        model = ConstrainedTreeModel(ConstrainedTreeConfig(min_bucket=30)).fit(train)
        base = make_record(surface_m2=60.0, heating_type="gas", occupants=2)
        car1, trace1 = model.predict_explain(base)
        import dataclasses

        nearby = dataclasses.replace(base, surface_m2=61.0)
        car2, trace2 = model.predict_explain(nearby)
        if trace1.leaf_id == trace2.leaf_id:
            assert car2 - car1 == pytest.approx(trace1.beta * 1.0, rel=1e-9, abs=1e-9)

    def test_rule_rendering(self):
        train = synth_household_set()
        model = ConstrainedTreeModel(ConstrainedTreeConfig(min_bucket=30)).fit(train)
        _car, trace = model.predict_explain(make_record())
        for step in trace.steps:
            assert ("<=" in step.rule) or (" in {" in step.rule)
            assert step.branch in ("left", "right")

    def test_default_schedule_shipped(self):
        assert DEFAULT_SCHEDULE == (
            "low_consumption",
            "tariff_index",
            "occupants",
            "heating_type",
            "water_heating_type",
            "surface_m2",
            "surface_m2",
        )
        assert len(DEFAULT_SCHEDULE) == MAX_LEVELS

    def test_round_trip(self, tmp_path):
        train = synth_household_set(n=300)
        model = ConstrainedTreeModel(ConstrainedTreeConfig(min_bucket=25)).fit(train)
        path = tmp_path / "tree.json"
        save_model(model, path)
        again = load_model(path)
        for ex in train:
            assert again.predict_record(ex.record) == model.predict_record(ex.record)
        _car, trace = again.predict_explain(make_record(surface_m2=88.0))
        assert trace.alpha + trace.beta * trace.surface_m2 == _car

    def test_config_validation(self):
        with pytest.raises(ConfigError):
            ConstrainedTreeConfig(schedule=tuple(["occupants"] * 8))
        with pytest.raises(ConfigError):
            ConstrainedTreeConfig(schedule="hunt")
        with pytest.raises(ConfigError):
            ConstrainedTreeConfig(leaf_model="cubic")


class TestSurfaceMonotonicity:
    def test_piecewise_nonnegative_slope_everywhere(self):
        train = synth_household_set(n=800, seed=23)
        model = ConstrainedTreeModel(ConstrainedTreeConfig(min_bucket=25)).fit(train)
        row = model.codec.encode(make_record(heating_type="gas", occupants=2))
        slot = model.codec.slots.index("surface_m2")
        previous = None
        for surface in np.linspace(10.0, 300.0, 400):
            probe = row.copy()
            probe[slot] = surface
            value = model.predict_encoded_row(probe)
            if previous is not None:
                assert value >= previous - 1e-9
            previous = value

    def test_stitch_closes_downward_jumps(self):
        # a leaf pattern that plain per-leaf fits would leave discontinuous
        rng = SplitMix64(41)
        rows = []
        targets = []
        for _ in range(200):
            s = float(10 + rng.randint_below(90))
            noise = float(rng.randint_below(2000))
            rows.append([s])
            targets.append(2000.0 + 10.0 * s + noise)
        X = np.array(rows)
        y = np.array(targets)
        root = fit_level_tree(
            X, y, [0], [0, 0], min_bucket=20, leaf_model="surface_linear", linear_slot=0, stitch=True
        )
        surfaces = np.linspace(10.0, 100.0, 500).reshape(-1, 1)
        values = predict_level_matrix(root, surfaces, 0)
        assert np.all(np.diff(values) >= -1e-9)


# ---------------------------------------------------------------------------
# Schedule search vs an independent enumerator


def naive_sse(y):
    n = len(y)
    if n == 0:
        return 0.0
    return (n * float(np.sum(y * y)) - float(np.sum(y)) ** 2) / n


def naive_best_split_on(x, y, n_categories, min_bucket):
    """(score, mask) of the best split of one column, or None."""
    sse_before = naive_sse(y)
    best = None
    n = len(y)
    if n_categories == 0:
        values = sorted(set(x.tolist()))
        candidates = [((a + b) / 2.0, None) for a, b in zip(values, values[1:])]
    else:
        codes = x.astype(int)
        present = sorted(set(codes.tolist()))
        means = {c: float(np.mean(y[codes == c])) for c in present}
        ordered = sorted(present, key=lambda c: (means[c], c))
        candidates = [(None, tuple(sorted(ordered[:j]))) for j in range(1, len(ordered))]
    for threshold, cats in candidates:
        mask = (x <= threshold) if cats is None else np.isin(x.astype(int), cats)
        n_left = int(mask.sum())
        if n_left < min_bucket or n - n_left < min_bucket:
            continue
        score = naive_sse(y[mask]) + naive_sse(y[~mask])
        if score >= sse_before - 1e-12 * max(1.0, sse_before):
            continue
        if best is None or score < best[0]:
            best = (score, mask)
    return best


def naive_schedule_sse(X, y, category_sizes, schedule, min_bucket):
    """Training SSE of the level-wise tree with mean leaves.

    A node that cannot split at its level becomes a leaf for good.
    """
    frontier = [np.arange(len(y))]
    leaves = []
    for slot in schedule:
        next_frontier = []
        for idx in frontier:
            found = naive_best_split_on(X[idx, slot], y[idx], category_sizes[slot], min_bucket)
            if found is None:
                leaves.append(idx)
                continue
            _score, mask = found
            next_frontier.append(idx[mask])
            next_frontier.append(idx[~mask])
        frontier = next_frontier
    leaves.extend(frontier)
    return math.fsum(naive_sse(y[idx]) for idx in leaves)


def enumerate_schedules_naive(candidates, max_uses, max_len):
    def rec(prefix, uses):
        yield list(prefix)
        if len(prefix) == max_len:
            return
        for c in candidates:
            if uses[c] > 0:
                uses[c] -= 1
                prefix.append(c)
                yield from rec(prefix, uses)
                prefix.pop()
                uses[c] += 1

    yield from rec([], dict(max_uses))


def leafwise_sse(root, X, y):
    """Exact leaf-by-leaf training SSE of a fitted tree (integer-safe)."""
    pieces = []

    def collect(node, idx):
        if node.is_leaf():
            pieces.append(naive_sse(y[idx]))
            return
        if node.split.kind == "num":
            mask = X[idx, node.split.slot] <= node.split.threshold
        else:
            mask = np.isin(X[idx, node.split.slot].astype(int), node.split.left_categories)
        collect(node.left, idx[mask])
        collect(node.right, idx[~mask])

    collect(root, np.arange(len(y)))
    return math.fsum(pieces)


def random_instance(rng):
    n = 20 + rng.randint_below(81)  # 20..100 rows
    n_slots = 1 + rng.randint_below(3)
    columns = []
    sizes = []
    for _ in range(n_slots):
        if rng.randint_below(2) == 0:
            columns.append(np.array([float(rng.randint_below(8)) for _ in range(n)]))
            sizes.append(0)
        else:
            k = 2 + rng.randint_below(4)
            columns.append(np.array([float(rng.randint_below(k)) for _ in range(n)]))
            sizes.append(k)
    X = np.column_stack(columns)
    y = np.array([float(rng.randint_below(60)) for _ in range(n)])
    min_bucket = 1 + rng.randint_below(5)
    return X, y, sizes, min_bucket


class TestScheduleSearch:
    def test_single_candidate(self):
        X, y = occupants_toy()
        schedule = greedy_schedule(X, y, [0], [0], min_bucket=1)
        assert schedule[:1] == [0]

    def test_separating_feature_picked_first(self):
        # feature 0 is noise; feature 1 alone separates the two target groups
        rng = SplitMix64(6)
        n = 40
        noise = np.array([float(rng.randint_below(2)) for _ in range(n)])
        signal = np.array([float(i % 2) for i in range(n)])
        X = np.column_stack([noise, signal])
        y = 1000.0 + 5000.0 * signal
        schedule, _root = exhaustive_schedule(X, y, [0, 0], [0, 1], min_bucket=1, leaf_model="mean")
        assert schedule[0] == 1
        greedy = greedy_schedule(X, y, [0, 0], [0, 1], min_bucket=1)
        assert greedy[0] == 1

    def test_exhaustive_matches_enumerator_on_twenty_instances(self):
        rng = SplitMix64(314)
        for _ in range(20):
            X, y, sizes, min_bucket = random_instance(rng)
            if len(y) < min_bucket:
                continue
            candidates = list(range(X.shape[1]))
            max_uses = {c: 1 for c in candidates}
            expected = min(
                naive_schedule_sse(X, y, sizes, s, min_bucket)
                for s in enumerate_schedules_naive(candidates, max_uses, min(7, len(candidates)))
            )
            _schedule, root = exhaustive_schedule(
                X, y, sizes, candidates, min_bucket, leaf_model="mean"
            )
            assert leafwise_sse(root, X, y) == expected

    def test_greedy_never_beats_exhaustive(self):
        rng = SplitMix64(1618)
        for _ in range(12):
            X, y, sizes, min_bucket = random_instance(rng)
            candidates = list(range(X.shape[1]))
            greedy = greedy_schedule(X, y, sizes, candidates, min_bucket)
            greedy_root = fit_level_tree(X, y, sizes, greedy, min_bucket, leaf_model="mean")
            _s, best_root = exhaustive_schedule(X, y, sizes, candidates, min_bucket, leaf_model="mean")
            assert training_sse(best_root, X, y, None) <= training_sse(greedy_root, X, y, None) + 1e-9

    def test_space_cap(self):
        X, y, sizes, _ = random_instance(SplitMix64(9))
        candidates = list(range(X.shape[1]))
        with pytest.raises(ConfigError):
            exhaustive_schedule(X, y, sizes, candidates, 1, leaf_model="mean", space_cap=2)

    def test_search_mode_on_household_model(self):
        train = synth_household_set(n=400)
        model = ConstrainedTreeModel(
            ConstrainedTreeConfig(min_bucket=40, schedule="search", search_mode="greedy")
        ).fit(train)
        assert model.schedule_used is not None
        assert len(model.schedule_used) <= MAX_LEVELS
        # searched schedules respect the usage caps
        for feature in set(model.schedule_used):
            cap = 2 if feature == "surface_m2" else 1
            assert list(model.schedule_used).count(feature) <= cap


class TestSharedThresholdMode:
    def test_level_shares_one_parameter(self):
        train = synth_household_set(n=500)
        model = ConstrainedTreeModel(
            ConstrainedTreeConfig(min_bucket=30, shared_thresholds=True)
        ).fit(train)
        by_level: dict = {}
        for node in iter_level_nodes(model.root):
            key = (node.split.threshold, node.split.left_categories)
            by_level.setdefault(node.level, set()).add(key)
        for level, params in by_level.items():
            assert len(params) == 1, f"level {level} has {len(params)} distinct parameters"

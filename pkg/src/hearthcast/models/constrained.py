"""The explainable level-uniform regression tree.

Structure guarantees, all enforced at fit time and checkable on the fitted
object:

* every internal node at level d splits on the same feature schedule[d]
  (thresholds stay per-node unless shared_thresholds is on);
* at most 7 levels;
* every leaf holds at least min_bucket training rows;
* a node with no valid, gain-positive split becomes a leaf early;
* leaves carry an affine value alpha + beta * surface with beta >= 0, so a
  bigger dwelling never gets a smaller estimate within a leaf;
* where consecutive leaf intervals meet across a surface split (inside a
  subtree that splits on surface only), intercepts are stitched so the
  estimate cannot drop when crossing the boundary.

The schedule can be fixed, chosen greedily level by level, or found by
exhaustively fitting every allowed schedule (surface may be used twice,
other candidates once).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..data import Dataset, FeatureCodec
from ..errors import ConfigError, DataError
from .base import ForecastModel, _require_nonempty, register_model
from .splitting import (
    RELATIVE_GAIN_TOL,
    SplitDecision,
    best_split_on_slot,
    node_sse,
    numeric_candidates,
    split_from_dict,
    split_to_dict,
)

MAX_LEVELS = 7

DEFAULT_CANDIDATE_FEATURES = (
    "low_consumption",
    "tariff_index",
    "occupants",
    "heating_type",
    "water_heating_type",
    "surface_m2",
)

# the production feature order: boolean profile first, then tariff,
# occupants, heating, water heating, and surface twice for finer granularity
DEFAULT_SCHEDULE = (
    "low_consumption",
    "tariff_index",
    "occupants",
    "heating_type",
    "water_heating_type",
    "surface_m2",
    "surface_m2",
)

LEAF_MODELS = ("mean", "surface_linear", "surface_linear_global")


# ---------------------------------------------------------------------------
# Array-level tree


class Leaf:
    __slots__ = ("alpha", "beta", "support", "path")

    def __init__(self, alpha: float, beta: float, support: int, path: str):
        self.alpha = alpha
        self.beta = beta
        self.support = support
        self.path = path

    def is_leaf(self) -> bool:
        return True


class Node:
    __slots__ = ("split", "level", "left", "right")

    def __init__(self, split: SplitDecision, level: int):
        self.split = split
        self.level = level
        self.left = None
        self.right = None

    def is_leaf(self) -> bool:
        return False


def fit_leaf_linear(surfaces: np.ndarray, targets: np.ndarray) -> tuple[float, float]:
    """(alpha, beta) of the within-leaf fit of target on surface.

    beta is clamped to 0 (falling back to the plain mean) when the surface
    has no variance or the least-squares slope comes out negative.
    """
    if targets.size == 0:
        raise DataError("cannot fit a leaf on zero rows")
    mean_y = float(np.mean(targets))
    mean_s = float(np.mean(surfaces))
    var = float(np.sum((surfaces - mean_s) ** 2))
    if var == 0.0:
        return mean_y, 0.0
    beta = float(np.sum((surfaces - mean_s) * (targets - mean_y))) / var
    if beta < 0.0:
        return mean_y, 0.0
    return mean_y - beta * mean_s, beta


def _build_levels(
    X: np.ndarray,
    y: np.ndarray,
    category_sizes: Sequence[int],
    schedule: Sequence[int],
    min_bucket: int,
    shared_thresholds: bool,
) -> tuple[object, list[tuple[object, str, np.ndarray]]]:
    """Grow the level structure; returns (root, leaf work list)."""
    all_idx = np.arange(X.shape[0])
    # frontier entries: (attach, path, idx); attach(node_or_leaf) wires the parent
    root_box: list = [None]

    def root_attach(child):
        root_box[0] = child

    frontier = [(root_attach, "", all_idx)]
    leaves: list[tuple[object, str, np.ndarray]] = []

    for level, slot in enumerate(schedule):
        if not frontier:
            break
        if shared_thresholds:
            splits = _shared_level_splits(X, y, category_sizes, slot, frontier, min_bucket)
        else:
            splits = [
                _node_split(X, y, category_sizes, slot, idx, min_bucket)
                for _attach, _path, idx in frontier
            ]
        next_frontier = []
        for (attach, path, idx), split in zip(frontier, splits):
            if split is None:
                leaves.append((attach, path, idx))
                continue
            node = Node(split, level)
            attach(node)
            go_left = _goes_left(X[idx, slot], split)
            left_idx, right_idx = idx[go_left], idx[~go_left]

            def make_attach(parent, side):
                def attach_child(child):
                    setattr(parent, side, child)
                return attach_child

            next_frontier.append((make_attach(node, "left"), path + "L", left_idx))
            next_frontier.append((make_attach(node, "right"), path + "R", right_idx))
        frontier = next_frontier

    leaves.extend((attach, path, idx) for attach, path, idx in frontier)
    return root_box, leaves


def _node_split(X, y, category_sizes, slot, idx, min_bucket) -> SplitDecision | None:
    found = best_split_on_slot(X[idx, slot], y[idx], category_sizes[slot], min_bucket)
    if found is None:
        return None
    return SplitDecision(
        slot=slot,
        kind=found.kind,
        threshold=found.threshold,
        left_categories=found.left_categories,
        sse_before=found.sse_before,
        sse_after=found.sse_after,
        n_left=found.n_left,
        n_right=found.n_right,
    )


def _shared_level_splits(X, y, category_sizes, slot, frontier, min_bucket):
    """One split parameter for the whole level (ablation mode).

    Candidates come from the pooled frontier rows; each node adopts the
    chosen parameter only where it is valid and gain-positive, otherwise it
    becomes a leaf at this level.
    """
    pooled = np.concatenate([idx for _a, _p, idx in frontier])
    if category_sizes[slot] == 0:
        xs = np.sort(X[pooled, slot])
        thresholds, _sizes = numeric_candidates(xs)
        candidates = [("num", float(t), None) for t in thresholds]
    else:
        codes = X[pooled, slot].astype(int)
        counts = np.bincount(codes, minlength=category_sizes[slot])
        sums = np.bincount(codes, weights=y[pooled], minlength=category_sizes[slot])
        present = np.nonzero(counts)[0]
        if present.size < 2:
            return [None] * len(frontier)
        means = sums[present] / counts[present]
        order = present[np.lexsort((present, means))]
        candidates = [
            ("cat", None, tuple(sorted(int(c) for c in order[: j + 1])))
            for j in range(order.size - 1)
        ]
    if not candidates:
        return [None] * len(frontier)

    best_total = None
    best_splits = None
    for kind, threshold, cats in candidates:
        total = 0.0
        splits = []
        for _attach, _path, idx in frontier:
            split = _apply_fixed_candidate(
                X[idx, slot], y[idx], slot, kind, threshold, cats, min_bucket
            )
            splits.append(split)
            total += split.sse_after if split else node_sse(y[idx])
        if best_total is None or total < best_total:
            best_total = total
            best_splits = splits
    if all(s is None for s in best_splits):
        return [None] * len(frontier)
    return best_splits


def _apply_fixed_candidate(x, y, slot, kind, threshold, cats, min_bucket):
    if kind == "num":
        go_left = x <= threshold
    else:
        go_left = np.isin(x.astype(int), cats)
    n_left = int(np.sum(go_left))
    n_right = x.size - n_left
    if n_left < min_bucket or n_right < min_bucket:
        return None
    before = node_sse(y)
    after = node_sse(y[go_left]) + node_sse(y[~go_left])
    if after >= before - RELATIVE_GAIN_TOL * max(1.0, before):
        return None
    return SplitDecision(
        slot=slot,
        kind=kind,
        threshold=threshold,
        left_categories=cats,
        sse_before=before,
        sse_after=after,
        n_left=n_left,
        n_right=n_right,
    )


def _goes_left(column: np.ndarray, split: SplitDecision) -> np.ndarray:
    if split.kind == "num":
        return column <= split.threshold
    return np.isin(column.astype(int), split.left_categories)


def fit_level_tree(
    X: np.ndarray,
    y: np.ndarray,
    category_sizes: Sequence[int],
    schedule: Sequence[int],
    min_bucket: int,
    leaf_model: str = "mean",
    linear_slot: int | None = None,
    stitch: bool = True,
    shared_thresholds: bool = False,
):
    """Fit the level-uniform tree over encoded rows; returns the root."""
    if len(schedule) > MAX_LEVELS:
        raise ConfigError(f"schedule length {len(schedule)} exceeds {MAX_LEVELS} levels")
    if X.shape[0] < min_bucket:
        raise DataError(f"need at least min_bucket={min_bucket} training rows, got {X.shape[0]}")
    if leaf_model not in LEAF_MODELS:
        raise ConfigError(f"unknown leaf_model {leaf_model!r}")
    if leaf_model != "mean" and linear_slot is None:
        raise ConfigError("linear leaf models require a linear slot")

    root_box, leaf_work = _build_levels(X, y, category_sizes, schedule, min_bucket, shared_thresholds)

    if leaf_model == "surface_linear_global":
        beta = _pooled_slope(X, y, linear_slot, [idx for _a, _p, idx in leaf_work])
    for attach, path, idx in leaf_work:
        y_leaf = y[idx]
        if leaf_model == "mean":
            alpha, b = float(np.mean(y_leaf)), 0.0
        elif leaf_model == "surface_linear":
            alpha, b = fit_leaf_linear(X[idx, linear_slot], y_leaf)
        else:
            b = beta
            alpha = float(np.mean(y_leaf)) - b * float(np.mean(X[idx, linear_slot]))
        attach(Leaf(alpha, b, int(idx.size), path))

    root = root_box[0]
    if stitch and linear_slot is not None and leaf_model != "mean":
        _stitch_linear_boundaries(root, linear_slot)
    return root


def _pooled_slope(X, y, linear_slot, leaf_indices) -> float:
    """One shared slope: within-leaf-centered least squares, clamped >= 0."""
    num = 0.0
    den = 0.0
    for idx in leaf_indices:
        s = X[idx, linear_slot]
        t = y[idx]
        s_c = s - np.mean(s)
        num += float(np.sum(s_c * (t - np.mean(t))))
        den += float(np.sum(s_c * s_c))
    if den == 0.0:
        return 0.0
    return max(num / den, 0.0)


def _splits_only_on(node, slot: int) -> bool:
    if node.is_leaf():
        return True
    return (
        node.split.slot == slot
        and node.split.kind == "num"
        and _splits_only_on(node.left, slot)
        and _splits_only_on(node.right, slot)
    )


def _stitch_linear_boundaries(root, linear_slot: int) -> None:
    """Align intercepts at surface thresholds inside surface-only subtrees.

    Within such a subtree the leaves partition the surface axis into
    consecutive intervals; a single left-to-right pass raises any right
    piece that starts below the left piece's value at the shared threshold.
    """

    def visit(node):
        if node.is_leaf():
            return
        if _splits_only_on(node, linear_slot):
            leaves: list[Leaf] = []
            bounds: list[float] = []
            _inorder(node, leaves, bounds)
            for i, t in enumerate(bounds):
                left_val = leaves[i].alpha + leaves[i].beta * t
                right_val = leaves[i + 1].alpha + leaves[i + 1].beta * t
                if left_val > right_val:
                    leaves[i + 1].alpha += left_val - right_val
            return
        visit(node.left)
        visit(node.right)

    visit(root)


def _inorder(node, leaves: list, bounds: list) -> None:
    if node.is_leaf():
        leaves.append(node)
        return
    _inorder(node.left, leaves, bounds)
    bounds.append(node.split.threshold)
    _inorder(node.right, leaves, bounds)


def predict_level_row(root, row: np.ndarray, linear_slot: int | None):
    """(prediction, visited nodes, leaf) for one encoded row."""
    steps = []
    node = root
    while not node.is_leaf():
        left = node.split.goes_left(row[node.split.slot])
        steps.append((node, left))
        node = node.left if left else node.right
    surface = float(row[linear_slot]) if linear_slot is not None else 0.0
    return node.alpha + node.beta * surface, steps, node


def predict_level_matrix(root, X: np.ndarray, linear_slot: int | None) -> np.ndarray:
    out = np.empty(X.shape[0])

    def route(node, idx):
        if node.is_leaf():
            if linear_slot is None:
                out[idx] = node.alpha
            else:
                out[idx] = node.alpha + node.beta * X[idx, linear_slot]
            return
        go_left = _goes_left(X[idx, node.split.slot], node.split)
        route(node.left, idx[go_left])
        route(node.right, idx[~go_left])

    route(root, np.arange(X.shape[0]))
    return out


def training_sse(root, X: np.ndarray, y: np.ndarray, linear_slot: int | None) -> float:
    residuals = y - predict_level_matrix(root, X, linear_slot)
    return float(np.sum(residuals * residuals))


def iter_level_nodes(root):
    stack = [root]
    while stack:
        node = stack.pop()
        if node.is_leaf():
            continue
        yield node
        stack.append(node.right)
        stack.append(node.left)


def iter_level_leaves(root):
    stack = [root]
    while stack:
        node = stack.pop()
        if node.is_leaf():
            yield node
        else:
            stack.append(node.right)
            stack.append(node.left)


# ---------------------------------------------------------------------------
# Schedule search


def _allowed_uses(candidates: Sequence[int], linear_slot: int | None) -> dict[int, int]:
    return {c: (2 if c == linear_slot else 1) for c in candidates}


def greedy_schedule(
    X: np.ndarray,
    y: np.ndarray,
    category_sizes: Sequence[int],
    candidates: Sequence[int],
    min_bucket: int,
    linear_slot: int | None = None,
    max_levels: int = MAX_LEVELS,
) -> list[int]:
    """Level-by-level choice of the feature that most reduces pooled SSE.

    The selection metric is the mean-leaf (constant fit) SSE of the level's
    children; leaf models only enter the final fit. Ties go to the earliest
    candidate in the list.
    """
    if not candidates:
        raise ConfigError("candidate feature list must not be empty")
    uses_left = dict(_allowed_uses(candidates, linear_slot))
    frontier = [np.arange(X.shape[0])]
    schedule: list[int] = []
    current_total = sum(node_sse(y[idx]) for idx in frontier)
    for _level in range(max_levels):
        best = None  # (total, candidate, splits)
        for c in candidates:
            if uses_left.get(c, 0) <= 0:
                continue
            total = 0.0
            splits = []
            for idx in frontier:
                split = _node_split(X, y, category_sizes, c, idx, min_bucket)
                splits.append(split)
                total += split.sse_after if split else node_sse(y[idx])
            if best is None or total < best[0]:
                best = (total, c, splits)
        if best is None:
            break
        total, c, splits = best
        if total >= current_total - RELATIVE_GAIN_TOL * max(1.0, current_total):
            break
        schedule.append(c)
        uses_left[c] -= 1
        next_frontier = []
        for idx, split in zip(frontier, splits):
            if split is None:
                next_frontier.append(idx)  # stays a leaf; keep for totals
                continue
            go_left = _goes_left(X[idx, c], split)
            next_frontier.append(idx[go_left])
            next_frontier.append(idx[~go_left])
        frontier = next_frontier
        current_total = sum(node_sse(y[idx]) for idx in frontier)
    return schedule


def enumerate_schedules(candidates: Sequence[int], max_uses: dict[int, int], max_levels: int):
    """All schedules up to max_levels levels: shortest first, then candidate order.

    Shortest-first makes the search prefer the simplest schedule among
    training-SSE ties.
    """

    def rec(prefix: list[int], uses: dict[int, int], length: int):
        if len(prefix) == length:
            yield tuple(prefix)
            return
        for c in candidates:
            if uses[c] > 0:
                uses[c] -= 1
                prefix.append(c)
                yield from rec(prefix, uses, length)
                prefix.pop()
                uses[c] += 1

    for length in range(max_levels + 1):
        yield from rec([], dict(max_uses), length)


def count_schedules(candidates: Sequence[int], max_uses: dict[int, int], max_levels: int) -> int:
    def rec(depth: int, uses: dict[int, int]) -> int:
        total = 1
        if depth == max_levels:
            return total
        for c in candidates:
            if uses[c] > 0:
                uses[c] -= 1
                total += rec(depth + 1, uses)
                uses[c] += 1
        return total

    return rec(0, dict(max_uses))


def exhaustive_schedule(
    X: np.ndarray,
    y: np.ndarray,
    category_sizes: Sequence[int],
    candidates: Sequence[int],
    min_bucket: int,
    leaf_model: str = "mean",
    linear_slot: int | None = None,
    stitch: bool = True,
    max_levels: int = MAX_LEVELS,
    space_cap: int = 100_000,
) -> tuple[list[int], object]:
    """Fit every allowed schedule, return the lowest-training-SSE tree.

    The first schedule (in depth-first candidate order) attaining the
    minimum wins, so short schedules beat gain-free extensions.
    """
    if not candidates:
        raise ConfigError("candidate feature list must not be empty")
    max_uses = _allowed_uses(candidates, linear_slot)
    space = count_schedules(candidates, max_uses, max_levels)
    if space > space_cap:
        raise ConfigError(
            f"exhaustive schedule space {space} exceeds the cap {space_cap}; use greedy"
        )
    best = None  # (sse, schedule, root)
    for schedule in enumerate_schedules(candidates, max_uses, max_levels):
        root = fit_level_tree(
            X, y, category_sizes, schedule, min_bucket,
            leaf_model=leaf_model, linear_slot=linear_slot, stitch=stitch,
        )
        sse = training_sse(root, X, y, linear_slot)
        if best is None or sse < best[0]:
            best = (sse, list(schedule), root)
    return best[1], best[2]


# ---------------------------------------------------------------------------
# Household-level model


@dataclass(frozen=True)
class ConstrainedTreeConfig:
    min_bucket: int = 50
    schedule: tuple[str, ...] | str = DEFAULT_SCHEDULE  # or "search"
    search_mode: str = "greedy"  # or "exhaustive"
    leaf_model: str = "surface_linear"
    candidates: tuple[str, ...] = DEFAULT_CANDIDATE_FEATURES
    monotone_surface_stitch: bool = True
    shared_thresholds: bool = False
    exhaustive_space_cap: int = 100_000

    def __post_init__(self):
        if self.min_bucket < 1:
            raise ConfigError("min_bucket must be >= 1")
        if self.leaf_model not in LEAF_MODELS:
            raise ConfigError(f"leaf_model must be one of {LEAF_MODELS}")
        if self.search_mode not in ("greedy", "exhaustive"):
            raise ConfigError("search_mode must be 'greedy' or 'exhaustive'")
        if isinstance(self.schedule, str):
            if self.schedule != "search":
                raise ConfigError("schedule must be a feature list or 'search'")
        elif len(self.schedule) > MAX_LEVELS:
            raise ConfigError(f"schedule length {len(self.schedule)} exceeds {MAX_LEVELS}")

    def to_dict(self) -> dict:
        return {
            "min_bucket": self.min_bucket,
            "schedule": list(self.schedule) if not isinstance(self.schedule, str) else self.schedule,
            "search_mode": self.search_mode,
            "leaf_model": self.leaf_model,
            "candidates": list(self.candidates),
            "monotone_surface_stitch": self.monotone_surface_stitch,
            "shared_thresholds": self.shared_thresholds,
            "exhaustive_space_cap": self.exhaustive_space_cap,
        }

    @staticmethod
    def from_dict(d: dict) -> "ConstrainedTreeConfig":
        schedule = d.get("schedule", list(DEFAULT_SCHEDULE))
        return ConstrainedTreeConfig(
            min_bucket=int(d.get("min_bucket", 50)),
            schedule=schedule if isinstance(schedule, str) else tuple(schedule),
            search_mode=d.get("search_mode", "greedy"),
            leaf_model=d.get("leaf_model", "surface_linear"),
            candidates=tuple(d.get("candidates", DEFAULT_CANDIDATE_FEATURES)),
            monotone_surface_stitch=bool(d.get("monotone_surface_stitch", True)),
            shared_thresholds=bool(d.get("shared_thresholds", False)),
            exhaustive_space_cap=int(d.get("exhaustive_space_cap", 100_000)),
        )


@dataclass(frozen=True)
class TraceStep:
    level: int
    feature: str
    rule: str
    branch: str  # "left" | "right"

    def to_dict(self) -> dict:
        return {"level": self.level, "feature": self.feature, "rule": self.rule, "branch": self.branch}


@dataclass(frozen=True)
class ExplanationTrace:
    """Ordered decision path plus the leaf's affine terms.

    alpha + beta * surface_m2 equals the prediction bit-exactly; the trace
    is the full story of how the number came to be.
    """

    steps: tuple[TraceStep, ...]
    leaf_id: str
    alpha: float
    beta: float
    surface_m2: float
    prediction: float

    @property
    def surface_term(self) -> float:
        return self.beta * self.surface_m2

    def to_dict(self) -> dict:
        return {
            "steps": [s.to_dict() for s in self.steps],
            "leaf_id": self.leaf_id,
            "alpha": self.alpha,
            "beta": self.beta,
            "surface_m2": self.surface_m2,
            "surface_term": self.surface_term,
            "prediction": self.prediction,
        }

    def to_text(self) -> str:
        lines = [f"level {s.level}: {s.rule} -> {s.branch}" for s in self.steps]
        lines.append(
            f"leaf {self.leaf_id or 'root'}: {_fmt(self.alpha)} + {_fmt(self.beta)} x "
            f"{_fmt(self.surface_m2)} m2 = {_fmt(self.prediction)} kWh"
        )
        return "\n".join(lines)


def _fmt(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else f"{x:.6g}"


@register_model
class ConstrainedTreeModel(ForecastModel):
    kind = "constrained"

    def __init__(self, config: ConstrainedTreeConfig = ConstrainedTreeConfig(), codec: FeatureCodec | None = None):
        self.config = config
        self.codec = codec or FeatureCodec()
        self.root = None
        self.schedule_used: tuple[str, ...] | None = None

    # -- fitting ------------------------------------------------------------

    def _slot_of(self, feature: str) -> int:
        try:
            return self.codec.slots.index(feature)
        except ValueError:
            raise ConfigError(f"unknown feature {feature!r}; slots: {self.codec.slots}")

    def fit(self, train: Dataset) -> "ConstrainedTreeModel":
        _require_nonempty(train)
        X, y = self.codec.encode_dataset(train)
        sizes = self.codec.category_sizes
        linear_slot = self.codec.slots.index("surface_m2")
        cfg = self.config
        candidate_slots = [self._slot_of(f) for f in cfg.candidates]
        if isinstance(cfg.schedule, str):  # "search"
            if cfg.search_mode == "exhaustive":
                slot_schedule, root = exhaustive_schedule(
                    X, y, sizes, candidate_slots, cfg.min_bucket,
                    leaf_model=cfg.leaf_model, linear_slot=linear_slot,
                    stitch=cfg.monotone_surface_stitch, space_cap=cfg.exhaustive_space_cap,
                )
                self.root = root
                self.schedule_used = tuple(self.codec.slots[s] for s in slot_schedule)
                return self
            slot_schedule = greedy_schedule(
                X, y, sizes, candidate_slots, cfg.min_bucket, linear_slot=linear_slot
            )
        else:
            for feature in cfg.schedule:
                if self._slot_of(feature) not in candidate_slots:
                    raise ConfigError(f"schedule feature {feature!r} not in candidates")
            slot_schedule = [self._slot_of(f) for f in cfg.schedule]
        self.root = fit_level_tree(
            X, y, sizes, slot_schedule, cfg.min_bucket,
            leaf_model=cfg.leaf_model, linear_slot=linear_slot,
            stitch=cfg.monotone_surface_stitch, shared_thresholds=cfg.shared_thresholds,
        )
        self.schedule_used = tuple(self.codec.slots[s] for s in slot_schedule)
        return self

    # -- prediction ---------------------------------------------------------

    def predict_record(self, record) -> float:
        car, _trace = self.predict_explain(record)
        return car

    def predict_encoded_row(self, row: np.ndarray) -> float:
        self._require_fitted(self.root is not None)
        linear_slot = self.codec.slots.index("surface_m2")
        prediction, _steps, _leaf = predict_level_row(self.root, row, linear_slot)
        return prediction

    def predict_dataset(self, ds: Dataset) -> list[float]:
        self._require_fitted(self.root is not None)
        X, _ = self.codec.encode_dataset(ds)
        linear_slot = self.codec.slots.index("surface_m2")
        return list(predict_level_matrix(self.root, X, linear_slot))

    def predict_explain(self, record) -> tuple[float, ExplanationTrace]:
        self._require_fitted(self.root is not None)
        row = self.codec.encode(record)
        linear_slot = self.codec.slots.index("surface_m2")
        prediction, visited, leaf = predict_level_row(self.root, row, linear_slot)
        steps = tuple(
            TraceStep(
                level=node.level,
                feature=self.codec.slots[node.split.slot],
                rule=self._render_rule(node.split),
                branch="left" if went_left else "right",
            )
            for node, went_left in visited
        )
        trace = ExplanationTrace(
            steps=steps,
            leaf_id=leaf.path,
            alpha=leaf.alpha,
            beta=leaf.beta,
            surface_m2=float(row[linear_slot]),
            prediction=prediction,
        )
        return prediction, trace

    def _render_rule(self, split: SplitDecision) -> str:
        feature = self.codec.slots[split.slot]
        if split.kind == "num":
            return f"{feature} <= {_fmt(split.threshold)}"
        names = ", ".join(self.codec.decode_category(split.slot, c) for c in split.left_categories)
        return f"{feature} in {{{names}}}"

    # -- serialization ------------------------------------------------------

    def to_payload(self) -> dict:
        self._require_fitted(self.root is not None)
        return {
            "config": self.config.to_dict(),
            "codec": self.codec.to_jsonable(),
            "schedule_used": list(self.schedule_used),
            "tree": _level_node_to_dict(self.root),
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "ConstrainedTreeModel":
        model = cls(
            config=ConstrainedTreeConfig.from_dict(payload["config"]),
            codec=FeatureCodec.from_jsonable(payload["codec"]),
        )
        model.schedule_used = tuple(payload["schedule_used"])
        model.root = _level_node_from_dict(payload["tree"])
        return model


def _level_node_to_dict(node) -> dict:
    if node.is_leaf():
        return {"alpha": node.alpha, "beta": node.beta, "support": node.support, "path": node.path}
    return {
        "split": split_to_dict(node.split),
        "level": node.level,
        "left": _level_node_to_dict(node.left),
        "right": _level_node_to_dict(node.right),
    }


def _level_node_from_dict(d: dict):
    if "split" not in d:
        return Leaf(float(d["alpha"]), float(d["beta"]), int(d["support"]), d["path"])
    node = Node(split_from_dict(d["split"]), int(d["level"]))
    node.left = _level_node_from_dict(d["left"])
    node.right = _level_node_from_dict(d["right"])
    return node

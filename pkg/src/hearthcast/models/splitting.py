"""Squared-error split search shared by every tree in the package.

Candidate rules (pinned; the test suite re-derives them independently):

* numeric slot: midpoints of consecutive distinct sorted values; when a node
  holds more than 64 distinct values the candidates are instead the 64
  quantile cuts quantile(x, i/65) for i = 1..64 (linear interpolation),
  deduplicated by the left-side size they induce.
* categorical slot: categories present in the node are ordered by
  (mean target, code) ascending; candidates are the contiguous prefix
  partitions of that ordering (optimal for squared loss).
* a candidate is valid when both children hold at least min_leaf rows.
* child SSE is computed as (n * sum(y^2) - sum(y)^2) / n, in that exact
  operation order; a candidate's score is sse_left + sse_right.
* ties break to the lowest slot index, then the earliest candidate
  (ascending threshold / shortest prefix).
* a split is kept only if it reduces the node SSE by more than
  1e-12 * max(1, node_sse), so numerically-null gains never split.

Routing convention everywhere: value <= threshold goes left (closed-left);
a categorical value routes left iff its code is in the stored left subset.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

MAX_NUMERIC_CANDIDATES = 64
RELATIVE_GAIN_TOL = 1e-12


@dataclass(frozen=True)
class SplitDecision:
    slot: int
    kind: str  # "num" | "cat"
    threshold: float | None
    left_categories: tuple[int, ...] | None
    sse_before: float
    sse_after: float
    n_left: int
    n_right: int

    @property
    def gain(self) -> float:
        return self.sse_before - self.sse_after

    def goes_left(self, value: float) -> bool:
        if self.kind == "num":
            return value <= self.threshold
        return int(value) in self.left_categories


def node_sse(y: np.ndarray) -> float:
    """SSE of a constant (mean) fit, via the pinned formula."""
    n = y.size
    if n == 0:
        return 0.0
    s = float(np.sum(y))
    sq = float(np.sum(y * y))
    return max((n * sq - s * s) / n, 0.0)


def numeric_candidates(xs_sorted: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(thresholds, left_sizes) for a sorted numeric column."""
    n = xs_sorted.size
    distinct_steps = np.nonzero(xs_sorted[1:] != xs_sorted[:-1])[0]
    n_distinct = distinct_steps.size + 1
    if n_distinct <= 1:
        return np.empty(0), np.empty(0, dtype=int)
    if n_distinct <= MAX_NUMERIC_CANDIDATES:
        thresholds = (xs_sorted[distinct_steps] + xs_sorted[distinct_steps + 1]) / 2.0
        return thresholds, distinct_steps + 1
    probs = np.arange(1, MAX_NUMERIC_CANDIDATES + 1) / (MAX_NUMERIC_CANDIDATES + 1.0)
    cuts = np.quantile(xs_sorted, probs, method="linear")
    left_sizes = np.searchsorted(xs_sorted, cuts, side="right")
    keep_sizes, first = np.unique(left_sizes, return_index=True)
    mask = (keep_sizes >= 1) & (keep_sizes < n)
    return cuts[first[mask]], keep_sizes[mask]


def _scan_numeric(x: np.ndarray, y: np.ndarray, min_leaf: int):
    order = np.argsort(x, kind="stable")
    xs = x[order]
    ys = y[order]
    thresholds, left_sizes = numeric_candidates(xs)
    if thresholds.size == 0:
        return None
    n = ys.size
    cum = np.cumsum(ys)
    cumsq = np.cumsum(ys * ys)
    total_sum = cum[-1]
    total_sq = cumsq[-1]
    n_left = left_sizes.astype(float)
    n_right = n - n_left
    sum_left = cum[left_sizes - 1]
    sq_left = cumsq[left_sizes - 1]
    sse_left = (n_left * sq_left - sum_left * sum_left) / n_left
    sse_right = (n_right * (total_sq - sq_left) - (total_sum - sum_left) ** 2) / n_right
    score = sse_left + sse_right
    valid = (left_sizes >= min_leaf) & (n - left_sizes >= min_leaf)
    if not np.any(valid):
        return None
    score = np.where(valid, score, np.inf)
    best = int(np.argmin(score))  # first occurrence wins ties
    return (
        float(score[best]),
        float(thresholds[best]),
        None,
        int(left_sizes[best]),
        int(n - left_sizes[best]),
    )


def _scan_categorical(x: np.ndarray, y: np.ndarray, n_categories: int, min_leaf: int):
    codes = x.astype(int)
    cnt = np.bincount(codes, minlength=n_categories)
    sums = np.bincount(codes, weights=y, minlength=n_categories)
    sqs = np.bincount(codes, weights=y * y, minlength=n_categories)
    present = np.nonzero(cnt)[0]
    if present.size < 2:
        return None
    means = sums[present] / cnt[present]
    order = np.lexsort((present, means))  # mean ascending, then code
    ordered = present[order]
    c = cnt[ordered].astype(float)
    s = sums[ordered]
    q = sqs[ordered]
    cum_c = np.cumsum(c)
    cum_s = np.cumsum(s)
    cum_q = np.cumsum(q)
    n = cum_c[-1]
    total_s = cum_s[-1]
    total_q = cum_q[-1]
    n_left = cum_c[:-1]
    n_right = n - n_left
    sse_left = (n_left * cum_q[:-1] - cum_s[:-1] ** 2) / n_left
    sse_right = (n_right * (total_q - cum_q[:-1]) - (total_s - cum_s[:-1]) ** 2) / n_right
    score = sse_left + sse_right
    valid = (n_left >= min_leaf) & (n_right >= min_leaf)
    if not np.any(valid):
        return None
    score = np.where(valid, score, np.inf)
    best = int(np.argmin(score))
    left_categories = tuple(sorted(int(code) for code in ordered[: best + 1]))
    return (
        float(score[best]),
        None,
        left_categories,
        int(n_left[best]),
        int(n_right[best]),
    )


def best_split_on_slot(
    x: np.ndarray, y: np.ndarray, n_categories: int, min_leaf: int
) -> SplitDecision | None:
    """Best valid, gain-positive split of one column; None when there is none."""
    sse_before = node_sse(y)
    if n_categories == 0:
        found = _scan_numeric(x, y, min_leaf)
    else:
        found = _scan_categorical(x, y, n_categories, min_leaf)
    if found is None:
        return None
    score, threshold, left_categories, n_left, n_right = found
    if score >= sse_before - RELATIVE_GAIN_TOL * max(1.0, sse_before):
        return None
    return SplitDecision(
        slot=-1,
        kind="num" if n_categories == 0 else "cat",
        threshold=threshold,
        left_categories=left_categories,
        sse_before=sse_before,
        sse_after=score,
        n_left=n_left,
        n_right=n_right,
    )


def best_split(
    X: np.ndarray,
    y: np.ndarray,
    category_sizes: Sequence[int],
    min_leaf: int,
    slots: Sequence[int] | None = None,
) -> SplitDecision | None:
    """Best split over the given slots (all by default), lowest slot on ties."""
    chosen: SplitDecision | None = None
    scan = range(X.shape[1]) if slots is None else sorted(slots)
    for slot in scan:
        found = best_split_on_slot(X[:, slot], y, category_sizes[slot], min_leaf)
        if found is None:
            continue
        if chosen is None or found.sse_after < chosen.sse_after:
            chosen = SplitDecision(
                slot=slot,
                kind=found.kind,
                threshold=found.threshold,
                left_categories=found.left_categories,
                sse_before=found.sse_before,
                sse_after=found.sse_after,
                n_left=found.n_left,
                n_right=found.n_right,
            )
    return chosen


def split_to_dict(split: SplitDecision) -> dict:
    d = {
        "slot": split.slot,
        "kind": split.kind,
        "sse_before": split.sse_before,
        "sse_after": split.sse_after,
        "n_left": split.n_left,
        "n_right": split.n_right,
    }
    if split.kind == "num":
        d["threshold"] = split.threshold
    else:
        d["left_categories"] = list(split.left_categories)
    return d


def split_from_dict(d: dict) -> SplitDecision:
    return SplitDecision(
        slot=int(d["slot"]),
        kind=d["kind"],
        threshold=float(d["threshold"]) if d["kind"] == "num" else None,
        left_categories=tuple(int(c) for c in d["left_categories"]) if d["kind"] == "cat" else None,
        sse_before=float(d["sse_before"]),
        sse_after=float(d["sse_after"]),
        n_left=int(d["n_left"]),
        n_right=int(d["n_right"]),
    )

"""Deterministic pseudo-randomness for the whole package.

Everything random (train/test assignment, bootstrap resamples, feature
subsampling, synthetic data) is driven by splitmix64 so that results are
reproducible bit-for-bit across machines and reimplementable from this
docstring alone.

splitmix64 (Steele, Lea & Flood's SplittableRandom finalizer):

    state  = (state + 0x9E3779B97F4A7C15) mod 2**64
    z      = state
    z      = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) mod 2**64
    z      = ((z ^ (z >> 27)) * 0x94D049BB133111EB) mod 2**64
    output = z ^ (z >> 31)

Derived conventions used here (all documented, none clever):

* uniform in (0, 1):  ((output >> 11) + 0.5) * 2**-53
* integer below n:    output mod n  (modulo; bias is negligible for n << 2**64)
* shuffle:            Fisher-Yates from the top, j = randint_below(i + 1)
* stream derivation:  derive_seed(seed, k) = mix64((seed + (k + 1) * GOLDEN) mod 2**64)
  where mix64 is the z-finalizer above and GOLDEN = 0x9E3779B97F4A7C15
* standard normal:    inverse-CDF transform of uniform()
"""

from __future__ import annotations

from statistics import NormalDist

_MASK = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

_STD_NORMAL = NormalDist()


def mix64(z: int) -> int:
    """The splitmix64 output finalizer applied to a raw 64-bit value."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK
    return z ^ (z >> 31)


def derive_seed(seed: int, k: int) -> int:
    """Deterministic child seed for stream k of a parent seed.

    Independent of evaluation order, so per-item streams (tree #k,
    record #k) can be drawn concurrently with sequential-identical output.
    """
    return mix64((seed + (k + 1) * GOLDEN) & _MASK)


class SplitMix64:
    """Sequential splitmix64 stream."""

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + GOLDEN) & _MASK
        return mix64(self._state)

    def uniform(self) -> float:
        """Uniform float in the open interval (0, 1)."""
        return ((self.next_u64() >> 11) + 0.5) * 2.0**-53

    def randint_below(self, n: int) -> int:
        """Integer in [0, n) via modulo reduction."""
        if n <= 0:
            raise ValueError("n must be positive")
        return self.next_u64() % n

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randint_below(i + 1)
            items[i], items[j] = items[j], items[i]

    def normal(self) -> float:
        """Standard normal via inverse CDF of uniform()."""
        return _STD_NORMAL.inv_cdf(self.uniform())

    def sample_indices(self, k: int, n: int) -> list[int]:
        """k distinct indices from range(n), in shuffled-prefix order."""
        if k > n:
            raise ValueError("cannot sample more indices than available")
        pool = list(range(n))
        for i in range(k):
            j = i + self.randint_below(n - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]

    def choice_weighted(self, values: list, weights: list[float]):
        """Pick one value with probability proportional to its weight."""
        total = float(sum(weights))
        u = self.uniform() * total
        acc = 0.0
        for v, w in zip(values, weights):
            acc += w
            if u <= acc:
                return v
        return values[-1]

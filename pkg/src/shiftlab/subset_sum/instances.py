"""Subset-sum instance flavors and solution sets.

Solutions are bitmask ints: bit i set means weights[i] participates. The
ancilla functions here are the single source of truth for what "solution"
means; combination code and solvers all call check()/ancilla() rather than
reimplementing the floor arithmetic.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


@dataclass(frozen=True)
class ModularInstance:
    """Find all x in {0,1}^k with x.weights == target (mod 2^r)."""

    weights: tuple[int, ...]
    r: int
    target: int

    def __post_init__(self) -> None:
        if self.r < 1:
            raise ValueError("r must be >= 1")
        if not 0 <= self.target < (1 << self.r):
            raise ValueError("target must lie in [0, 2^r)")
        if any(w < 0 for w in self.weights):
            raise ValueError("weights must be nonnegative")
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))

    @property
    def k(self) -> int:
        return len(self.weights)

    @property
    def flavor(self) -> str:
        return "modular"

    def subset_sum(self, mask: int) -> int:
        total = 0
        for i, w in enumerate(self.weights):
            if (mask >> i) & 1:
                total += w
        return total

    def ancilla(self, mask: int) -> int:
        return self.subset_sum(mask) % (1 << self.r)

    def check(self, mask: int) -> bool:
        return self.ancilla(mask) == self.target

    def to_json(self) -> str:
        return json.dumps(
            {"flavor": "modular", "weights": list(self.weights), "r": self.r, "V": self.target}
        )


@dataclass(frozen=True)
class IntervalInstance:
    """Find all x with floor(x.weights * 2^(r-1) / B) == target.

    Equivalently x.weights in [lo, hi) with the exact integer bounds below;
    weights live in [0, B).
    """

    weights: tuple[int, ...]
    B: int
    r: int
    target: int

    def __post_init__(self) -> None:
        if self.r < 1:
            raise ValueError("r must be >= 1")
        if self.B < 1:
            raise ValueError("B must be >= 1")
        if any(not 0 <= w < self.B for w in self.weights):
            raise ValueError("weights must lie in [0, B)")
        if self.target < 0:
            raise ValueError("target must be >= 0")
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))

    @property
    def k(self) -> int:
        return len(self.weights)

    @property
    def flavor(self) -> str:
        return "interval"

    def bounds(self) -> tuple[int, int]:
        """The half-open integer interval of sums mapping to target."""
        scale = 1 << (self.r - 1)
        lo = _ceil_div(self.target * self.B, scale)
        hi = _ceil_div((self.target + 1) * self.B, scale)
        return lo, hi

    def subset_sum(self, mask: int) -> int:
        total = 0
        for i, w in enumerate(self.weights):
            if (mask >> i) & 1:
                total += w
        return total

    def ancilla(self, mask: int) -> int:
        return (self.subset_sum(mask) << (self.r - 1)) // self.B

    def check(self, mask: int) -> bool:
        lo, hi = self.bounds()
        return lo <= self.subset_sum(mask) < hi

    def to_json(self) -> str:
        return json.dumps(
            {
                "flavor": "interval",
                "weights": list(self.weights),
                "r": self.r,
                "B": self.B,
                "V": self.target,
            }
        )


Instance = ModularInstance | IntervalInstance


def instance_from_json(text: str) -> Instance:
    obj = json.loads(text)
    if obj["flavor"] == "modular":
        return ModularInstance(tuple(obj["weights"]), obj["r"], obj["V"])
    if obj["flavor"] == "interval":
        return IntervalInstance(tuple(obj["weights"]), obj["B"], obj["r"], obj["V"])
    raise ValueError(f"unknown flavor {obj['flavor']!r}")


def random_instance(
    flavor: str,
    k: int,
    r: int,
    rng: random.Random,
    B: int | None = None,
    plant: bool = True,
) -> Instance:
    """A random instance; with plant=True the target is the ancilla value of a
    uniformly drawn witness, which is how targets arise in the simulation."""
    if flavor == "modular":
        weights = tuple(rng.randrange(1 << r) for _ in range(k))
        inst = ModularInstance(weights, r, 0)
        if plant:
            target = inst.ancilla(rng.randrange(1 << k))
        else:
            target = rng.randrange(1 << r)
        return ModularInstance(weights, r, target)
    if flavor == "interval":
        if B is None:
            B = 1 << k
        weights = tuple(rng.randrange(B) for _ in range(k))
        inst = IntervalInstance(weights, B, r, 0)
        target = inst.ancilla(rng.randrange(1 << k))
        return IntervalInstance(weights, B, r, target)
    raise ValueError(f"unknown flavor {flavor!r}")


@dataclass(frozen=True)
class SolutionSet:
    """All solutions of one instance plus cost accounting."""

    solutions: frozenset[int]
    op_count: int
    mem_peak: int
    exhausted: bool = False  # probabilistic solver stopped on budget, not stability
    stats: dict = field(default_factory=dict, compare=False)

    def __len__(self) -> int:
        return len(self.solutions)

    def __contains__(self, mask: int) -> bool:
        return mask in self.solutions

    def masks(self) -> tuple[int, ...]:
        return tuple(sorted(self.solutions))

    def vectors(self, k: int) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple((m >> i) & 1 for i in range(k)) for m in self.masks())

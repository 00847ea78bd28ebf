"""Exact solvers: full enumeration and the two- and four-list merges."""

from __future__ import annotations

import numpy as np

from ..errors import BudgetExceededError, GuardError
from .instances import Instance, ModularInstance, SolutionSet
from .lists import (
    IntervalConstraint,
    OpCounter,
    PartialSumList,
    WindowConstraint,
    merge_join,
    subset_sums,
)

BRUTE_K_CAP = 30
_CHUNK_BITS = 18
# int64 partial sums must not overflow even when k weights stack up.
_SUM_SAFE_BITS = 62


def check_weight_magnitude(inst: Instance) -> None:
    top = max(inst.weights, default=0)
    if top and inst.k * top >= (1 << _SUM_SAFE_BITS):
        raise GuardError("weights too large for 64-bit partial sums")


def full_constraint(inst: Instance) -> WindowConstraint | IntervalConstraint:
    """The instance equation as a join constraint on total sums."""
    if isinstance(inst, ModularInstance):
        return WindowConstraint(inst.r, inst.target)
    lo, hi = inst.bounds()
    return IntervalConstraint(lo, hi)


def expected_solutions(inst: Instance) -> int:
    """Density estimate: expected solution count of a random instance."""
    if isinstance(inst, ModularInstance):
        return 1 << max(0, inst.k - inst.r)
    lo, hi = inst.bounds()
    span = sum(inst.weights) + 1
    return max(1, ((1 << inst.k) * (hi - lo)) // span)


def _raise_if_over(counter: OpCounter) -> None:
    if counter.over_budget():
        raise BudgetExceededError(
            f"operation budget {counter.budget} exceeded at {counter.ops}"
        )


def solve_bruteforce(inst: Instance, *, budget: int | None = None) -> SolutionSet:
    """Exact solution set by scanning all 2^k subset vectors.

    The operation count is 2^k by definition of the method. Enumeration is
    chunked: low-order positions are expanded once into a doubling table and
    reused under every assignment of the high-order positions.
    """
    if inst.k > BRUTE_K_CAP:
        raise GuardError(f"k={inst.k} exceeds brute-force cap {BRUTE_K_CAP}")
    check_weight_magnitude(inst)
    counter = OpCounter(budget=budget)
    low_bits = min(inst.k, _CHUNK_BITS)
    low = subset_sums(inst.weights[:low_bits])
    counter.bump_mem(len(low))
    high_weights = inst.weights[low_bits:]

    if isinstance(inst, ModularInstance):
        mod = np.int64(1 << inst.r)
        target = np.int64(inst.target)
    else:
        lo_bound, hi_bound = inst.bounds()

    found: list[int] = []
    for high in range(1 << (inst.k - low_bits)):
        base = sum(w for i, w in enumerate(high_weights) if (high >> i) & 1)
        sums = low + np.int64(base)
        if isinstance(inst, ModularInstance):
            hits = (sums % mod) == target
        else:
            hits = (sums >= lo_bound) & (sums < hi_bound)
        prefix = high << low_bits
        found.extend(prefix | int(m) for m in np.nonzero(hits)[0])
        counter.add(len(low))
        _raise_if_over(counter)
    counter.bump_mem(len(low) + len(found))
    return SolutionSet(
        frozenset(found),
        op_count=counter.ops,
        mem_peak=counter.mem_peak,
        exhausted=True,
        stats={"solver": "brute"},
    )


def _index_list(weights: tuple[int, ...], offset: int) -> PartialSumList:
    sums = subset_sums(weights)
    masks = np.arange(len(sums), dtype=np.int64) << offset
    return PartialSumList(sums, masks)


def solve_mitm(inst: Instance, *, budget: int | None = None) -> SolutionSet:
    """Exact set via one sorted join of the two position-half lists."""
    check_weight_magnitude(inst)
    counter = OpCounter(budget=budget)
    split = inst.k // 2
    a = _index_list(inst.weights[:split], 0)
    b = _index_list(inst.weights[split:], split)
    counter.bump_mem(len(a) + len(b))
    out = merge_join(a, b, full_constraint(inst), None, counter)
    _raise_if_over(counter)
    return SolutionSet(
        frozenset(int(m) for m in out.plus.tolist()),
        op_count=counter.ops,
        mem_peak=counter.mem_peak,
        exhausted=True,
        stats={"solver": "mitm"},
    )


def guess_bits(inst: Instance) -> int:
    """Width of the intermediate value guessed by the four-list merge."""
    t = (inst.k + 3) // 4
    if isinstance(inst, ModularInstance):
        t = min(t, inst.r)
    return max(1, t)


def solve_schroeppel_shamir(inst: Instance, *, budget: int | None = None) -> SolutionSet:
    """Exact set via four quarter lists and a swept intermediate value.

    For each guess g of the low t bits of the left-half sum, the two left
    quarters are joined under the point constraint g and the two right
    quarters under the complementary constraint, so only O(2^(k/4))-sized
    lists are ever held while the guesses sweep the whole space.
    """
    if inst.k < 4:
        raise GuardError("four-list merge needs k >= 4")
    check_weight_magnitude(inst)
    counter = OpCounter(budget=budget)
    k = inst.k
    half = k // 2
    q_split = half // 2
    r_split = half + (k - half) // 2
    quarters = [
        _index_list(inst.weights[:q_split], 0),
        _index_list(inst.weights[q_split:half], q_split),
        _index_list(inst.weights[half:r_split], half),
        _index_list(inst.weights[r_split:], r_split),
    ]
    base_mem = sum(len(q) for q in quarters)
    counter.bump_mem(base_mem)

    t = guess_bits(inst)
    mod = 1 << t
    final = full_constraint(inst)
    if isinstance(inst, ModularInstance):
        right_residue = lambda g: (inst.target - g) % mod
        right_count = 1
    else:
        lo_bound, hi_bound = inst.bounds()
        right_residue = lambda g: (lo_bound - g) % mod
        right_count = min(hi_bound - lo_bound, mod)

    found: set[int] = set()
    for g in range(mod):
        left = merge_join(quarters[0], quarters[1], WindowConstraint(t, g), None, counter)
        right = merge_join(
            quarters[2],
            quarters[3],
            WindowConstraint(t, right_residue(g), right_count),
            None,
            counter,
        )
        counter.bump_mem(base_mem + len(left) + len(right))
        out = merge_join(left, right, final, None, counter)
        found.update(int(m) for m in out.plus.tolist())
        _raise_if_over(counter)
    return SolutionSet(
        frozenset(found),
        op_count=counter.ops,
        mem_peak=counter.mem_peak,
        exhausted=True,
        stats={"solver": "ss", "guesses": mod},
    )

"""Solver that writes {0,1} solutions as sums of overlapping {-1,0,1} vectors.

A weight-w solution x splits as x = x1 + x2 where x1 carries ceil(w/2) of the
ones plus M extra +1/-1 cancelling pairs and x2 carries the rest; the many
ways of choosing the split mean a random low-bit constraint on x1's partial
sum keeps some representation of x alive with constant probability. Each
round draws fresh constraints, builds the candidate lists per weight class,
merges them with digit-consistency filtering, and the round loop stops once
the found set has been stable for three consecutive rounds.

Dense instances (many expected solutions) gain nothing from representations;
for those the solver drops to its minus_fraction = 0 degeneration, a plain
position split, which is exact and matches the two-list merge.
"""

from __future__ import annotations

import random
from functools import lru_cache

import numpy as np

from ..errors import GuardError, UsageError
from ..seeds import derive
from .instances import Instance, ModularInstance, SolutionSet
from .lists import (
    CONSISTENCY_BINARY,
    CONSISTENCY_TERNARY,
    IntervalConstraint,
    OpCounter,
    PartialSumList,
    WindowConstraint,
    merge_join,
)
from .solvers import (
    _index_list,
    _raise_if_over,
    check_weight_magnitude,
    expected_solutions,
    full_constraint,
)

REP_K_MIN = 8
DENSE_SOLUTION_CAP = 64
DEFAULT_MINUS_FRACTION = 1.0 / 16.0
_ROUND_TAG = 0x9E


@lru_cache(maxsize=None)
def _combo_masks(n: int, t: int) -> tuple[int, ...]:
    """All t-subsets of [0, n) as bitmasks, ascending (Gosper's hack)."""
    if t < 0 or t > n:
        return ()
    if t == 0:
        return (0,)
    out = []
    mask = (1 << t) - 1
    top = 1 << n
    while mask < top:
        out.append(mask)
        low = mask & -mask
        ripple = mask + low
        mask = ripple | (((mask ^ ripple) >> 2) // low)
    return tuple(out)


class _HalfEnumerator:
    """Cached ternary enumerations of one position half, grouped by profile."""

    def __init__(self, weights: tuple[int, ...], offset: int):
        self.weights = weights
        self.offset = offset
        self.n = len(weights)
        self._cache: dict[tuple[int, int], PartialSumList] = {}
        self.cells = 0

    def _mask_sums(self, masks: np.ndarray) -> np.ndarray:
        if len(masks) == 0 or self.n == 0:
            return np.zeros(len(masks), dtype=np.int64)
        bits = (masks[:, None] >> np.arange(self.n, dtype=np.int64)) & 1
        return bits @ np.asarray(self.weights, dtype=np.int64)

    def profile(self, p: int, m: int) -> PartialSumList:
        key = (p, m)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        empty = np.empty(0, dtype=np.int64)
        if p < 0 or m < 0 or p + m > self.n:
            lst = PartialSumList(empty, empty, empty)
        else:
            plus = np.asarray(_combo_masks(self.n, p), dtype=np.int64)
            minus = np.asarray(_combo_masks(self.n, m), dtype=np.int64)
            pr = np.repeat(plus, len(minus))
            mr = np.tile(minus, len(plus))
            keep = (pr & mr) == 0
            pr, mr = pr[keep], mr[keep]
            values = self._mask_sums(pr) - self._mask_sums(mr)
            lst = PartialSumList(values, pr << self.offset, mr << self.offset)
        self._cache[key] = lst
        self.cells += len(lst)
        return lst


def _build_profile_list(
    left: _HalfEnumerator,
    right: _HalfEnumerator,
    p: int,
    m: int,
    constraint: WindowConstraint,
    counter: OpCounter,
) -> PartialSumList:
    """All ternary vectors with p plus and m minus digits meeting the constraint."""
    chunks_v, chunks_p, chunks_m = [], [], []
    for pl in range(max(0, p - right.n), min(p, left.n) + 1):
        for ml in range(max(0, m - (right.n - (p - pl))), min(m, left.n - pl) + 1):
            a = left.profile(pl, ml)
            b = right.profile(p - pl, m - ml)
            if len(a) == 0 or len(b) == 0:
                continue
            joined = merge_join(a, b, constraint, None, counter)
            if len(joined):
                chunks_v.append(joined.values)
                chunks_p.append(joined.plus)
                chunks_m.append(joined.minus)
    if not chunks_v:
        e = np.empty(0, dtype=np.int64)
        return PartialSumList(e, e, e)
    return PartialSumList(
        np.concatenate(chunks_v), np.concatenate(chunks_p), np.concatenate(chunks_m)
    )


def _near_trivial_hits(inst: Instance, counter: OpCounter) -> set[int]:
    """Weight 0, 1, k-1, k vectors checked directly (too few representations)."""
    k = inst.k
    full = (1 << k) - 1
    candidates = [0, full]
    candidates += [1 << i for i in range(k)]
    candidates += [full ^ (1 << i) for i in range(k)]
    counter.add(len(candidates))
    return {mask for mask in candidates if inst.check(mask)}


def _window_for(inst: Instance, bits: int, taken: int) -> WindowConstraint:
    """Constraint on the complementary summand once `taken` is fixed mod 2^bits."""
    mod = 1 << bits
    if isinstance(inst, ModularInstance):
        return WindowConstraint(bits, (inst.target - taken) % mod)
    lo, hi = inst.bounds()
    return WindowConstraint(bits, (lo - taken) % mod, min(hi - lo, mod))


def solve_representation(
    inst: Instance,
    depth: int = 2,
    minus_fraction: float = DEFAULT_MINUS_FRACTION,
    *,
    seed: int = 0,
    budget: int | None = None,
    max_rounds: int = 64,
) -> SolutionSet:
    if inst.k < REP_K_MIN:
        raise GuardError(f"representation solver needs k >= {REP_K_MIN}")
    if depth not in (2, 3):
        raise UsageError("depth must be 2 or 3")
    if not 0 <= minus_fraction <= 0.5:
        raise UsageError("minus_fraction must lie in [0, 1/2]")
    check_weight_magnitude(inst)
    counter = OpCounter(budget=budget)
    k = inst.k

    if minus_fraction == 0 or expected_solutions(inst) > DENSE_SOLUTION_CAP:
        split = k // 2
        a = _index_list(inst.weights[:split], 0)
        b = _index_list(inst.weights[split:], split)
        counter.bump_mem(len(a) + len(b))
        out = merge_join(a, b, full_constraint(inst), None, counter)
        _raise_if_over(counter)
        return SolutionSet(
            frozenset(int(x) for x in out.plus.tolist()),
            op_count=counter.ops,
            mem_peak=counter.mem_peak,
            exhausted=True,
            stats={"solver": "rep", "mode": "degenerate", "rounds": 0},
        )

    h = k // 2
    left = _HalfEnumerator(inst.weights[:h], 0)
    right = _HalfEnumerator(inst.weights[h:], h)
    final = full_constraint(inst)
    m_pairs = max(1, round(minus_fraction * k))

    def _level2_list(rnd, p, m, t, c_top, point):
        """Depth-3 inner split: build xi = xi_a + xi_b under cumulative bits."""
        zeros = k - p - m
        m_sub = min(max(1, round(minus_fraction * k / 2)), zeros // 2) if zeros >= 2 else 0
        pa, ma = (p + 1) // 2 + m_sub, (m + 1) // 2 + m_sub
        pb, mb = p // 2 + m_sub, m // 2 + m_sub
        c_low = rnd.randrange(1 << t)
        la = _build_profile_list(left, right, pa, ma, WindowConstraint(t, c_low), counter)
        if point:
            bc = WindowConstraint(t, (c_top - c_low) % (1 << t))
            lc = WindowConstraint(2 * t, c_top)
        else:
            bc = _window_for(inst, t, c_top + c_low)
            lc = _window_for(inst, 2 * t, c_top)
        lb = _build_profile_list(left, right, pb, mb, bc, counter)
        return merge_join(la, lb, lc, CONSISTENCY_TERNARY, counter)

    def run_round(rnd) -> set[int]:
        hits: set[int] = set()
        for w in range(2, k - 1):
            m_w = min(m_pairs, (k - w) // 2)
            p1, m1 = (w + 1) // 2 + m_w, m_w
            p2, m2 = w // 2 + m_w, m_w
            if depth == 2:
                t1 = max(1, inst.r // 2)
                c1 = rnd.randrange(1 << t1)
                l1 = _build_profile_list(left, right, p1, m1, WindowConstraint(t1, c1), counter)
                l2 = _build_profile_list(left, right, p2, m2, _window_for(inst, t1, c1), counter)
            else:
                t = max(1, inst.r // 3)
                c_top = rnd.randrange(1 << (2 * t))
                l1 = _level2_list(rnd, p1, m1, t, c_top, point=True)
                l2 = _level2_list(rnd, p2, m2, t, c_top, point=False)

            out = merge_join(l1, l2, final, CONSISTENCY_BINARY, counter)
            hits.update(int(x) for x in out.plus.tolist())
            counter.bump_mem(left.cells + right.cells + len(l1) + len(l2) + len(out))
        return hits

    found = _near_trivial_hits(inst, counter)
    stable = 0
    rounds = 0
    while stable < 3 and rounds < max_rounds:
        rnd = random.Random(derive(seed, _ROUND_TAG, rounds))
        before = len(found)
        found |= run_round(rnd)
        rounds += 1
        stable = stable + 1 if len(found) == before else 0
        _raise_if_over(counter)

    return SolutionSet(
        frozenset(found),
        op_count=counter.ops,
        mem_peak=counter.mem_peak,
        exhausted=False,
        stats={
            "solver": "rep",
            "mode": "ternary",
            "rounds": rounds,
            "stable": stable >= 3,
            "depth": depth,
            "minus_fraction": minus_fraction,
        },
    )

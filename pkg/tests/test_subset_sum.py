"""Subset-sum instances, list joins, and the solver suite vs brute force."""

import json
import random

import pytest

from shiftlab.errors import BudgetExceededError, GuardError
from shiftlab.kinds import BRUTE, MEMLESS, MITM, REP, SS
from shiftlab.subset_sum import (
    IntervalInstance,
    ModularInstance,
    PartialSumList,
    WindowConstraint,
    instance_from_json,
    merge_join,
    random_instance,
    solve,
    solve_bruteforce,
    solve_memoryless,
    solve_mitm,
    solve_representation,
    solve_schroeppel_shamir,
)

from conftest import stream


def _enum(inst):
    """Independent quadratic-time reference enumeration."""
    return frozenset(m for m in range(1 << inst.k) if inst.check(m))


# -- instances ---------------------------------------------------------------


def test_modular_instance_basics():
    inst = ModularInstance((1, 2, 3), 2, 0)
    assert inst.k == 3 and inst.flavor == "modular"
    assert inst.subset_sum(0b101) == 4
    assert inst.ancilla(0b101) == 0
    assert inst.check(0b101) and not inst.check(0b001)


def test_modular_instance_validation():
    with pytest.raises(ValueError):
        ModularInstance((1, 2), 2, 4)  # target outside [0, 2^r)
    with pytest.raises(ValueError):
        ModularInstance((1, -2), 2, 0)
    with pytest.raises(ValueError):
        ModularInstance((1, 2), 0, 0)


def test_interval_instance_bounds():
    inst = IntervalInstance((3, 5, 6, 7), 8, 2, 2)
    # V = floor(2S/8): V=2 <=> S in [8, 12)
    assert inst.bounds() == (8, 12)
    assert inst.check(0b0011) and inst.subset_sum(0b0011) == 8
    assert not inst.check(0b1111)


def test_interval_instance_validation():
    with pytest.raises(ValueError):
        IntervalInstance((3, 9), 8, 2, 0)  # weight >= B
    with pytest.raises(ValueError):
        IntervalInstance((3, 5), 0, 2, 0)


def test_instance_json_roundtrip():
    for inst in (
        ModularInstance((5, 1, 7), 3, 6),
        IntervalInstance((3, 5, 6, 7), 8, 2, 2),
    ):
        twin = instance_from_json(inst.to_json())
        assert twin == inst
    with pytest.raises(ValueError):
        instance_from_json(json.dumps({"flavor": "nope"}))


def test_random_instance_planted_is_solvable():
    rng = stream("plant")
    for flavor in ("modular", "interval"):
        for _ in range(40):
            inst = random_instance(flavor, 8, 5, rng)
            assert len(_enum(inst)) >= 1


# -- merge_join --------------------------------------------------------------


def _plist(values):
    return PartialSumList(list(values), list(range(len(values))))


def test_merge_join_small_case():
    a = _plist([0, 1, 2])
    b = _plist([0, 1, 2])
    out = merge_join(a, b, WindowConstraint(2, 2), consistency=None)
    got = sorted((int(v), 0) for v in out.values)
    assert [v for v, _ in got] == [2, 2, 2]  # (0,2),(1,1),(2,0)


def test_merge_join_empty_input():
    a = PartialSumList([], [])
    b = _plist([0, 1, 2])
    assert len(merge_join(a, b, WindowConstraint(2, 0), consistency=None)) == 0


def test_merge_join_against_quadratic_scan():
    rng = stream("join")
    for trial in range(30):
        # masks below are single bits packed into int64 columns: keep na+nb < 63
        na, nb = rng.randrange(1, 31), rng.randrange(1, 31)
        va = [rng.randrange(512) for _ in range(na)]
        vb = [rng.randrange(512) for _ in range(nb)]
        t = rng.randrange(1, 8)
        residue = rng.randrange(1 << t)
        count = rng.randrange(1, (1 << t) + 1)
        cons = WindowConstraint(t, residue, count)
        a = PartialSumList(va, [1 << i for i in range(na)])
        b = PartialSumList(vb, [1 << (i + na) for i in range(nb)])
        out = merge_join(a, b, cons, consistency=None)
        expect = sorted(
            (x + y, (1 << i) | (1 << (j + na)))
            for i, x in enumerate(va)
            for j, y in enumerate(vb)
            if cons.matches(x + y)
        )
        got = sorted(zip(out.values.tolist(), out.plus.tolist()))
        assert got == expect, f"trial {trial}"


# -- exact solvers -----------------------------------------------------------


def test_bruteforce_examples():
    assert solve_bruteforce(ModularInstance((1, 2, 3), 2, 0)).solutions == frozenset({0, 5})
    all_zero = ModularInstance((0, 0, 0, 0), 1, 0)
    assert len(solve_bruteforce(all_zero).solutions) == 16
    parity = ModularInstance((2, 4, 6), 1, 1)
    assert solve_bruteforce(parity).solutions == frozenset()


def test_bruteforce_guard_and_budget():
    with pytest.raises(GuardError):
        solve_bruteforce(ModularInstance((0,) * 31, 1, 0))
    with pytest.raises(BudgetExceededError):
        solve_bruteforce(ModularInstance(tuple(range(20)), 4, 0), budget=10)


def test_ss_example():
    got = solve_schroeppel_shamir(ModularInstance((1, 2, 3, 4), 3, 3))
    assert got.solutions == frozenset({0b011, 0b100})


@pytest.mark.parametrize("solver", [solve_mitm, solve_schroeppel_shamir])
def test_exact_solvers_match_bruteforce(solver):
    rng = stream("exact", solver.__name__)
    for flavor in ("modular", "interval"):
        for _ in range(60):
            k = rng.randrange(8, 17)
            r = rng.randrange(2, k)
            inst = random_instance(flavor, k, r, rng)
            assert solver(inst).solutions == solve_bruteforce(inst).solutions


def test_ss_memory_scaling():
    """mem ~ 2^(k/4): fit the constant at k=16, check with headroom above."""
    rng = stream("ssmem")
    peaks = {}
    for k in (16, 20, 24):
        worst = 0
        for _ in range(6):
            inst = random_instance("modular", k, k - 1, rng)
            worst = max(worst, solve_schroeppel_shamir(inst).mem_peak)
        peaks[k] = worst
    c = peaks[16] / (2 ** (16 / 4) * 16)
    for k in (20, 24):
        assert peaks[k] <= 2.5 * c * 2 ** (k / 4) * k


# -- representation solver ---------------------------------------------------


def test_rep_zero_minus_fraction_degenerates_to_mitm():
    rng = stream("repmf0")
    for _ in range(25):
        inst = random_instance("modular", 12, rng.randrange(3, 12), rng)
        got = solve_representation(inst, depth=2, minus_fraction=0.0)
        assert got.solutions == solve_mitm(inst).solutions


def test_rep_exact_rate():
    rng = stream("reprate")
    hits = 0
    trials = 120
    for i in range(trials):
        k = rng.randrange(10, 21)
        r = rng.randrange(4, k)
        inst = random_instance("modular", k, r, rng)
        got = solve_representation(inst, seed=i)
        hits += got.solutions == solve_bruteforce(inst).solutions
    assert hits / trials >= 0.99


@pytest.mark.slow
def test_rep_planted_wide_instance():
    """Planted single solution beyond the brute-force width cap; ~2.5 min."""
    rng = stream("repplant")
    k, r = 32, 32
    weights = tuple(rng.randrange(1 << r) for _ in range(k))
    witness = rng.randrange(1 << k)
    probe = ModularInstance(weights, r, 0)
    inst = ModularInstance(weights, r, probe.ancilla(witness))
    got = solve_representation(inst, seed=3)
    assert witness in got.solutions


def test_rep_guards():
    with pytest.raises(GuardError):
        solve_representation(ModularInstance((1, 2, 3), 2, 0))


# -- memoryless solver -------------------------------------------------------


def test_memless_exact_rate():
    rng = stream("memrate")
    hits = 0
    trials = 80
    for i in range(trials):
        k = rng.randrange(8, 15)
        r = rng.randrange(3, k)
        inst = random_instance("modular", k, r, rng)
        got = solve_memoryless(inst, seed=i)
        hits += got.solutions == solve_bruteforce(inst).solutions
    assert hits / trials >= 0.95


def test_memless_zero_solutions():
    inst = ModularInstance((2, 4, 6, 8, 10, 12, 14, 16), 1, 1)
    assert solve_memoryless(inst, seed=0).solutions == frozenset()


def test_memless_memory_linear_in_k():
    rng = stream("memcells")
    for _ in range(10):
        k = rng.randrange(8, 15)
        inst = random_instance("modular", k, k - 2, rng)
        got = solve_memoryless(inst, seed=1)
        assert got.mem_peak <= 8 * k


# -- dispatch ----------------------------------------------------------------


def test_dispatch_routes_and_agrees():
    rng = stream("dispatch")
    inst = random_instance("modular", 10, 7, rng)
    expect = solve_bruteforce(inst).solutions
    assert solve(inst, BRUTE).solutions == expect
    assert solve(inst, SS).solutions == expect
    assert solve(inst, MITM).solutions == expect
    assert solve(inst, REP, seed=5).solutions == expect


def test_dispatch_budget_error():
    rng = stream("dispatchbudget")
    inst = random_instance("modular", 12, 9, rng)
    with pytest.raises(BudgetExceededError):
        solve(inst, MEMLESS, budget=3)


def test_dispatch_unknown_solver():
    rng = stream("dispatchbad")
    inst = random_instance("modular", 8, 5, rng)
    with pytest.raises(ValueError):
        solve(inst, "quantum")

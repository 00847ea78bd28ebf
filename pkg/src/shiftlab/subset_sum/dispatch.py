"""Single entry point routing an instance to a solver by identifier."""

from __future__ import annotations

from ..errors import UsageError
from ..kinds import BRUTE, MEMLESS, MITM, REP, SOLVERS, SS
from .instances import Instance, SolutionSet
from .memoryless import solve_memoryless
from .representation import solve_representation
from .solvers import solve_bruteforce, solve_mitm, solve_schroeppel_shamir


def solve(
    inst: Instance,
    solver_id: str = BRUTE,
    budget: int | None = None,
    *,
    seed: int = 0,
    **params,
) -> SolutionSet:
    """Run the named solver. Budget exhaustion raises; an empty set returns.

    Deterministic solvers ignore `seed`; probabilistic ones derive all their
    round and lane seeds from it. Extra keyword parameters are forwarded
    (depth / minus_fraction for the representation solver, walk_budget for
    the memoryless one).
    """
    if solver_id == BRUTE:
        return solve_bruteforce(inst, budget=budget, **params)
    if solver_id == MITM:
        return solve_mitm(inst, budget=budget, **params)
    if solver_id == SS:
        return solve_schroeppel_shamir(inst, budget=budget, **params)
    if solver_id == REP:
        return solve_representation(inst, budget=budget, seed=seed, **params)
    if solver_id == MEMLESS:
        return solve_memoryless(inst, budget=budget, seed=seed, **params)
    raise UsageError(f"unknown solver {solver_id!r}; expected one of {SOLVERS}")

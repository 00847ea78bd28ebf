"""Closed-form cost exponents for the four tradeoff regimes.

Costs are expressed in L-notation, L(x) = exp((x + o(1)) sqrt(n ln n)) with
the o(1) dropped: a point (q, t) means L(q) queries and L(t) time to leading
order. The single input is c, the exponent of the subset-sum solver used
inside the combination stages (time 2^{ck} at width k). The four regimes:

  improved    balanced widths tuned for minimum classical time at the
              baseline query law: (sqrt(c/2), sqrt(2c));
  minclass    increasing widths that equalize query and time: (sqrt(c),
              sqrt(c));
  quadgap     affine widths pinning time = 2 * query: (sqrt(c/3),
              2 sqrt(c/3));
  minquery    one full-width stage: poly(n^2) queries, 2^{cn} time.

The built-in report reproduces the two reference tables: classical solvers
(exhaustive c=1, list-merging c=0.291, its poly-memory variant c=0.72) and
quantum solvers (Grover c=0.5, quantum-walk c=0.241 and c=0.226). Memory is
poly for the exhaustive, Grover, and poly-memory-variant rows, L(query
exponent) for the other L-rows, and 2^{cn} for minquery rows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import GuardError, UsageError
from .kinds import MIN_CLASSICAL, MIN_QUERY, QUAD_GAP, UNIFORM_IMPROVED

MEM_POLY = "poly"
MEM_L = "L"
MEM_EXP = "2^cn"

QUERY_POLY_DEGREE = 2      # minquery regime: O(n^2) queries

# c values whose reference rows use polynomial memory (exhaustive search,
# the poly-memory list-merging variant, Grover).
_POLY_MEMORY_C = (1.0, 0.72, 0.5)


@dataclass(frozen=True)
class TradeoffPoint:
    """One (query, time) cost point at subset-sum exponent c.

    query_exp/time_exp are L-exponents except in the minquery regime, where
    queries are poly (query_exp 0, degree QUERY_POLY_DEGREE) and time is
    2^{time_linear * n} (time_exp 0). mem_kind is one of poly / L / 2^cn;
    mem_exp carries the L-exponent when mem_kind == L.
    """

    c: float
    strategy: str
    query_exp: float
    time_exp: float
    mem_kind: str
    mem_exp: float | None = None
    query_poly_degree: int | None = None
    time_linear: float | None = None

    def validate(self) -> None:
        assert self.query_exp >= 0 and self.time_exp >= 0
        if self.strategy == QUAD_GAP:
            assert self.time_exp == 2 * self.query_exp

    def memory_str(self) -> str:
        if self.mem_kind == MEM_POLY:
            return "poly"
        if self.mem_kind == MEM_L:
            return f"L({self.mem_exp:.3f})"
        return f"2^({self.c:g}n)"

    def query_str(self) -> str:
        if self.strategy == MIN_QUERY:
            return f"n^{self.query_poly_degree}"
        return f"L({self.query_exp:.3f})"

    def time_str(self) -> str:
        if self.strategy == MIN_QUERY:
            return f"2^({self.time_linear:g}n)"
        return f"L({self.time_exp:.3f})"

    def as_dict(self) -> dict:
        """Row form for machine output. L-exponents are numbers; the
        minquery regime has no L-exponents, so those fields go null and the
        query/time strings carry the polynomial and 2^{cn} forms."""
        is_mq = self.strategy == MIN_QUERY
        return {
            "c": self.c,
            "strategy": self.strategy,
            "query_exp": None if is_mq else self.query_exp,
            "time_exp": None if is_mq else self.time_exp,
            "query": self.query_str(),
            "time": self.time_str(),
            "memory": self.memory_str(),
        }


def _memory(c: float, strategy: str, query_exp: float, poly_memory: bool | None):
    if strategy == MIN_QUERY:
        if poly_memory or (poly_memory is None and c in _POLY_MEMORY_C):
            return MEM_POLY, None
        return MEM_EXP, None
    if poly_memory or (poly_memory is None and c in _POLY_MEMORY_C):
        return MEM_POLY, None
    return MEM_L, query_exp


def exponents(c: float, strategy: str, poly_memory: bool | None = None) -> TradeoffPoint:
    """The leading-order cost point for solver exponent c under a strategy.

    poly_memory overrides the memory column (some solvers trade exponent for
    polynomial memory); None infers it from the built-in table's c values.
    """
    if not 0 < c <= 1:
        raise GuardError(f"need 0 < c <= 1, got {c}")
    if strategy == UNIFORM_IMPROVED:
        q, t = math.sqrt(c / 2), math.sqrt(2 * c)
    elif strategy == MIN_CLASSICAL:
        q, t = math.sqrt(c), math.sqrt(c)
    elif strategy == QUAD_GAP:
        q = math.sqrt(c / 3)
        t = 2 * q
    elif strategy == MIN_QUERY:
        mem_kind, mem_exp = _memory(c, strategy, 0.0, poly_memory)
        pt = TradeoffPoint(
            c, strategy, 0.0, 0.0, mem_kind, mem_exp,
            query_poly_degree=QUERY_POLY_DEGREE, time_linear=c,
        )
        pt.validate()
        return pt
    else:
        raise UsageError(f"unknown strategy {strategy!r}")
    mem_kind, mem_exp = _memory(c, strategy, q, poly_memory)
    pt = TradeoffPoint(c, strategy, q, t, mem_kind, mem_exp)
    pt.validate()
    return pt


@dataclass(frozen=True)
class TableRow:
    table: str            # "hidden-shift" (classical time) | "purely-quantum"
    solver: str
    point: TradeoffPoint


# (c, solver description, poly_memory) per reference solver family.
_CLASSICAL_SOLVERS = (
    (1.0, "exhaustive search", True),
    (0.291, "list merging (representations)", False),
    (0.72, "list merging, poly memory", True),
)
_QUANTUM_SOLVERS = (
    (0.5, "Grover search", True),
    (0.241, "quantum walk", False),
    (0.226, "quantum walk (improved)", False),
)


def table_report() -> list[TableRow]:
    """Every row of the two built-in cost tables.

    The classical table covers {improved, minclass, quadgap} at c=1 and
    {minclass, quadgap} at c=0.291 and 0.72, plus the minquery row at
    c=0.291. The quantum table covers {improved, minclass, minquery} for
    Grover and {quadgap, minclass, minquery} for the two quantum-walk
    exponents.
    """
    rows: list[TableRow] = []

    def add(table: str, solver: str, c: float, strategy: str, poly_memory: bool) -> None:
        rows.append(TableRow(table, solver, exponents(c, strategy, poly_memory)))

    c1, c291, c72 = _CLASSICAL_SOLVERS
    for strat in (UNIFORM_IMPROVED, MIN_CLASSICAL, QUAD_GAP):
        add("hidden-shift", c1[1], c1[0], strat, c1[2])
    for c, solver, poly in (c291, c72):
        for strat in (MIN_CLASSICAL, QUAD_GAP):
            add("hidden-shift", solver, c, strat, poly)
    add("hidden-shift", c291[1], c291[0], MIN_QUERY, c291[2])

    grover, walk, walk2 = _QUANTUM_SOLVERS
    for strat in (UNIFORM_IMPROVED, MIN_CLASSICAL, MIN_QUERY):
        add("purely-quantum", grover[1], grover[0], strat, grover[2])
    for c, solver, poly in (walk, walk2):
        for strat in (QUAD_GAP, MIN_CLASSICAL, MIN_QUERY):
            add("purely-quantum", solver, c, strat, poly)
    return rows


REPORT_FOOTNOTE = (
    "improved-tradeoff query exponents are conservative upper bounds; "
    "they are not known to be tight"
)


def render_report(rows: list[TableRow] | None = None) -> str:
    """Plain-text rendering of table_report, exponents rounded to 3 decimals."""
    if rows is None:
        rows = table_report()
    out = []
    for table in ("hidden-shift", "purely-quantum"):
        sub = [r for r in rows if r.table == table]
        time_col = "classical time" if table == "hidden-shift" else "quantum time"
        out.append(f"[{table}]  query / {time_col} / memory")
        for r in sub:
            p = r.point
            out.append(
                f"  c={p.c:<5g} {p.strategy:<9} {p.query_str():>9} "
                f"{p.time_str():>9} {p.memory_str():>9}  ({r.solver})"
            )
    out.append(f"note: {REPORT_FOOTNOTE}")
    return "\n".join(out)

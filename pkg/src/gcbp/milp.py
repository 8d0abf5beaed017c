"""Exact mixed-integer optimization by branch and bound on rational LP relaxations.

This stands in for the fixed-dimension integer programming algorithms the
approximation scheme relies on.  Optima are identical; there is no
polynomial running-time certificate, so the node budget is an explicit,
reported limit rather than a silent approximation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .core import GcbpError
from .rational_lp import LpModel, LpSolution, Relation, Status, solve_lp

__all__ = ["BudgetExceeded", "MilpModel", "NodeCounter", "DEFAULT_NODE_BUDGET", "solve_milp", "solve_ip"]

DEFAULT_NODE_BUDGET = 10**6


class BudgetExceeded(GcbpError):
    """The node budget ran out before optimality was proven."""

    def __init__(self, message: str, incumbent: LpSolution | None = None):
        super().__init__(message)
        self.incumbent = incumbent


@dataclass
class NodeCounter:
    """Budget shared by several solves (the APTAS driver passes one around)."""

    budget: int = DEFAULT_NODE_BUDGET
    used: int = 0

    def charge(self, k: int = 1) -> None:
        self.used += k
        if self.used > self.budget:
            raise BudgetExceeded(f"node budget {self.budget} exhausted")


@dataclass
class MilpModel:
    base: LpModel
    integer_vars: frozenset[int] = frozenset()
    upper_bounds: Mapping[int, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        self.integer_vars = frozenset(self.integer_vars)
        bad = [j for j in self.integer_vars if not 0 <= j < self.base.num_vars]
        if bad:
            raise ValueError(f"integer variable indices out of range: {bad}")


def _with_bounds(base: LpModel, bounds: Mapping[int, tuple[int | None, int | None]]) -> LpModel:
    m = LpModel(base.num_vars, list(base.objective), list(base.constraints))
    for j, (lo, hi) in sorted(bounds.items()):
        if lo is not None and lo > 0:
            m.add_constraint({j: 1}, Relation.GE, lo)
        if hi is not None:
            m.add_constraint({j: 1}, Relation.LE, hi)
    return m


def solve_milp(
    m: MilpModel,
    budget: int | NodeCounter | None = None,
    cutoff: Fraction | None = None,
) -> LpSolution:
    """Optimum with ``m.integer_vars`` integral.

    Depth-first branch and bound, branching on the lowest-index fractional
    integer variable, floor child first.  A node is pruned once its LP bound
    reaches the incumbent (or ``cutoff``), so when ``cutoff`` is given the
    result is Infeasible unless some solution is strictly cheaper than it.
    """
    counter = budget if isinstance(budget, NodeCounter) else NodeCounter(
        DEFAULT_NODE_BUDGET if budget is None else budget
    )
    root_bounds: dict[int, tuple[int | None, int | None]] = {}
    for j, ub in m.upper_bounds.items():
        hi = math.floor(Fraction(ub)) if j in m.integer_vars else None
        root_bounds[j] = (None, hi)
    extra = LpModel(m.base.num_vars, list(m.base.objective), list(m.base.constraints))
    for j, ub in m.upper_bounds.items():
        if j not in m.integer_vars:
            extra.add_constraint({j: 1}, Relation.LE, ub)

    best: LpSolution | None = None
    best_val = cutoff
    saw_unbounded = False
    stack = [root_bounds]
    while stack:
        bounds = stack.pop()
        try:
            counter.charge()
        except BudgetExceeded as exc:
            exc.incumbent = best
            raise
        sol = solve_lp(_with_bounds(extra, bounds))
        if sol.status is Status.INFEASIBLE:
            continue
        if sol.status is Status.UNBOUNDED:
            saw_unbounded = True
            break
        if best_val is not None and sol.objective_value >= best_val:
            continue
        frac = next(
            (j for j in sorted(m.integer_vars) if sol.values[j].denominator != 1), None
        )
        if frac is None:
            best, best_val = sol, sol.objective_value
            continue
        v = sol.values[frac]
        lo, hi = bounds.get(frac, (None, None))
        down = dict(bounds)
        down[frac] = (lo, math.floor(v))
        up = dict(bounds)
        up[frac] = (math.ceil(v), hi)
        stack.append(up)
        stack.append(down)
    if saw_unbounded:
        return LpSolution(Status.UNBOUNDED)
    if best is None:
        return LpSolution(Status.INFEASIBLE)
    return best


def solve_ip(
    m: MilpModel, budget: int | NodeCounter | None = None, cutoff: Fraction | None = None
) -> LpSolution:
    if m.integer_vars != frozenset(range(m.base.num_vars)):
        raise ValueError("solve_ip requires every variable to be integer")
    return solve_milp(m, budget, cutoff)

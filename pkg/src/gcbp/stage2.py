"""Dense-instance packing.

Large items (size >= eps) are linearly grouped; the first group goes to
dedicated bins and the rest are rounded up to their group maximum.  Bin
costs are rounded up to powers of ``1 + eps``.  A configuration MILP, with
integrality only on the expensive configurations, places large-item
positions and fractional small-item shares; its bin counters are rounded
up, small items are re-assigned by a basic solution of a feasibility LP,
and the few fractionally assigned ones go to overflow bins of at most
``1/eps`` items.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .core import CostFunction, GcbpError, Instance, Packing, check_epsilon, sort_key
from .milp import MilpModel, NodeCounter, solve_milp
from .rational_lp import LpModel, Relation, Status, find_basic_feasible
from .stage1 import class_cardinalities

__all__ = [
    "InternalInfeasible",
    "RoundedCost",
    "LinearGrouping",
    "DenseConfiguration",
    "DenseMilpSolution",
    "DenseBin",
    "SmallAssignment",
    "Stage2Result",
    "round_cost_function",
    "split_small_large",
    "linear_group_large",
    "expensive_threshold_factor",
    "dense_cost_floor",
    "enumerate_dense_configurations",
    "build_and_solve_dense_milp",
    "open_bins",
    "assign_small_items_lp",
    "finalize_dense_packing",
    "pack_dense",
]


class InternalInfeasible(GcbpError):
    """The small-item LP was infeasible; upstream output broke an invariant."""


@dataclass(frozen=True)
class RoundedCost:
    g: tuple[Fraction, ...]
    cost_levels: tuple[Fraction, ...]
    level_max_cards: tuple[int, ...]
    inverse: dict = field(hash=False, compare=False)

    def __call__(self, j: int) -> Fraction:
        return self.g[j]


def round_cost_function(f: CostFunction, epsilon) -> RoundedCost:
    """Round every ``f(j)``, ``j >= 1``, up to the next integer power of ``1 + eps``."""
    check_epsilon(epsilon)
    base = 1 + Fraction(epsilon)
    g = [Fraction(0)]
    power = Fraction(1)
    for j in range(1, f.n + 1):
        while power < f.table[j]:
            power *= base
        g.append(power)
    inverse: dict[Fraction, int] = {}
    for j in range(1, f.n + 1):
        inverse[g[j]] = j
    levels = tuple(sorted(inverse))
    return RoundedCost(tuple(g), levels, tuple(inverse[y] for y in levels), inverse)


def split_small_large(
    inst: Instance, item_ids: Sequence[int], epsilon
) -> tuple[list[int], list[int]]:
    """Large items sorted by size (ties by id); small items in id order."""
    eps = Fraction(epsilon)
    large = sorted((i for i in item_ids if inst.size(i) >= eps), key=sort_key(inst))
    small = sorted(i for i in item_ids if inst.size(i) < eps)
    return large, small


@dataclass(frozen=True)
class LinearGrouping:
    dedicated: tuple[int, ...]
    classes: tuple[tuple[int, ...], ...]
    rounded_sizes: tuple[Fraction, ...]
    sizes: tuple[Fraction, ...]
    counts: tuple[int, ...]

    def rounded_items(self) -> dict[Fraction, list[int]]:
        """Items of the rounded instance grouped by rounded size."""
        out: dict[Fraction, list[int]] = {}
        for cls, z in zip(self.classes, self.rounded_sizes):
            if cls:
                out.setdefault(z, []).extend(cls)
        return out


def linear_group_large(inst: Instance, large: Sequence[int], epsilon) -> LinearGrouping:
    """Cut the sorted large items into ``1/eps**3`` near-equal classes.

    The first class is returned separately (it is packed one item per bin);
    each later class is rounded up to its largest size.  ``sizes`` is the
    set of distinct rounded sizes, largest first, and ``counts`` how many
    rounded items carry each.
    """
    inv = check_epsilon(epsilon)
    K = inv**3
    order = sorted(large, key=sort_key(inst))
    cards = class_cardinalities(len(order), K)
    groups = []
    start = 0
    for c in cards:
        groups.append(tuple(order[start : start + c]))
        start += c
    rest = groups[1:]
    rounded = tuple(inst.size(cls[0]) if cls else Fraction(0) for cls in rest)
    tally: dict[Fraction, int] = {}
    for cls, z in zip(rest, rounded):
        if cls:
            tally[z] = tally.get(z, 0) + len(cls)
    sizes = tuple(sorted(tally, reverse=True))
    return LinearGrouping(groups[0], tuple(rest), rounded, sizes, tuple(tally[z] for z in sizes))


def expensive_threshold_factor(epsilon) -> Fraction:
    """Configurations costing more than this factor times the cost cap are expensive."""
    inv = check_epsilon(epsilon)
    eps = Fraction(1, inv)
    return eps * eps / Fraction(inv + 1) ** (inv**3 - 1)


def dense_cost_floor(rc: RoundedCost, epsilon) -> Fraction | None:
    """Cheapest rounded cost a dense bin can have; None if no dense bin fits in n items."""
    inv = check_epsilon(epsilon)
    j = inv * inv + 1
    return rc.g[j] if j < len(rc.g) else None


@dataclass(frozen=True)
class DenseConfiguration:
    large_counts: tuple[int, ...]
    bin_cost: Fraction
    expensive: bool

    def large_load(self, sizes: Sequence[Fraction]) -> Fraction:
        return sum((z * c for z, c in zip(sizes, self.large_counts)), Fraction(0))


def enumerate_dense_configurations(
    sizes: Sequence[Fraction],
    counts: Sequence[int],
    cost_cap: Fraction,
    rc: RoundedCost,
    epsilon,
) -> list[DenseConfiguration]:
    floor = dense_cost_floor(rc, epsilon)
    if floor is None:
        return []
    expensive_above = expensive_threshold_factor(epsilon) * cost_cap
    out = []
    for bin_cost in rc.cost_levels:
        if bin_cost < floor or bin_cost > cost_cap:
            continue
        room = rc.inverse[bin_cost]
        for large_counts in _gammas(sizes, counts, room):
            out.append(DenseConfiguration(large_counts, bin_cost, bin_cost > expensive_above))
    return out


def _gammas(sizes, counts, room, idx=0, load=Fraction(0)):
    if idx == len(sizes):
        yield ()
        return
    c = 0
    while c <= counts[idx] and c <= room and load + c * sizes[idx] <= 1:
        for rest in _gammas(sizes, counts, room - c, idx + 1, load + c * sizes[idx]):
            yield (c,) + rest
        c += 1


@dataclass(frozen=True)
class DenseMilpSolution:
    configs: tuple[DenseConfiguration, ...]
    bin_counts: tuple[Fraction, ...]
    small_shares: dict = field(hash=False, compare=False)
    bin_counts_rounded: tuple[int, ...]
    objective: Fraction
    supplementary_cost: Fraction
    supplementary_bins: int


def build_and_solve_dense_milp(
    inst: Instance,
    configs: Sequence[DenseConfiguration],
    grouping: LinearGrouping,
    small: Sequence[int],
    rc: RoundedCost,
    budget: int | NodeCounter | None = None,
) -> DenseMilpSolution | None:
    """Solve the configuration MILP; None when this cost cap admits no packing.

    Variables: one bin counter per configuration, then one share per
    (small item, configuration).  Counters of cheap configurations are
    continuous; rounding them up afterwards adds at most one supplementary
    bin each.
    """
    C = len(configs)
    S = len(small)
    sizes = grouping.sizes
    model = LpModel(C + S * C, [cfg.bin_cost for cfg in configs] + [Fraction(0)] * (S * C))

    def w(si: int, c: int) -> int:
        return C + si * C + c

    for zi, nz in enumerate(grouping.counts):
        model.add_constraint(
            {c: cfg.large_counts[zi] for c, cfg in enumerate(configs) if cfg.large_counts[zi]},
            Relation.GE,
            nz,
        )
    for si in range(S):
        model.add_constraint({w(si, c): 1 for c in range(C)}, Relation.GE, 1)
    for c, cfg in enumerate(configs):
        slots = rc.inverse[cfg.bin_cost] - sum(cfg.large_counts)
        row = {w(si, c): 1 for si in range(S)}
        row[c] = -Fraction(slots) if slots else Fraction(0)
        model.add_constraint(row, Relation.LE, 0)
        space = 1 - cfg.large_load(sizes)
        row = {w(si, c): inst.size(i) for si, i in enumerate(small)}
        row[c] = -space
        model.add_constraint(row, Relation.LE, 0)
    integer = frozenset(c for c, cfg in enumerate(configs) if cfg.expensive)
    sol = solve_milp(MilpModel(model, integer), budget)
    if sol.status is not Status.OPTIMAL:
        return None
    v = sol.values[:C]
    ws = {
        (i, c): sol.values[w(si, c)]
        for si, i in enumerate(small)
        for c in range(C)
        if sol.values[w(si, c)]
    }
    bin_counts_rounded = tuple(math.ceil(x) for x in v)
    supp = [c for c, x in enumerate(v) if x.denominator != 1]
    return DenseMilpSolution(
        tuple(configs),
        v,
        ws,
        bin_counts_rounded,
        sol.objective_value,
        sum((configs[c].bin_cost for c in supp), Fraction(0)),
        len(supp),
    )


@dataclass
class DenseBin:
    config: DenseConfiguration
    items: list[int]
    free_space: Fraction
    free_slots: int


def open_bins(
    inst: Instance, milp: DenseMilpSolution, grouping: LinearGrouping, rc: RoundedCost
) -> list[DenseBin]:
    """One bin per rounded-up counter, large items filled into configuration slots."""
    sizes = grouping.sizes
    queues = grouping.rounded_items()
    heads = {z: 0 for z in sizes}
    bins = []
    for cfg, mult in zip(milp.configs, milp.bin_counts_rounded):
        for _ in range(mult):
            items = []
            for z, gz in zip(sizes, cfg.large_counts):
                take = queues[z][heads[z] : heads[z] + gz]
                heads[z] += len(take)
                items.extend(take)
            bins.append(
                DenseBin(
                    cfg,
                    items,
                    1 - cfg.large_load(sizes),
                    rc.inverse[cfg.bin_cost] - sum(cfg.large_counts),
                )
            )
    if any(heads[z] != len(queues[z]) for z in sizes):
        raise InternalInfeasible("configuration slots do not cover the large items")
    return bins


@dataclass(frozen=True)
class SmallAssignment:
    shares: dict = field(hash=False, compare=False)
    num_constraints: int
    support: int


def assign_small_items_lp(
    inst: Instance, bins: Sequence[DenseBin], small: Sequence[int]
) -> SmallAssignment:
    """Basic feasible fractional assignment of small items to opened bins."""
    B = len(bins)
    S = len(small)
    if S == 0:
        return SmallAssignment({}, 2 * B, 0)
    model = LpModel(S * B)

    def shares(si: int, b: int) -> int:
        return si * B + b

    for b, bn in enumerate(bins):
        model.add_constraint({shares(si, b): 1 for si in range(S)}, Relation.LE, bn.free_slots)
        model.add_constraint(
            {shares(si, b): inst.size(i) for si, i in enumerate(small)}, Relation.LE, bn.free_space
        )
    for si in range(S):
        model.add_constraint({shares(si, b): 1 for b in range(B)}, Relation.EQ, 1)
    sol = find_basic_feasible(model)
    if sol.status is not Status.OPTIMAL:
        raise InternalInfeasible("small-item assignment LP is infeasible")
    values = {
        (i, b): sol.values[shares(si, b)]
        for si, i in enumerate(small)
        for b in range(B)
        if sol.values[shares(si, b)]
    }
    return SmallAssignment(values, len(model.constraints), len(values))


def finalize_dense_packing(
    bins: Sequence[DenseBin],
    assignment: SmallAssignment,
    small: Sequence[int],
    dedicated: Sequence[int],
    epsilon,
) -> tuple[Packing, list[int], int]:
    """Integral shares go to their bin; fractional items to overflow bins.

    Returns the packing, the removed (fractional) items and the number of
    overflow bins.  Empty bins are dropped.
    """
    inv = check_epsilon(epsilon)
    contents = [list(bn.items) for bn in bins]
    removed = []
    for i in small:
        whole = [b for (j, b), x in assignment.shares.items() if j == i and x == 1]
        if whole:
            contents[whole[0]].append(i)
        else:
            removed.append(i)
    overflow = [tuple(removed[k : k + inv]) for k in range(0, len(removed), inv)]
    out = [tuple(sorted(c)) for c in contents if c]
    out += overflow
    out += [(i,) for i in dedicated]
    return Packing(tuple(out)), removed, len(overflow)


@dataclass(frozen=True)
class Stage2Result:
    packing: Packing
    cost_cap: Fraction | None
    milp_objective: Fraction
    supplementary_cost: Fraction
    supplementary_bins: int
    opened_bins: int
    removed_items: int
    overflow_bins: int
    dedicated_count: int
    num_configs: int
    num_expensive: int
    lp_support: int
    lp_constraints: int


def pack_dense(
    inst: Instance,
    dense_ids: Sequence[int],
    epsilon,
    cost_cap: Fraction | None,
    rc: RoundedCost | None = None,
    budget: int | NodeCounter | None = None,
) -> Stage2Result | None:
    """Pack ``dense_ids`` under the rounded-cost cap ``cost_cap``; None if infeasible.

    When nothing is left after the dedicated first class, no model is built
    and ``cost_cap`` is irrelevant.
    """
    if rc is None:
        rc = round_cost_function(inst.cost, epsilon)
    large, small = split_small_large(inst, dense_ids, epsilon)
    grouping = linear_group_large(inst, large, epsilon)
    if not small and not grouping.sizes:
        return Stage2Result(
            Packing(tuple((i,) for i in grouping.dedicated)),
            None, Fraction(0), Fraction(0), 0, 0, 0, 0,
            len(grouping.dedicated), 0, 0, 0, 0,
        )
    if cost_cap is None:
        raise ValueError("a non-empty rounded instance needs a cost cap cost_cap")
    configs = enumerate_dense_configurations(grouping.sizes, grouping.counts, cost_cap, rc, epsilon)
    if not configs:
        return None
    milp = build_and_solve_dense_milp(inst, configs, grouping, small, rc, budget)
    if milp is None:
        return None
    bins = open_bins(inst, milp, grouping, rc)
    assignment = assign_small_items_lp(inst, bins, small)
    packing, removed, overflow = finalize_dense_packing(
        bins, assignment, small, grouping.dedicated, epsilon
    )
    return Stage2Result(
        packing,
        cost_cap,
        milp.objective,
        milp.supplementary_cost,
        milp.supplementary_bins,
        len(bins),
        len(removed),
        overflow,
        len(grouping.dedicated),
        len(configs),
        sum(1 for c in configs if c.expensive),
        assignment.support,
        assignment.num_constraints,
    )

"""The full approximation scheme: sparse guesses x stage 1 x stage 2, cheapest wins."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .classify import minimizer_k
from .core import GcbpError, Instance, Packing, check_epsilon, packing_cost, sort_key, verify_packing
from .milp import DEFAULT_NODE_BUDGET, BudgetExceeded, NodeCounter
from .stage1 import (
    Breakpoint,
    SparseGuess,
    build_classes,
    class_cardinalities,
    enumerate_sparse_configurations,
    enumerate_sparse_guesses,
    pack_sparse,
    solve_sparse_ip,
)
from .stage2 import (
    RoundedCost,
    Stage2Result,
    dense_cost_floor,
    linear_group_large,
    pack_dense,
    round_cost_function,
    split_small_large,
)

__all__ = ["AptasCertificate", "AptasBudgetExceeded", "aptas", "lower_bound", "additive_term"]

log = logging.getLogger(__name__)


class AptasBudgetExceeded(BudgetExceeded):
    """Budget ran out; ``packing``/``certificate`` hold the best verified solution so far."""

    def __init__(self, message: str, packing: Packing | None, certificate: "AptasCertificate"):
        super().__init__(message)
        self.packing = packing
        self.certificate = certificate


@dataclass
class AptasCertificate:
    epsilon: Fraction
    guess_sparse_count: int | None = None
    guess_breakpoints: list | None = None
    guess_signature: list | None = None
    stage1_cost: Fraction = Fraction(0)
    stage1_ip_objective: Fraction = Fraction(0)
    cost_cap: Fraction | None = None
    stage2_cost: Fraction = Fraction(0)
    stage2: dict[str, Any] = field(default_factory=dict)
    total_cost: Fraction = Fraction(0)
    reference: Fraction | None = None
    reference_kind: str = "lower_bound"
    bound_rhs: Fraction | None = None
    counters: dict[str, int] = field(default_factory=dict)
    budget_exhausted: bool = False

    def to_dict(self) -> dict[str, Any]:
        def q(x):
            return None if x is None else str(x)

        return {
            "epsilon": q(self.epsilon),
            "guess": {
                "sparse_count": self.guess_sparse_count,
                "breakpoints": self.guess_breakpoints,
                "classes": self.guess_signature,
            },
            "stage1_cost": q(self.stage1_cost),
            "stage1_ip_objective": q(self.stage1_ip_objective),
            "cost_cap": q(self.cost_cap),
            "stage2_cost": q(self.stage2_cost),
            "stage2": {k: q(v) if isinstance(v, Fraction) else v for k, v in self.stage2.items()},
            "total_cost": q(self.total_cost),
            "reference": q(self.reference),
            "reference_kind": self.reference_kind,
            "bound_rhs": q(self.bound_rhs),
            "counters": dict(self.counters),
            "budget_exhausted": self.budget_exhausted,
        }


def lower_bound(inst: Instance) -> Fraction:
    """max(n * min_j f(j)/j, ceil(total size)) -- both bound every packing's cost."""
    if inst.n == 0:
        return Fraction(0)
    cls = minimizer_k(inst.cost)
    per_item = inst.n * cls.f_over_j[cls.k - 1]
    total = sum(inst.sizes, Fraction(0))
    return max(per_item, Fraction(-(-total.numerator // total.denominator)))


def additive_term(inst: Instance, epsilon, rc: RoundedCost | None = None) -> Fraction:
    """``2 + g(1/eps)``, with ``1/eps`` capped at n where f is undefined beyond."""
    inv = check_epsilon(epsilon)
    if rc is None:
        rc = round_cost_function(inst.cost, epsilon)
    return 2 + rc.g[min(inv, inst.n)]


def _all_sparse_guess(inst: Instance, epsilon) -> SparseGuess | None:
    inv = check_epsilon(epsilon)
    K = inv**3
    order = sorted(inst.ids(), key=sort_key(inst))
    cards = class_cardinalities(inst.n, K)
    breakpoints: list[Breakpoint | None] = [None]
    start = 0
    for c in cards:
        breakpoints.append(Breakpoint(inst.size(order[start]), order[start]) if c else None)
        start += c
    return build_classes(inst, breakpoints, inst.n, epsilon)


def _guess_stream(inst: Instance, epsilon):
    corners = []
    first = next(enumerate_sparse_guesses(inst, epsilon))  # sparse_count = 0
    corners.append(first)
    full = _all_sparse_guess(inst, epsilon)
    if full is not None and full.signature() != first.signature():
        corners.append(full)
    seen = {g.signature() for g in corners}
    yield from corners
    for g in enumerate_sparse_guesses(inst, epsilon):
        if g.signature() not in seen:
            yield g


def aptas(
    inst: Instance,
    epsilon,
    budget: int | None = None,
    reference: Fraction | None = None,
) -> tuple[Packing, AptasCertificate]:
    """Cheapest verified packing over all sparse guesses and cost caps.

    ``budget`` limits MILP nodes plus evaluated guesses; when it runs out
    :class:`AptasBudgetExceeded` carries the best packing found so far.
    ``reference`` (e.g. an oracle optimum) feeds the certificate's bound;
    otherwise :func:`lower_bound` is used.
    """
    inv = check_epsilon(epsilon)
    eps = Fraction(1, inv)
    cert = AptasCertificate(eps)
    counters = {
        "guesses": 0,
        "stage1_pruned": 0,
        "stage1_infeasible": 0,
        "stage2_infeasible": 0,
        "dense_sets": 0,
        "cost_cap_evaluations": 0,
        "candidates": 0,
        "milp_nodes": 0,
    }
    cert.counters = counters
    if reference is not None:
        cert.reference, cert.reference_kind = reference, "oracle"
    else:
        cert.reference = lower_bound(inst)
    if inst.n == 0:
        cert.bound_rhs = (1 + 10 * eps) * cert.reference + 2
        return Packing(), cert

    rc = round_cost_function(inst.cost, eps)
    cert.bound_rhs = (1 + 10 * eps) * cert.reference + additive_term(inst, eps, rc)
    nodes = NodeCounter(DEFAULT_NODE_BUDGET if budget is None else budget)
    floor = dense_cost_floor(rc, eps)
    cost_caps = [y for y in rc.cost_levels if floor is not None and y >= floor]
    stage2_cache: dict[frozenset[int], Stage2Result | None] = {}
    best: tuple[Fraction, Packing] | None = None

    def stage2_for(dense: frozenset[int]) -> Stage2Result | None:
        if dense in stage2_cache:
            return stage2_cache[dense]
        counters["dense_sets"] += 1
        ids = sorted(dense)
        large, small = split_small_large(inst, ids, eps)
        if not small and not linear_group_large(inst, large, eps).sizes:
            result = pack_dense(inst, ids, eps, None, rc, nodes)
        else:
            result = None
            for cost_cap in cost_caps:
                counters["cost_cap_evaluations"] += 1
                cand = pack_dense(inst, ids, eps, cost_cap, rc, nodes)
                if cand is None:
                    continue
                report = verify_packing(inst, cand.packing, ids)
                if not report:
                    raise GcbpError(f"stage 2 produced an invalid packing: {report}")
                if result is None or packing_cost(inst, cand.packing) < packing_cost(
                    inst, result.packing
                ):
                    result = cand
        stage2_cache[dense] = result
        return result

    try:
        for guess in _guess_stream(inst, eps):
            nodes.charge()
            counters["guesses"] += 1
            sparse = guess.sparse_ids()
            dense = frozenset(inst.ids()) - frozenset(sparse)
            s2 = stage2_for(dense)
            if s2 is None:
                counters["stage2_infeasible"] += 1
                continue
            s2_cost = packing_cost(inst, s2.packing)
            if guess.sparse_count == 0:
                s1_packing, ip_obj = Packing(), Fraction(0)
            else:
                configs = enumerate_sparse_configurations(guess, eps, inst.cost)
                cutoff = None if best is None else best[0] - s2_cost
                ip = solve_sparse_ip(configs, guess.class_cards, inst.cost, nodes, cutoff)
                if ip is None:
                    counters["stage1_pruned" if cutoff is not None else "stage1_infeasible"] += 1
                    continue
                s1_packing, ip_obj = pack_sparse(guess, configs, ip.y), ip.objective
            packing = s1_packing + s2.packing
            report = verify_packing(inst, packing)
            if not report:
                raise GcbpError(f"combined packing failed verification: {report}")
            counters["candidates"] += 1
            total = packing_cost(inst, packing)
            if best is None or total < best[0]:
                best = (total, packing)
                _fill(cert, inst, guess, s1_packing, ip_obj, s2, total)
    except BudgetExceeded as exc:
        counters["milp_nodes"] = nodes.used
        cert.budget_exhausted = True
        raise AptasBudgetExceeded(str(exc), None if best is None else best[1], cert) from exc
    counters["milp_nodes"] = nodes.used
    assert best is not None, "the all-sparse guess always yields a packing"
    log.debug("aptas eps=%s cost=%s counters=%s", eps, best[0], counters)
    return best[1], cert


def _fill(cert, inst, guess: SparseGuess, s1: Packing, ip_obj, s2: Stage2Result, total) -> None:
    cert.guess_sparse_count = guess.sparse_count
    cert.guess_breakpoints = [None if b is None else [str(b.size), b.item_id] for b in guess.breakpoints]
    cert.guess_signature = [
        {"items": list(cls), "rounded_size": str(size)} for cls, size in guess.signature()
    ]
    cert.stage1_cost = packing_cost(inst, s1)
    cert.stage1_ip_objective = ip_obj
    cert.cost_cap = s2.cost_cap
    cert.stage2_cost = packing_cost(inst, s2.packing)
    cert.stage2 = {
        "milp_objective": s2.milp_objective,
        "supplementary_cost": s2.supplementary_cost,
        "supplementary_bins": s2.supplementary_bins,
        "opened_bins": s2.opened_bins,
        "removed_items": s2.removed_items,
        "overflow_bins": s2.overflow_bins,
        "dedicated_count": s2.dedicated_count,
        "configurations": s2.num_configs,
        "expensive_configurations": s2.num_expensive,
    }
    cert.total_cost = total

"""Exact solvers for cost functions whose average-cost minimizer is 1 or 2."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .classify import minimizer_k
from .core import GcbpError, Instance, Packing, packing_cost, sort_key

__all__ = [
    "WrongClass",
    "MatchingGraph",
    "K2Guess",
    "MAX_MATCHING_NODES",
    "build_matching_graph",
    "matching_weight",
    "max_weight_matching_exact_size",
    "solve_k1",
    "solve_k2",
    "k2_guesses",
]

MAX_MATCHING_NODES = 22

Edge = tuple[int, int, Fraction]


class WrongClass(GcbpError):
    pass


@dataclass(frozen=True)
class MatchingGraph:
    node_ids: tuple[int, ...]
    edges: tuple[Edge, ...]


@dataclass(frozen=True)
class K2Guess:
    singletons: int
    odd_bin: int
    paired: int


def build_matching_graph(inst: Instance, node_ids: Sequence[int]) -> MatchingGraph:
    """Edge ``(i, j)`` iff the two items fit together; weight is their total size."""
    nodes = tuple(node_ids)
    edges = []
    for a, i in enumerate(nodes):
        for j in nodes[a + 1 :]:
            w = inst.size(i) + inst.size(j)
            if w <= 1:
                edges.append((i, j, w))
    return MatchingGraph(nodes, tuple(edges))


def matching_weight(edges: Sequence[Edge]) -> Fraction:
    return sum((w for _, _, w in edges), Fraction(0))


def _matcher(g: MatchingGraph):
    if len(g.node_ids) > MAX_MATCHING_NODES:
        raise ValueError(
            f"exact-cardinality matching supports at most {MAX_MATCHING_NODES} nodes"
        )
    index = {v: k for k, v in enumerate(g.node_ids)}
    adj: list[list[tuple[int, Edge]]] = [[] for _ in g.node_ids]
    for e in g.edges:
        a, b = index[e[0]], index[e[1]]
        if a == b:
            raise ValueError("self-loops are not allowed")
        lo, hi = min(a, b), max(a, b)
        adj[lo].append((hi, e))

    # best(mask, m): heaviest matching with exactly m edges inside mask.
    @lru_cache(maxsize=None)
    def best(mask: int, m: int):
        if m == 0:
            return (Fraction(0), ())
        if mask.bit_count() < 2 * m:
            return None
        low = (mask & -mask).bit_length() - 1
        rest = mask & ~(1 << low)
        result = best(rest, m)
        for nb, e in adj[low]:
            if rest >> nb & 1:
                sub = best(rest & ~(1 << nb), m - 1)
                if sub is not None:
                    cand = (sub[0] + e[2], (e,) + sub[1])
                    if result is None or cand[0] > result[0]:
                        result = cand
        return result

    return best, (1 << len(g.node_ids)) - 1


def max_weight_matching_exact_size(g: MatchingGraph, m: int) -> list[Edge] | None:
    """Maximum-weight matching with exactly ``m`` edges, or None if none exists.

    Memoized DP over node subsets: the lowest remaining node is either left
    unmatched or matched to one of its neighbours.  Exponential in the node
    count, hence the :data:`MAX_MATCHING_NODES` cap.
    """
    if m < 0:
        raise ValueError("m must be non-negative")
    best, full = _matcher(g)
    res = best(full, m)
    return None if res is None else list(res[1])


def _check_class(inst: Instance, want: int, force: bool) -> None:
    if force or inst.n == 0:
        return
    k = minimizer_k(inst.cost).k
    if k != want:
        raise WrongClass(f"instance has k={k}, solver requires k={want} (use force)")


def solve_k1(inst: Instance, force: bool = False) -> Packing:
    """Every item in its own bin, which is optimal when k = 1."""
    _check_class(inst, 1, force)
    return Packing(tuple((i,) for i in inst.ids()))


def k2_guesses(n: int):
    """All (singletons, odd bin size, paired items) triples, in evaluation order."""
    for singletons in range(n + 1):
        for odd_bin in [0] + list(range(3, n - singletons + 1, 2)):
            paired = n - singletons - odd_bin
            if paired >= 0 and paired % 2 == 0:
                yield K2Guess(singletons, odd_bin, paired)


def solve_k2(inst: Instance, force: bool = False) -> Packing:
    """Optimal packing into singletons, pairs and at most one odd bin.

    For each guess the largest items become singletons, a maximum-weight
    matching of the prescribed size pairs the rest, and the unmatched items
    must fit in one bin.
    """
    _check_class(inst, 2, force)
    n = inst.n
    if n == 0:
        return Packing()
    f = inst.cost.table
    order = sorted(inst.ids(), key=sort_key(inst))
    matchers = {}
    best_cost = None
    best_packing = None
    for guess in k2_guesses(n):
        pairs = guess.paired // 2
        cost = guess.singletons * f[1] + f[guess.odd_bin] + (pairs * f[2] if pairs else 0)
        if best_cost is not None and cost >= best_cost:
            continue
        remainder = order[guess.singletons :]
        if guess.singletons not in matchers:
            matchers[guess.singletons] = _matcher(build_matching_graph(inst, sorted(remainder)))
        best, full = matchers[guess.singletons]
        res = best(full, pairs)
        if res is None:
            continue
        matched = {i for e in res[1] for i in e[:2]}
        leftover = [i for i in sorted(remainder) if i not in matched]
        if sum((inst.size(i) for i in leftover), Fraction(0)) > 1:
            continue
        bins = [(i,) for i in order[: guess.singletons]]
        bins += [(min(a, b), max(a, b)) for a, b, _ in res[1]]
        if leftover:
            bins.append(tuple(leftover))
        best_cost = cost
        best_packing = Packing(tuple(bins))
    assert best_packing is not None and packing_cost(inst, best_packing) == best_cost
    return best_packing

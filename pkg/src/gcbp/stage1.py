"""Sparse-instance guessing and packing.

A guess fixes breakpoints (the largest item of each group, in the
size-then-id order) and the number of items packed in sparse bins.  From it
follow the classes: the top items of each group, rounded up to the group's
breakpoint.  The rounded sparse instance is then packed optimally by a
configuration integer program.

Breakpoint vectors have ``1/eps**3 + 1`` components.  Component 1 tops the
auxiliary group whose items always go to the dense instance; component
``i + 1`` tops group ``i``, the source of class ``i``.  ``None`` marks an
empty group.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .core import CostFunction, Instance, Packing, check_epsilon, sort_key
from .milp import MilpModel, NodeCounter, solve_ip
from .rational_lp import LpModel, Relation, Status

__all__ = [
    "Breakpoint",
    "SparseGuess",
    "SparseConfiguration",
    "SparseIpResult",
    "class_cardinalities",
    "build_classes",
    "enumerate_sparse_guesses",
    "guess_from_packing",
    "enumerate_sparse_configurations",
    "solve_sparse_ip",
    "pack_sparse",
]


@dataclass(frozen=True)
class Breakpoint:
    size: Fraction
    item_id: int


@dataclass(frozen=True)
class SparseGuess:
    breakpoints: tuple[Breakpoint | None, ...]
    sparse_count: int
    class_cards: tuple[int, ...]
    classes: tuple[tuple[int, ...], ...]
    rounded_sizes: tuple[Fraction | None, ...]

    def signature(self) -> tuple:
        """What the guess induces: its classes and their rounded sizes."""
        return tuple(
            (cls, size) for cls, size in zip(self.classes, self.rounded_sizes) if cls
        )

    def sparse_ids(self) -> list[int]:
        return [i for cls in self.classes for i in cls]


@dataclass(frozen=True)
class SparseConfiguration:
    counts: tuple[int, ...]
    cardinality: int
    cost: Fraction


@dataclass(frozen=True)
class SparseIpResult:
    y: tuple[int, ...]
    objective: Fraction


def class_cardinalities(total: int, num_classes: int) -> tuple[int, ...]:
    """Near-equal, non-increasing split of ``total`` into ``num_classes`` parts."""
    q, r = divmod(total, num_classes)
    return tuple(q + 1 if i < r else q for i in range(num_classes))


def _sorted_positions(inst: Instance) -> tuple[list[int], dict[int, int]]:
    order = sorted(inst.ids(), key=sort_key(inst))
    return order, {item: pos for pos, item in enumerate(order)}


def build_classes(
    inst: Instance, breakpoints: Sequence[Breakpoint | None], sparse_count: int, epsilon
) -> SparseGuess | None:
    """Classes induced by ``(breakpoints, sparse_count)``, or None when some group is too small.

    Group ``i`` runs from its breakpoint down to (excluding) the next
    non-empty group's breakpoint; the last one runs to the smallest item.
    """
    inv = check_epsilon(epsilon)
    K = inv**3
    if len(breakpoints) != K + 1:
        raise ValueError(f"breakpoint vector must have {K + 1} components")
    if not 0 <= sparse_count <= inst.n:
        raise ValueError("sparse cardinality out of range")
    order, pos = _sorted_positions(inst)
    starts: list[int | None] = []
    for bp in breakpoints:
        if bp is None:
            starts.append(None)
            continue
        if bp.item_id not in pos or inst.size(bp.item_id) != bp.size:
            raise ValueError(f"breakpoint {bp} is not an item of the instance")
        starts.append(pos[bp.item_id])
    nonzero = [s for s in starts if s is not None]
    if any(a >= b for a, b in zip(nonzero, nonzero[1:])):
        raise ValueError("breakpoints must be strictly decreasing in size-then-id order")

    cards = class_cardinalities(sparse_count, K)
    classes = []
    rounded = []
    for i in range(1, K + 1):
        start = starts[i]
        if start is None:
            if cards[i - 1]:
                return None
            classes.append(())
            rounded.append(None)
            continue
        end = next((s for s in starts[i + 1 :] if s is not None), inst.n)
        if end - start < cards[i - 1]:
            return None
        classes.append(tuple(order[start : start + cards[i - 1]]))
        rounded.append(breakpoints[i].size if cards[i - 1] else None)
    return SparseGuess(tuple(breakpoints), sparse_count, cards, tuple(classes), tuple(rounded))


def _top_breakpoint(inst: Instance, order: list[int], first_class_start: int | None):
    if not order or first_class_start == 0:
        return None
    return Breakpoint(inst.size(order[0]), order[0])


def enumerate_sparse_guesses(inst: Instance, epsilon) -> Iterator[SparseGuess]:
    """Every feasible guess, once per induced class signature.

    Breakpoints are drawn from the items themselves.  Only classes with a
    positive cardinality need a breakpoint (others are Zero), and such a
    breakpoint must leave room for its class before the next one.  Ordered by
    sparse cardinality, then lexicographically by breakpoint position.
    """
    inv = check_epsilon(epsilon)
    K = inv**3
    order, _ = _sorted_positions(inst)
    n = inst.n
    seen = set()
    for sparse_count in range(n + 1):
        cards = class_cardinalities(sparse_count, K)
        r = sum(1 for c in cards if c)
        for starts in _starts(n, cards[:r]):
            breakpoints = [_top_breakpoint(inst, order, starts[0] if starts else None)]
            breakpoints += [Breakpoint(inst.size(order[p]), order[p]) for p in starts]
            breakpoints += [None] * (K - r)
            guess = build_classes(inst, breakpoints, sparse_count, epsilon)
            if guess is None:  # pragma: no cover - _starts only yields feasible ones
                continue
            sig = guess.signature()
            if sig in seen:
                continue
            seen.add(sig)
            yield guess


def _starts(n: int, cards: Sequence[int], lo: int = 0) -> Iterator[tuple[int, ...]]:
    if not cards:
        yield ()
        return
    need_after = sum(cards[1:])
    for p in range(lo, n - cards[0] - need_after + 1):
        for rest in _starts(n, cards[1:], p + cards[0]):
            yield (p,) + rest


def guess_from_packing(inst: Instance, packing: Packing, epsilon) -> SparseGuess:
    """The guess that reproduces a packing's sparse bins.

    The sparse items are sorted and cut into the near-equal class sizes; each
    class's breakpoint is its own largest item.
    """
    inv = check_epsilon(epsilon)
    K = inv**3
    order, pos = _sorted_positions(inst)
    sparse = sorted(
        (i for b in packing.bins if len(b) <= inv * inv for i in b), key=sort_key(inst)
    )
    sparse_count = len(sparse)
    cards = class_cardinalities(sparse_count, K)
    breakpoints: list[Breakpoint | None] = []
    offset = 0
    for c in cards:
        if c:
            item = sparse[offset]
            breakpoints.append(Breakpoint(inst.size(item), item))
        else:
            breakpoints.append(None)
        offset += c
    first = pos[breakpoints[0].item_id] if breakpoints and breakpoints[0] is not None else None
    breakpoints.insert(0, _top_breakpoint(inst, order, first))
    guess = build_classes(inst, breakpoints, sparse_count, epsilon)
    assert guess is not None
    return guess


def enumerate_sparse_configurations(
    guess: SparseGuess, epsilon, f: CostFunction
) -> list[SparseConfiguration]:
    """All count vectors fitting a sparse bin under the rounded sizes."""
    inv = check_epsilon(epsilon)
    cap = min(inv * inv, f.n)
    active = [i for i, cls in enumerate(guess.classes) if cls]
    K = len(guess.classes)
    out: list[SparseConfiguration] = []

    def rec(idx: int, counts: list[int], card: int, load: Fraction):
        if idx == len(active):
            if card >= 1:
                out.append(SparseConfiguration(tuple(counts), card, f.table[card]))
            return
        i = active[idx]
        size = guess.rounded_sizes[i]
        c = 0
        while card + c <= cap and load + c * size <= 1:
            counts[i] = c
            rec(idx + 1, counts, card + c, load + c * size)
            c += 1
        counts[i] = 0

    rec(0, [0] * K, 0, Fraction(0))
    return out


def solve_sparse_ip(
    configs: Sequence[SparseConfiguration],
    class_cards: Sequence[int],
    f: CostFunction | None = None,
    budget: int | NodeCounter | None = None,
    cutoff: Fraction | None = None,
) -> SparseIpResult | None:
    """Cheapest multiset of configurations covering each class exactly.

    Columns using more items of a class than it holds cannot appear in any
    feasible solution and are left out of the model.  Returns None if
    infeasible (or, with ``cutoff``, if nothing beats it).
    """
    if sum(class_cards) == 0:
        return SparseIpResult((0,) * len(configs), Fraction(0))
    cols = [
        idx
        for idx, c in enumerate(configs)
        if all(ci <= card for ci, card in zip(c.counts, class_cards))
    ]
    if not cols:
        return None
    cost = [configs[idx].cost if f is None else f.table[configs[idx].cardinality] for idx in cols]
    model = LpModel(len(cols), cost)
    for i, card in enumerate(class_cards):
        row = {k: configs[idx].counts[i] for k, idx in enumerate(cols) if configs[idx].counts[i]}
        if row or card:
            model.add_constraint(row, Relation.EQ, card)
    sol = solve_ip(MilpModel(model, frozenset(range(len(cols)))), budget, cutoff)
    if sol.status is not Status.OPTIMAL:
        return None
    y = [0] * len(configs)
    for k, idx in enumerate(cols):
        y[idx] = int(sol.values[k])
    return SparseIpResult(tuple(y), sol.objective_value)


def pack_sparse(
    guess: SparseGuess, configs: Sequence[SparseConfiguration], y: Sequence[int]
) -> Packing:
    queues = [list(cls) for cls in guess.classes]
    heads = [0] * len(queues)
    bins = []
    for c, mult in zip(configs, y):
        for _ in range(mult):
            b = []
            for i, ci in enumerate(c.counts):
                b.extend(queues[i][heads[i] : heads[i] + ci])
                heads[i] += ci
            bins.append(tuple(b))
    if any(h != len(q) for h, q in zip(heads, queues)):
        raise ValueError("configuration multiplicities do not cover the classes")
    return Packing(tuple(bins))

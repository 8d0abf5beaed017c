"""Exact-rational instance model, cost evaluation and packing verification.

Every quantity here is a :class:`fractions.Fraction`.  Item ids are 1-based
and dense; a :class:`Packing` is a tuple of bins, each a tuple of ids.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence

__all__ = [
    "GcbpError",
    "SizeOutOfRange",
    "NonMonotoneCost",
    "BadAnchor",
    "BadEpsilon",
    "Item",
    "CostFunction",
    "Instance",
    "Packing",
    "VerificationReport",
    "Density",
    "as_fraction",
    "validate_instance",
    "packing_cost",
    "verify_packing",
    "check_epsilon",
    "bin_density_class",
    "sort_key",
]


class GcbpError(Exception):
    """Base class for all errors raised by this package."""


class SizeOutOfRange(GcbpError, ValueError):
    pass


class NonMonotoneCost(GcbpError, ValueError):
    pass


class BadAnchor(GcbpError, ValueError):
    pass


class BadEpsilon(GcbpError, ValueError):
    pass


def as_fraction(value) -> Fraction:
    """Convert ints, Fractions and ``"p/q"`` strings to a Fraction.

    Floats are rejected: they would silently smuggle rounding error into the
    solver path.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"expected int, Fraction or str, got {type(value).__name__}")


@dataclass(frozen=True)
class Item:
    id: int
    size: Fraction


@dataclass(frozen=True)
class CostFunction:
    """Normalized cardinality cost table ``f(0..n)`` with ``f(1) = 1``."""

    table: tuple[Fraction, ...]
    normalization_factor: Fraction = Fraction(1)

    def __call__(self, j: int) -> Fraction:
        return self.table[j]

    def __len__(self) -> int:
        return len(self.table)

    @property
    def n(self) -> int:
        return len(self.table) - 1

    def raw(self, value: Fraction) -> Fraction:
        """Rescale a normalized cost back to the caller's units."""
        return value * self.normalization_factor


@dataclass(frozen=True)
class Instance:
    items: tuple[Item, ...]
    cost: CostFunction

    @property
    def n(self) -> int:
        return len(self.items)

    @property
    def sizes(self) -> tuple[Fraction, ...]:
        return tuple(it.size for it in self.items)

    def size(self, item_id: int) -> Fraction:
        return self.items[item_id - 1].size

    def ids(self) -> range:
        return range(1, len(self.items) + 1)


@dataclass(frozen=True)
class Packing:
    bins: tuple[tuple[int, ...], ...] = ()

    @classmethod
    def of(cls, bins: Iterable[Iterable[int]]) -> "Packing":
        return cls(tuple(tuple(b) for b in bins))

    def __len__(self) -> int:
        return len(self.bins)

    def __add__(self, other: "Packing") -> "Packing":
        return Packing(self.bins + other.bins)

    def item_ids(self) -> list[int]:
        return [i for b in self.bins for i in b]

    def canonical(self) -> "Packing":
        """Bins with sorted ids, ordered by their smallest id."""
        bins = sorted((tuple(sorted(b)) for b in self.bins if b), key=lambda b: b[0])
        return Packing(tuple(bins))


def sort_key(inst: Instance):
    """Key ordering items by size non-increasing, ties to the smaller id."""
    return lambda item_id: (-inst.items[item_id - 1].size, item_id)


def validate_instance(raw_sizes: Sequence, raw_cost: Sequence) -> Instance:
    sizes = [as_fraction(s) for s in raw_sizes]
    cost = [as_fraction(c) for c in raw_cost]
    if len(cost) != len(sizes) + 1:
        raise ValueError(
            f"cost table has length {len(cost)}, expected {len(sizes) + 1}"
        )
    for idx, s in enumerate(sizes, start=1):
        if not 0 <= s <= 1:
            raise SizeOutOfRange(f"item {idx} has size {s} outside [0, 1]")
    if cost[0] != 0:
        raise BadAnchor(f"f(0) must be 0, got {cost[0]}")
    if len(cost) > 1 and cost[1] <= 0:
        raise BadAnchor(f"f(1) must be positive, got {cost[1]}")
    for j in range(len(cost) - 1):
        if cost[j] > cost[j + 1]:
            raise NonMonotoneCost(f"f({j}) = {cost[j]} > f({j + 1}) = {cost[j + 1]}")
    factor = cost[1] if len(cost) > 1 else Fraction(1)
    table = tuple(c / factor for c in cost)
    items = tuple(Item(i, s) for i, s in enumerate(sizes, start=1))
    return Instance(items, CostFunction(table, factor))


def packing_cost(inst: Instance, p: Packing) -> Fraction:
    f = inst.cost.table
    return sum((f[len(b)] for b in p.bins), Fraction(0))


@dataclass(frozen=True)
class VerificationReport:
    overfull: tuple[tuple[int, Fraction], ...] = ()
    missing: tuple[int, ...] = ()
    duplicated: tuple[int, ...] = ()
    unknown: tuple[int, ...] = ()
    empty_bins: tuple[int, ...] = ()

    @property
    def ok(self) -> bool:
        return not (
            self.overfull or self.missing or self.duplicated or self.unknown or self.empty_bins
        )

    def __bool__(self) -> bool:
        return self.ok

    def violations(self) -> list[str]:
        out = [f"bin {b} total {t} > 1" for b, t in self.overfull]
        out += [f"item {i} unpacked" for i in self.missing]
        out += [f"item {i} packed more than once" for i in self.duplicated]
        out += [f"item {i} does not exist" for i in self.unknown]
        out += [f"bin {b} is empty" for b in self.empty_bins]
        return out

    def __str__(self) -> str:
        return "OK" if self.ok else "; ".join(self.violations())


def verify_packing(
    inst: Instance, p: Packing, expected_ids: Iterable[int] | None = None
) -> VerificationReport:
    """Check ``p`` against ``inst``.

    ``expected_ids`` restricts the check to a sub-instance (e.g. the dense
    items of a guess); by default every item of ``inst`` must be packed.
    """
    expected = set(inst.ids()) if expected_ids is None else set(expected_ids)
    seen: set[int] = set()
    dup: set[int] = set()
    unknown: set[int] = set()
    overfull = []
    empty = []
    for b_idx, b in enumerate(p.bins):
        if not b:
            empty.append(b_idx)
            continue
        total = Fraction(0)
        for i in b:
            if i not in expected:
                unknown.add(i)
                continue
            if i in seen:
                dup.add(i)
            seen.add(i)
            total += inst.items[i - 1].size
        if total > 1:
            overfull.append((b_idx, total))
    return VerificationReport(
        overfull=tuple(overfull),
        missing=tuple(sorted(expected - seen)),
        duplicated=tuple(sorted(dup)),
        unknown=tuple(sorted(unknown)),
        empty_bins=tuple(empty),
    )


class Density(Enum):
    SPARSE = "sparse"
    DENSE = "dense"


def check_epsilon(epsilon) -> int:
    """Return ``1/epsilon`` after checking it is a positive integer."""
    eps = as_fraction(epsilon)
    if eps <= 0 or eps.numerator != 1:
        raise BadEpsilon(f"1/epsilon must be a positive integer, got epsilon={eps}")
    return eps.denominator


def bin_density_class(bin_cardinality: int, epsilon) -> Density:
    inv = check_epsilon(epsilon)
    if bin_cardinality < 1:
        raise ValueError("bin cardinality must be at least 1")
    return Density.SPARSE if bin_cardinality <= inv * inv else Density.DENSE

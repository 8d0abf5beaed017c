"""Seeded random instances and the 3-Partition hardness reduction."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .classify import minimizer_k
from .core import GcbpError, validate_instance
from .fileio import InstanceFile

__all__ = [
    "BadModel",
    "InvalidThreePartition",
    "SIZE_MODELS",
    "COST_MODELS",
    "random_sizes",
    "random_cost",
    "generate_random_instance",
    "ThreePartitionInput",
    "reduction_cost",
    "reduce_3partition",
]

SIZE_MODELS = ("uniform", "discrete")
COST_MODELS = ("flat", "linear", "concave", "step", "random")


class BadModel(GcbpError, ValueError):
    pass


class InvalidThreePartition(GcbpError, ValueError):
    pass


def random_sizes(
    rng: random.Random,
    n: int,
    model: str = "uniform",
    denominator: int = 10,
    values: Sequence | None = None,
) -> list[Fraction]:
    if model == "uniform":
        if denominator < 1:
            raise BadModel("denominator must be positive")
        return [Fraction(rng.randint(0, denominator), denominator) for _ in range(n)]
    if model == "discrete":
        if not values:
            raise BadModel("discrete size model needs a non-empty value list")
        pool = [Fraction(v) for v in values]
        if any(not 0 <= v <= 1 for v in pool):
            raise BadModel("discrete sizes must lie in [0, 1]")
        return [rng.choice(pool) for _ in range(n)]
    raise BadModel(f"unknown size model {model!r}; choose from {SIZE_MODELS}")


def random_cost(
    rng: random.Random,
    n: int,
    model: str = "random",
    denominator: int = 10,
    K: int | None = None,
    penalty=None,
) -> list[Fraction]:
    """Monotone cost table ``f(0..n)`` with ``f(0) = 0`` and ``f(1) = 1``.

    ``step`` is the cardinality-constrained shape: 1 up to K items, then
    ``penalty`` (default n).
    """
    if n == 0:
        return [Fraction(0)]
    if model == "flat":
        return [Fraction(0)] + [Fraction(1)] * n
    if model == "linear":
        return [Fraction(j) for j in range(n + 1)]
    if model == "step":
        if K is None or not 1 <= K:
            raise BadModel("step cost model needs K >= 1")
        x = Fraction(n if penalty is None else penalty)
        if x < 1:
            raise BadModel("step penalty must be at least 1")
        return [Fraction(0)] + [Fraction(1) if j <= K else x for j in range(1, n + 1)]
    if model == "concave":
        incs = sorted(
            (Fraction(rng.randint(0, denominator), denominator) for _ in range(n - 1)),
            reverse=True,
        )
    elif model == "random":
        incs = [Fraction(rng.randint(0, 2 * denominator), denominator) for _ in range(n - 1)]
    else:
        raise BadModel(f"unknown cost model {model!r}; choose from {COST_MODELS}")
    table = [Fraction(0), Fraction(1)]
    for d in incs:
        table.append(table[-1] + d)
    return table


def generate_random_instance(
    n: int,
    size_model: str = "uniform",
    cost_model: str = "random",
    seed: int = 0,
    denominator: int = 10,
    values: Sequence | None = None,
    K: int | None = None,
    penalty=None,
    name: str | None = None,
) -> InstanceFile:
    """A pure function of its arguments: the same seed gives the same file."""
    if n < 0:
        raise BadModel("n must be non-negative")
    rng = random.Random(seed)
    sizes = random_sizes(rng, n, size_model, denominator, values)
    cost = random_cost(rng, n, cost_model, denominator, K, penalty)
    inst = validate_instance(sizes, cost)
    meta = {
        "name": name or f"{cost_model}-{size_model}-n{n}-s{seed}",
        "generator": "random",
        "seed": seed,
        "size_model": size_model,
        "cost_model": cost_model,
        "denominator": denominator,
        "k": minimizer_k(inst.cost).k,
    }
    if values is not None:
        meta["values"] = [str(Fraction(v)) for v in values]
    if K is not None:
        meta["K"] = K
    if penalty is not None:
        meta["penalty"] = str(Fraction(penalty))
    return InstanceFile(sizes, cost, meta)


@dataclass(frozen=True)
class ThreePartitionInput:
    integers: tuple[int, ...]
    bound: int
    k: int

    @property
    def m(self) -> int:
        return len(self.integers) // 3

    def validate(self) -> None:
        if self.k < 3:
            raise InvalidThreePartition("target cardinality k must be at least 3")
        if self.bound <= 0:
            raise InvalidThreePartition("bound Z must be positive")
        if not self.integers or len(self.integers) % 3:
            raise InvalidThreePartition("need 3m integers with m >= 1")
        Z = self.bound
        for a in self.integers:
            if not 4 * a > Z or not 2 * a < Z:
                raise InvalidThreePartition(f"{a} is not strictly between Z/4 and Z/2 (Z={Z})")
        if sum(self.integers) != self.m * Z:
            raise InvalidThreePartition(f"integers sum to {sum(self.integers)}, expected m*Z={self.m * Z}")


def reduction_cost(n: int, k: int) -> list[Fraction]:
    """``f(j) = j`` below k and ``j * (1 - 1/(2k))`` from k on.

    The per-item average is 1 below k and ``1 - 1/(2k)`` from k on, so its
    smallest minimizer is exactly k; ``f(k) = k - 1/2 >= f(k-1)`` keeps it
    monotone.
    """
    d = Fraction(1, 2 * k)
    return [Fraction(j) if j < k else j * (1 - d) for j in range(n + 1)]


def reduce_3partition(tp: ThreePartitionInput) -> tuple[InstanceFile, Fraction]:
    """Scaled 3-Partition integers plus ``m(k-3)`` zero items; returns the YES threshold ``m f(k)``."""
    tp.validate()
    Z = tp.bound
    sizes = [Fraction(a, Z) for a in tp.integers] + [Fraction(0)] * (tp.m * (tp.k - 3))
    cost = reduction_cost(len(sizes), tp.k)
    inst = validate_instance(sizes, cost)
    cls = minimizer_k(inst.cost)
    if cls.k != tp.k:  # pragma: no cover - guarded by reduction_cost's construction
        raise AssertionError(f"reduction cost has minimizer {cls.k}, wanted {tp.k}")
    threshold = tp.m * inst.cost.table[tp.k]
    meta = {
        "name": f"3partition-m{tp.m}-Z{Z}-k{tp.k}",
        "generator": "reduce-3p",
        "integers": list(tp.integers),
        "bound": Z,
        "k": tp.k,
        "cost_template": "f(j)=j for j<k; f(j)=j*(1-1/(2k)) for j>=k",
        "average_cost": [str(x) for x in cls.f_over_j],
        "threshold": str(threshold),
    }
    return InstanceFile(sizes, cost, meta), threshold

"""Tractability classification from the per-item average cost ``f(j)/j``."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .core import CostFunction, GcbpError

__all__ = ["Verdict", "Classification", "IndexOutOfRange", "average_cost", "minimizer_k"]


class IndexOutOfRange(GcbpError, IndexError):
    pass


class Verdict(Enum):
    POLY_K1 = "PolyK1"
    POLY_K2 = "PolyK2"
    NP_HARD = "NpHard"


@dataclass(frozen=True)
class Classification:
    k: int
    f_over_j: tuple[Fraction, ...]
    verdict: Verdict


def average_cost(f: CostFunction, j: int) -> Fraction:
    if not 1 <= j <= f.n:
        raise IndexOutOfRange(f"j={j} outside [1, {f.n}]")
    return f.table[j] / j


def minimizer_k(f: CostFunction) -> Classification:
    """Smallest minimizer of ``f(j)/j`` over ``j = 1..n``.

    An empty instance (``n = 0``) is classified as k = 1, where the singleton
    solver trivially returns the empty packing.
    """
    F = tuple(f.table[j] / j for j in range(1, f.n + 1))
    k = 1
    for j, val in enumerate(F, start=1):
        if val < F[k - 1]:
            k = j
    if k == 1:
        verdict = Verdict.POLY_K1
    elif k == 2:
        verdict = Verdict.POLY_K2
    else:
        verdict = Verdict.NP_HARD
    return Classification(k, F, verdict)

"""Ground-truth optimum by subset DP, and a cardinality-aware first-fit baseline."""

from __future__ import annotations

import math
from fractions import Fraction

from .classify import minimizer_k
from .core import GcbpError, Instance, Packing, sort_key

__all__ = ["TooLarge", "DEFAULT_LIMIT", "brute_force_opt", "greedy_baseline"]

DEFAULT_LIMIT = 12


class TooLarge(GcbpError):
    pass


def brute_force_opt(inst: Instance, limit_n: int = DEFAULT_LIMIT) -> Packing:
    """Minimum-cost packing by DP over item subsets.

    ``opt[S] = min f(|B|) + opt[S - B]`` over feasible ``B ⊆ S`` holding the
    lowest item of ``S``.  Ties keep the first bin found in submask order,
    so the result is deterministic.
    """
    n = inst.n
    if n > limit_n:
        raise TooLarge(f"n={n} exceeds oracle limit {limit_n}")
    if n == 0:
        return Packing()
    full = (1 << n) - 1
    # Common denominator turns every subset-size test into integer arithmetic.
    den = math.lcm(*(s.denominator for s in inst.sizes))
    isize = [int(s * den) for s in inst.sizes]
    total = [0] * (1 << n)
    card = [0] * (1 << n)
    for mask in range(1, 1 << n):
        low = mask & -mask
        b = low.bit_length() - 1
        total[mask] = total[mask ^ low] + isize[b]
        card[mask] = card[mask ^ low] + 1
    f = inst.cost.table
    best: list[Fraction | None] = [None] * (1 << n)
    choice = [0] * (1 << n)
    best[0] = Fraction(0)
    for mask in range(1, 1 << n):
        low = mask & -mask
        rest = mask ^ low
        cur = None
        pick = 0
        sub = rest
        while True:
            bin_mask = sub | low
            if total[bin_mask] <= den:
                val = f[card[bin_mask]] + best[mask ^ bin_mask]
                if cur is None or val < cur:
                    cur, pick = val, bin_mask
            if sub == 0:
                break
            sub = (sub - 1) & rest
        best[mask] = cur
        choice[mask] = pick
    bins = []
    mask = full
    while mask:
        b = choice[mask]
        bins.append(tuple(i + 1 for i in range(n) if b >> i & 1))
        mask ^= b
    return Packing(tuple(bins))


def greedy_baseline(inst: Instance) -> Packing:
    """First fit in non-increasing size order with a bin cardinality cap of k*."""
    if inst.n == 0:
        return Packing()
    cap = minimizer_k(inst.cost).k
    order = sorted(inst.ids(), key=sort_key(inst))
    bins: list[list[int]] = []
    loads: list[Fraction] = []
    for i in order:
        s = inst.size(i)
        for b, load in enumerate(loads):
            if len(bins[b]) < cap and load + s <= 1:
                bins[b].append(i)
                loads[b] = load + s
                break
        else:
            bins.append([i])
            loads.append(s)
    return Packing.of(bins)

"""Benchmark harness: one record per (instance, algorithm, epsilon)."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Sequence

from .classify import minimizer_k
from .core import GcbpError, Instance, Packing, check_epsilon, packing_cost, verify_packing
from .driver import AptasBudgetExceeded, additive_term, aptas, lower_bound
from .exact_poly import solve_k1, solve_k2
from .milp import BudgetExceeded
from .oracle import DEFAULT_LIMIT, TooLarge, brute_force_opt, greedy_baseline

__all__ = ["ALGORITHMS", "BenchCase", "run_algorithm", "bench", "format_table", "to_jsonl"]

ALGORITHMS = ("oracle", "greedy", "k1", "k2", "aptas", "auto")


@dataclass(frozen=True)
class BenchCase:
    name: str
    instance: Instance


def run_algorithm(
    inst: Instance,
    algorithm: str,
    epsilon=None,
    budget: int | None = None,
    force: bool = False,
    oracle_limit: int = DEFAULT_LIMIT,
) -> tuple[Packing, dict[str, Any] | None]:
    """Dispatch by name; ``auto`` picks the exact solver when the class allows it."""
    if algorithm == "auto":
        k = minimizer_k(inst.cost).k
        algorithm = "k1" if k == 1 else "k2" if k == 2 else "aptas"
    if algorithm == "oracle":
        return brute_force_opt(inst, oracle_limit), None
    if algorithm == "greedy":
        return greedy_baseline(inst), None
    if algorithm == "k1":
        return solve_k1(inst, force), None
    if algorithm == "k2":
        return solve_k2(inst, force), None
    if algorithm == "aptas":
        if epsilon is None:
            raise ValueError("aptas needs an epsilon")
        packing, cert = aptas(inst, epsilon, budget)
        return packing, cert.to_dict()
    raise ValueError(f"unknown algorithm {algorithm!r}; choose from {ALGORITHMS}")


def _q(x: Fraction | None) -> str | None:
    return None if x is None else str(x)


def bench(
    cases: Iterable[BenchCase],
    algorithms: Sequence[str],
    epsilons: Sequence = (Fraction(1, 2),),
    oracle_limit: int = DEFAULT_LIMIT,
    budget: int | None = None,
    timing: bool = False,
) -> list[dict[str, Any]]:
    """Run every algorithm on every case; failures become rows, never exceptions.

    ``aptas`` is run once per epsilon, other algorithms once.  The oracle
    optimum (when ``n <= oracle_limit``) is the reference for ratios and the
    guarantee column; otherwise the simple lower bound is used.  Wall times
    are recorded only with ``timing=True`` so that records stay reproducible.
    """
    eps_list = [Fraction(e) for e in epsilons]
    for e in eps_list:
        check_epsilon(e)
    records: list[dict[str, Any]] = []
    for case in cases:
        inst = case.instance
        ref, ref_kind = lower_bound(inst), "lower_bound"
        if inst.n <= oracle_limit:
            ref, ref_kind = packing_cost(inst, brute_force_opt(inst, oracle_limit)), "oracle"
        for algo in algorithms:
            for eps in eps_list if algo == "aptas" else [None]:
                records.append(_row(case, algo, eps, ref, ref_kind, oracle_limit, budget, timing))
    return records


def _row(case, algo, eps, ref, ref_kind, oracle_limit, budget, timing) -> dict[str, Any]:
    inst = case.instance
    row: dict[str, Any] = {
        "instance": case.name,
        "n": inst.n,
        "algorithm": algo,
        "epsilon": _q(eps),
        "reference": _q(ref),
        "reference_kind": ref_kind,
    }
    start = time.perf_counter()
    try:
        packing, cert = run_algorithm(inst, algo, eps, budget, oracle_limit=oracle_limit)
        row["status"] = "ok"
    except TooLarge as exc:
        row.update(status="TooLarge", error=str(exc))
        return _finish(row, start, timing)
    except AptasBudgetExceeded as exc:
        row.update(status="BudgetExceeded", error=str(exc))
        packing, cert = exc.packing, exc.certificate.to_dict()
        if packing is None:
            return _finish(row, start, timing)
    except BudgetExceeded as exc:
        row.update(status="BudgetExceeded", error=str(exc))
        return _finish(row, start, timing)
    except (GcbpError, ValueError) as exc:
        row.update(status=type(exc).__name__, error=str(exc))
        return _finish(row, start, timing)

    report = verify_packing(inst, packing)
    cost = packing_cost(inst, packing)
    row["valid"] = report.ok
    row["cost"] = str(cost)
    row["bins"] = len(packing)
    row["ratio"] = None if not ref else str(cost / ref)
    if cert is not None:
        bound = (1 + 10 * eps) * ref + additive_term(inst, eps)
        row["bound"] = str(bound)
        row["within_bound"] = cost <= bound
        row["guesses"] = cert["counters"]["guesses"]
        row["milp_nodes"] = cert["counters"]["milp_nodes"]
    if not report.ok:
        row["status"] = "invalid"
        row["error"] = str(report)
    return _finish(row, start, timing)


def _finish(row, start, timing):
    if timing:
        row["seconds"] = round(time.perf_counter() - start, 6)
    return row


def to_jsonl(records: Iterable[dict[str, Any]]) -> str:
    return "".join(json.dumps(r, sort_keys=True) + "\n" for r in records)


_COLUMNS = ("instance", "n", "algorithm", "epsilon", "status", "cost", "reference", "ratio", "bound", "within_bound")


def format_table(records: Sequence[dict[str, Any]]) -> str:
    cols = list(_COLUMNS) + (["seconds"] if any("seconds" in r for r in records) else [])
    cells = [[("" if r.get(c) is None else str(r.get(c))) for c in cols] for r in records]
    widths = [max([len(c)] + [len(row[k]) for row in cells]) for k, c in enumerate(cols)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(cols, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() for row in cells]
    return "\n".join(lines) + "\n"

"""Command-line entry point: ``gcbp <subcommand> ...``.

Exit codes: 0 success, 1 usage or input error, 2 infeasible or failed
verification, 3 budget exhausted.  ``GCBP_BUDGET`` sets the default node
budget for the approximation scheme.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction
from pathlib import Path

from .bench import ALGORITHMS, BenchCase, bench, format_table, run_algorithm, to_jsonl
from .classify import minimizer_k
from .core import GcbpError, as_fraction, packing_cost, verify_packing
from .driver import AptasBudgetExceeded
from .fileio import (
    dumps,
    packing_document,
    parse_instance_file,
    read_instance_file,
    read_packing_file,
    write_instance_file,
)
from .generators import COST_MODELS, SIZE_MODELS, ThreePartitionInput, generate_random_instance, reduce_3partition
from .milp import BudgetExceeded
from .oracle import DEFAULT_LIMIT

EXIT_OK, EXIT_ERROR, EXIT_INFEASIBLE, EXIT_BUDGET = 0, 1, 2, 3
BUDGET_ENV = "GCBP_BUDGET"


class _Parser(argparse.ArgumentParser):
    # keep exit code 2 for infeasibility only
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _rational(text: str) -> Fraction:
    try:
        return as_fraction(text)
    except (ValueError, TypeError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}")


def _rationals(text: str) -> list[Fraction]:
    return [_rational(t) for t in text.split(",") if t.strip()]


def _default_budget() -> int | None:
    raw = os.environ.get(BUDGET_ENV)
    if not raw:
        return None
    try:
        return int(raw)
    except ValueError:
        raise GcbpError(f"{BUDGET_ENV} must be an integer, got {raw!r}")


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_classify(args) -> int:
    inst = parse_instance_file(args.instance)
    cls = minimizer_k(inst.cost)
    out = {
        "k": cls.k,
        "verdict": cls.verdict.value,
        "average_cost": [str(x) for x in cls.f_over_j],
    }
    _emit(dumps(out), None)
    return EXIT_OK


def cmd_solve(args) -> int:
    inst = parse_instance_file(args.instance)
    budget = args.budget if args.budget is not None else _default_budget()
    code = EXIT_OK
    try:
        packing, cert = run_algorithm(
            inst, args.algorithm, args.epsilon, budget, args.force, args.oracle_limit
        )
    except AptasBudgetExceeded as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        if exc.packing is None:
            return EXIT_BUDGET
        packing, cert, code = exc.packing, exc.certificate.to_dict(), EXIT_BUDGET
    except BudgetExceeded as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    report = verify_packing(inst, packing)
    _emit(dumps(packing_document(inst, packing, cert, args.algorithm)), args.output)
    if not report:
        print(f"verification failed: {report}", file=sys.stderr)
        return EXIT_INFEASIBLE
    return code


def cmd_gen(args) -> int:
    data = generate_random_instance(
        args.n,
        size_model=args.size_model,
        cost_model=args.cost_model,
        seed=args.seed,
        denominator=args.denominator,
        values=args.values,
        K=args.K,
        penalty=args.penalty,
        name=args.name,
    )
    _write_instance(data, args.output)
    return EXIT_OK


def _write_instance(data, output) -> None:
    if output:
        write_instance_file(output, data)
    else:
        sys.stdout.write(dumps(data.to_dict()))


def cmd_reduce(args) -> int:
    tp = ThreePartitionInput(tuple(args.integers), args.bound, args.k)
    data, threshold = reduce_3partition(tp)
    _write_instance(data, args.output)
    print(f"threshold {threshold}", file=sys.stderr)
    return EXIT_OK


def cmd_verify(args) -> int:
    inst = parse_instance_file(args.instance)
    packing = read_packing_file(args.packing)
    report = verify_packing(inst, packing)
    if report:
        cost = packing_cost(inst, packing)
        print(f"ok bins={len(packing)} cost={cost} raw_cost={inst.cost.raw(cost)}")
        return EXIT_OK
    for line in report.violations():
        print(line)
    return EXIT_INFEASIBLE


def cmd_bench(args) -> int:
    cases = []
    for path in args.instances:
        name = read_instance_file(path).metadata.get("name") or Path(path).stem
        cases.append(BenchCase(str(name), parse_instance_file(path)))
    budget = args.budget if args.budget is not None else _default_budget()
    records = bench(
        cases, args.algorithms, args.epsilon, args.oracle_limit, budget, args.timing
    )
    if args.jsonl:
        Path(args.jsonl).write_text(to_jsonl(records))
    _emit(format_table(records), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="gcbp", description="Bin packing with cardinality-dependent bin costs.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("classify", help="report the cost function's tractability class")
    c.add_argument("instance")
    c.set_defaults(func=cmd_classify)

    s = sub.add_parser("solve", help="pack an instance and write a packing file")
    s.add_argument("instance")
    s.add_argument("--algorithm", choices=ALGORITHMS, default="auto")
    s.add_argument("--epsilon", type=_rational, default=Fraction(1, 2))
    s.add_argument("--budget", type=int, default=None, help=f"node budget (default ${BUDGET_ENV})")
    s.add_argument("--force", action="store_true", help="run an exact solver outside its class")
    s.add_argument("--oracle-limit", type=int, default=DEFAULT_LIMIT)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_solve)

    g = sub.add_parser("gen", help="generate a seeded random instance")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--size-model", choices=SIZE_MODELS, default="uniform")
    g.add_argument("--cost-model", choices=COST_MODELS, default="random")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--denominator", type=int, default=10)
    g.add_argument("--values", type=_rationals, help="comma-separated sizes for the discrete model")
    g.add_argument("--K", type=int, help="cardinality limit for the step cost model")
    g.add_argument("--penalty", type=_rational, help="cost above the limit for the step model")
    g.add_argument("--name")
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("reduce-3p", help="build a hardness instance from a 3-Partition input")
    r.add_argument("--integers", type=lambda t: [int(x) for x in t.split(",")], required=True)
    r.add_argument("--bound", type=int, required=True)
    r.add_argument("--k", type=int, default=3)
    r.add_argument("-o", "--output")
    r.set_defaults(func=cmd_reduce)

    v = sub.add_parser("verify", help="check a packing file against an instance")
    v.add_argument("instance")
    v.add_argument("packing")
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="run algorithms over instance files")
    b.add_argument("instances", nargs="*")
    b.add_argument(
        "--algorithms",
        type=lambda t: t.split(","),
        default=["greedy", "aptas", "oracle"],
    )
    b.add_argument("--epsilon", type=_rationals, default=[Fraction(1, 2)])
    b.add_argument("--budget", type=int, default=None)
    b.add_argument("--oracle-limit", type=int, default=DEFAULT_LIMIT)
    b.add_argument("--timing", action="store_true", help="record wall time per row")
    b.add_argument("--jsonl", help="write one JSON record per row here")
    b.add_argument("-o", "--output")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (GcbpError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

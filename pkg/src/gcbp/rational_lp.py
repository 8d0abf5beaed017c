"""Exact rational linear programming.

A two-phase primal simplex over :class:`fractions.Fraction` with Bland's
rule.  Rows of the tableau are sparse ``{column: coefficient}`` dicts, which
keeps the configuration LPs (mostly zero) cheap to pivot.

All variables are non-negative.  Returned solutions are basic: at most one
strictly positive variable per (non-redundant) constraint.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

__all__ = [
    "Relation",
    "Status",
    "Constraint",
    "LpModel",
    "LpSolution",
    "solve_lp",
    "find_basic_feasible",
    "to_lp_text",
]

_ZERO = Fraction(0)
_ONE = Fraction(1)


class Relation(Enum):
    LE = "<="
    EQ = "="
    GE = ">="


class Status(Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"


@dataclass(frozen=True)
class Constraint:
    coeffs: Mapping[int, Fraction]
    relation: Relation
    rhs: Fraction


@dataclass
class LpModel:
    """``min objective·x`` subject to ``constraints`` and ``x >= 0``."""

    num_vars: int
    objective: list[Fraction] = field(default_factory=list)
    constraints: list[Constraint] = field(default_factory=list)

    def __post_init__(self):
        if not self.objective:
            self.objective = [_ZERO] * self.num_vars
        if len(self.objective) != self.num_vars:
            raise ValueError("objective length must equal num_vars")

    def add_constraint(
        self,
        coeffs: Sequence | Mapping[int, object],
        relation: Relation | str,
        rhs,
    ) -> None:
        if not isinstance(coeffs, Mapping):
            if len(coeffs) != self.num_vars:
                raise ValueError("coefficient list length must equal num_vars")
            coeffs = dict(enumerate(coeffs))
        clean = {}
        for j, v in coeffs.items():
            if not 0 <= j < self.num_vars:
                raise ValueError(f"variable index {j} out of range")
            v = Fraction(v)
            if v:
                clean[j] = v
        self.constraints.append(Constraint(clean, Relation(relation), Fraction(rhs)))

    def evaluate(self, x: Sequence[Fraction]) -> Fraction:
        return sum((c * v for c, v in zip(self.objective, x) if c), _ZERO)

    def is_feasible(self, x: Sequence[Fraction]) -> bool:
        if any(v < 0 for v in x):
            return False
        for con in self.constraints:
            lhs = sum((c * x[j] for j, c in con.coeffs.items()), _ZERO)
            if con.relation is Relation.LE and lhs > con.rhs:
                return False
            if con.relation is Relation.GE and lhs < con.rhs:
                return False
            if con.relation is Relation.EQ and lhs != con.rhs:
                return False
        return True


@dataclass(frozen=True)
class LpSolution:
    status: Status
    values: tuple[Fraction, ...] = ()
    objective_value: Fraction | None = None
    is_basic: bool = False

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL

    def support(self) -> int:
        return sum(1 for v in self.values if v > 0)


class _Tableau:
    def __init__(self, model: LpModel):
        self.num_vars = model.num_vars
        ncol = model.num_vars
        self.rows: list[dict[int, Fraction]] = []
        self.rhs: list[Fraction] = []
        self.basis: list[int] = []
        self.artificial: set[int] = set()
        for con in model.constraints:
            row = dict(con.coeffs)
            rel, b = con.relation, con.rhs
            if b < 0:
                row = {j: -v for j, v in row.items()}
                b = -b
                if rel is Relation.LE:
                    rel = Relation.GE
                elif rel is Relation.GE:
                    rel = Relation.LE
            if rel is Relation.LE:
                row[ncol] = _ONE
                self.basis.append(ncol)
                ncol += 1
            else:
                if rel is Relation.GE:
                    row[ncol] = -_ONE
                    ncol += 1
                row[ncol] = _ONE
                self.artificial.add(ncol)
                self.basis.append(ncol)
                ncol += 1
            self.rows.append(row)
            self.rhs.append(b)
        self.ncol = ncol
        self.cost: dict[int, Fraction] = {}
        self.value = _ZERO

    def pivot(self, r: int, e: int) -> None:
        row = self.rows[r]
        piv = row[e]
        if piv != 1:
            row = {j: v / piv for j, v in row.items()}
            self.rows[r] = row
            self.rhs[r] /= piv
        br = self.rhs[r]
        for i, other in enumerate(self.rows):
            if i == r:
                continue
            a = other.get(e)
            if a is None:
                continue
            _axpy(other, row, a)
            if br:
                self.rhs[i] -= a * br
        d = self.cost.get(e)
        if d is not None:
            _axpy(self.cost, row, d)
            self.value += d * br
        self.basis[r] = e

    def entering(self) -> int | None:
        best = None
        for j, d in self.cost.items():
            if d < 0 and (best is None or j < best):
                best = j
        return best

    def leaving(self, e: int) -> int | None:
        best_r = None
        best_ratio = None
        for i, row in enumerate(self.rows):
            a = row.get(e)
            if a is None or a <= 0:
                continue
            ratio = self.rhs[i] / a
            if (
                best_r is None
                or ratio < best_ratio
                or (ratio == best_ratio and self.basis[i] < self.basis[best_r])
            ):
                best_r, best_ratio = i, ratio
        return best_r

    def run(self) -> bool:
        """Pivot to optimality; False if the objective is unbounded below."""
        while True:
            e = self.entering()
            if e is None:
                return True
            r = self.leaving(e)
            if r is None:
                return False
            self.pivot(r, e)

    def set_objective(self, c: Mapping[int, Fraction]) -> None:
        cost = {j: v for j, v in c.items() if v}
        value = _ZERO
        for i, bvar in enumerate(self.basis):
            cb = c.get(bvar)
            if cb:
                _axpy(cost, self.rows[i], cb)
                value += cb * self.rhs[i]
        self.cost = cost
        self.value = value

    def phase_one(self) -> bool:
        if not self.artificial:
            return True
        self.set_objective({a: _ONE for a in self.artificial})
        self.run()
        if self.value > 0:
            return False
        keep = []
        for i, bvar in enumerate(self.basis):
            if bvar in self.artificial:
                col = next(
                    (j for j in sorted(self.rows[i]) if j not in self.artificial), None
                )
                if col is None:
                    continue  # redundant row
                self.pivot(i, col)
            keep.append(i)
        self.rows = [self.rows[i] for i in keep]
        self.rhs = [self.rhs[i] for i in keep]
        self.basis = [self.basis[i] for i in keep]
        for row in self.rows:
            for a in self.artificial.intersection(row):
                del row[a]
        self.artificial = set()
        self.cost = {}
        self.value = _ZERO
        return True

    def values(self) -> tuple[Fraction, ...]:
        x = [_ZERO] * self.num_vars
        for i, bvar in enumerate(self.basis):
            if bvar < self.num_vars:
                x[bvar] = self.rhs[i]
        return tuple(x)


def _axpy(target: dict[int, Fraction], row: Mapping[int, Fraction], a: Fraction) -> None:
    """``target -= a * row`` in place, dropping exact zeros."""
    for j, v in row.items():
        nv = target.get(j, _ZERO) - a * v
        if nv:
            target[j] = nv
        else:
            target.pop(j, None)


def solve_lp(m: LpModel) -> LpSolution:
    t = _Tableau(m)
    if not t.phase_one():
        return LpSolution(Status.INFEASIBLE)
    t.set_objective(dict(enumerate(m.objective)))
    if not t.run():
        return LpSolution(Status.UNBOUNDED)
    x = t.values()
    return LpSolution(Status.OPTIMAL, x, m.evaluate(x), True)


def find_basic_feasible(m: LpModel) -> LpSolution:
    """Any basic feasible point; the objective is ignored."""
    t = _Tableau(m)
    if not t.phase_one():
        return LpSolution(Status.INFEASIBLE)
    x = t.values()
    return LpSolution(Status.OPTIMAL, x, m.evaluate(x), True)


def to_lp_text(m: LpModel, integer_vars: Iterable[int] = ()) -> str:
    """Render the model in CPLEX LP format for cross-checking elsewhere.

    Coefficients are written as ``p/q``; most LP readers need them converted
    to decimals first, which is left to the caller.
    """

    def term(c: Fraction, j: int) -> str:
        sign = "-" if c < 0 else "+"
        return f"{sign} {abs(c)} x{j}"

    def expr(coeffs: Mapping[int, Fraction]) -> str:
        body = " ".join(term(c, j) for j, c in sorted(coeffs.items()) if c)
        return body or "0 x0"

    lines = ["Minimize", " obj: " + expr(dict(enumerate(m.objective))), "Subject To"]
    for k, con in enumerate(m.constraints):
        lines.append(f" c{k}: {expr(con.coeffs)} {con.relation.value} {con.rhs}")
    ints = sorted(set(integer_vars))
    if ints:
        lines.append("General")
        lines.append(" " + " ".join(f"x{j}" for j in ints))
    lines.append("End")
    return "\n".join(lines) + "\n"

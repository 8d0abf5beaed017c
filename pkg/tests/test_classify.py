from fractions import Fraction as Q

import pytest
from hypothesis import given, strategies as st

from gcbp.classify import IndexOutOfRange, Verdict, average_cost, minimizer_k
from gcbp.core import validate_instance

from oracles import scan_minimizer


def cost(table):
    return validate_instance([0] * (len(table) - 1), table).cost


@pytest.mark.parametrize(
    "table, j, expected",
    [([0, 1, 1, 1], 3, Q(1, 3)), ([0, 1, Q(6, 5), Q(19, 10)], 2, Q(3, 5)), ([0, 1, 2], 2, Q(1))],
)
def test_average_cost(table, j, expected):
    assert average_cost(cost(table), j) == expected


def test_average_cost_out_of_range():
    with pytest.raises(IndexOutOfRange):
        average_cost(cost([0, 1, 2]), 3)
    with pytest.raises(IndexOutOfRange):
        average_cost(cost([0, 1, 2]), 0)


def test_linear_ties_to_one():
    c = minimizer_k(cost([0, 1, 2, 3, 4]))
    assert c.k == 1 and c.verdict is Verdict.POLY_K1


def test_k2_example():
    c = minimizer_k(cost([0, 1, Q(6, 5), Q(19, 10), 3]))
    assert c.f_over_j == (1, Q(3, 5), Q(19, 30), Q(3, 4))
    assert c.k == 2 and c.verdict is Verdict.POLY_K2


def test_flat_cost_is_hard():
    c = minimizer_k(cost([0, 1, 1, 1, 1]))
    assert c.f_over_j == (1, Q(1, 2), Q(1, 3), Q(1, 4))
    assert c.k == 4 and c.verdict is Verdict.NP_HARD


def test_empty_domain():
    assert minimizer_k(cost([0])).k == 1


tables = st.lists(st.fractions(0, 2, max_denominator=6), min_size=0, max_size=10).map(
    lambda incs: [Q(0), Q(1)] + [Q(1) + sum(incs[: k + 1], Q(0)) for k in range(len(incs))]
)


@given(tables)
def test_matches_scan_and_strict_before_k(table):
    c = minimizer_k(cost(table))
    assert c.k == scan_minimizer(table)
    F = c.f_over_j
    assert all(F[c.k - 1] <= x for x in F)
    assert all(F[j] > F[c.k - 1] for j in range(c.k - 1))


@given(tables, st.fractions(Q(1, 9), 10, max_denominator=9))
def test_scale_invariance(table, scale):
    a = minimizer_k(cost(table))
    b = minimizer_k(cost([x * scale for x in table]))
    assert (a.k, a.verdict) == (b.k, b.verdict)

import random
from fractions import Fraction as Q

import pytest

from gcbp.core import packing_cost, validate_instance, verify_packing
from gcbp.exact_poly import (
    MatchingGraph,
    WrongClass,
    build_matching_graph,
    k2_guesses,
    matching_weight,
    max_weight_matching_exact_size,
    solve_k1,
    solve_k2,
)
from gcbp.oracle import brute_force_opt

from oracles import k1_table, k2_table, matching_profile, random_sizes

K2_COST = [0, 1, Q(6, 5), Q(19, 10), 3]


def test_k1_singletons():
    inst = validate_instance([Q(1, 2)] * 3, [0, 1, 2, 3])
    p = solve_k1(inst)
    assert sorted(p.bins) == [(1,), (2,), (3,)] and packing_cost(inst, p) == 3


def test_k1_empty():
    inst = validate_instance([], [0])
    assert len(solve_k1(inst)) == 0


def test_k1_wrong_class_and_force():
    inst = validate_instance([0, 0], [0, 1, 1])
    with pytest.raises(WrongClass):
        solve_k1(inst)
    forced = solve_k1(inst, force=True)
    assert packing_cost(inst, forced) == 2
    assert packing_cost(inst, brute_force_opt(inst)) == 1


def test_matching_example():
    inst = validate_instance([Q(3, 5), Q(3, 5), Q(3, 10), Q(3, 10)], [0, 1, 1, 1, 1])
    g = build_matching_graph(inst, [1, 2, 3, 4])
    m = max_weight_matching_exact_size(g, 2)
    assert matching_weight(m) == Q(9, 5)
    assert {frozenset(e[:2]) for e in m} in (
        {frozenset({1, 3}), frozenset({2, 4})},
        {frozenset({1, 4}), frozenset({2, 3})},
    )


def test_matching_zero_and_infeasible():
    inst = validate_instance([Q(3, 5), Q(3, 5)], [0, 1, 1])
    g = build_matching_graph(inst, [1, 2])
    assert g.edges == ()
    assert max_weight_matching_exact_size(g, 0) == []
    assert max_weight_matching_exact_size(g, 1) is None


def test_matching_rejects_self_loop():
    with pytest.raises(ValueError):
        max_weight_matching_exact_size(MatchingGraph((1, 2), ((1, 1, Q(1)),)), 1)


def test_k2_example_pairs():
    inst = validate_instance([Q(3, 5), Q(3, 5), Q(3, 10), Q(3, 10)], K2_COST)
    p = solve_k2(inst)
    assert verify_packing(inst, p) and packing_cost(inst, p) == Q(12, 5)
    assert sorted(len(b) for b in p.bins) == [2, 2]


def test_k2_single_item():
    inst = validate_instance([1], [0, 1])
    # n = 1 makes the minimizer 1; force the pair solver
    assert packing_cost(inst, solve_k2(inst, force=True)) == 1


def test_k2_odd_bin_wins():
    inst = validate_instance([Q(1, 4)] * 3, [0, 1, Q(6, 5), Q(19, 10)])
    p = solve_k2(inst)
    assert packing_cost(inst, p) == Q(19, 10)
    assert packing_cost(inst, brute_force_opt(inst)) == Q(19, 10)


def test_k2_wrong_class():
    with pytest.raises(WrongClass):
        solve_k2(validate_instance([0, 0, 0], [0, 1, 1, 1]))


def test_guess_space():
    for n in range(0, 8):
        for g in k2_guesses(n):
            assert g.singletons + g.odd_bin + g.paired == n
            assert g.odd_bin == 0 or (g.odd_bin >= 3 and g.odd_bin % 2 == 1)
            assert g.paired % 2 == 0


def test_solvers_match_oracle_random():
    rng = random.Random(2024)
    for _ in range(80):
        n = rng.randint(2, 7)
        inst = validate_instance(random_sizes(rng, n), k1_table(rng, n))
        assert packing_cost(inst, solve_k1(inst)) == packing_cost(inst, brute_force_opt(inst))
        inst = validate_instance(random_sizes(rng, n), k2_table(rng, n))
        p = solve_k2(inst)
        assert verify_packing(inst, p)
        assert packing_cost(inst, p) == packing_cost(inst, brute_force_opt(inst))


def test_matching_profile_concave_on_random_graphs():
    rng = random.Random(7)
    for _ in range(60):
        n = rng.randint(0, 8)
        inst = validate_instance(random_sizes(rng, n), [0] + list(range(1, n + 1)))
        g = build_matching_graph(inst, list(inst.ids()))
        prof = matching_profile(g.node_ids, g.edges)
        for m in range(n // 2 + 2):
            got = max_weight_matching_exact_size(g, m)
            if m in prof:
                assert got is not None and len(got) == m and matching_weight(got) == prof[m]
            else:
                assert got is None
        for m in range(1, max(prof)):
            assert prof[m - 1] + prof[m + 1] <= 2 * prof[m]

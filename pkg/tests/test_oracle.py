import random
from fractions import Fraction as Q

import pytest

from gcbp.core import packing_cost, validate_instance, verify_packing
from gcbp.oracle import TooLarge, brute_force_opt, greedy_baseline

from oracles import partition_opt, random_instance


def test_pairs_of_halves():
    inst = validate_instance([Q(1, 2)] * 4, [0, 1, 1, 1, 1])
    p = brute_force_opt(inst)
    assert verify_packing(inst, p) and packing_cost(inst, p) == 2


def test_single_item():
    inst = validate_instance([Q(7, 10)], [0, 1])
    assert packing_cost(inst, brute_force_opt(inst)) == 1


def test_zero_items_share_one_bin():
    inst = validate_instance([0, 0, 0], [0, 1, 1, 1])
    assert packing_cost(inst, brute_force_opt(inst)) == 1


def test_empty():
    inst = validate_instance([], [0])
    assert len(brute_force_opt(inst)) == 0


def test_limit():
    inst = validate_instance([0] * 13, [0] + [1] * 13)
    with pytest.raises(TooLarge):
        brute_force_opt(inst)
    assert packing_cost(inst, brute_force_opt(inst, limit_n=13)) == 1


def test_dp_agrees_with_partition_enumeration():
    rng = random.Random(11)
    for _ in range(150):
        inst = random_instance(rng, rng.randint(0, 6))
        p = brute_force_opt(inst)
        assert verify_packing(inst, p)
        assert packing_cost(inst, p) == partition_opt(inst)


def test_greedy_linear_gives_singletons():
    inst = validate_instance([Q(1, 10)] * 3, [0, 1, 2, 3])
    assert sorted(greedy_baseline(inst).bins) == [(1,), (2,), (3,)]


def test_greedy_first_fit_trace():
    inst = validate_instance([Q(1, 2)] * 4, [0, 1, 1, 1, 1])
    p = greedy_baseline(inst)
    assert p.bins == ((1, 2), (3, 4)) and packing_cost(inst, p) == 2


def test_greedy_respects_capacity():
    inst = validate_instance([Q(3, 5)] * 2, [0, 1, 1])
    assert packing_cost(inst, greedy_baseline(inst)) == 2


def test_greedy_never_overfull_and_never_below_opt():
    rng = random.Random(5)
    for _ in range(200):
        inst = random_instance(rng, rng.randint(0, 8))
        p = greedy_baseline(inst)
        assert verify_packing(inst, p)
        assert packing_cost(inst, p) >= packing_cost(inst, brute_force_opt(inst))

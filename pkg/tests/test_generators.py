from fractions import Fraction as Q

import pytest

from gcbp.classify import minimizer_k
from gcbp.core import packing_cost, validate_instance
from gcbp.generators import (
    COST_MODELS,
    BadModel,
    InvalidThreePartition,
    ThreePartitionInput,
    generate_random_instance,
    reduce_3partition,
    reduction_cost,
)
from gcbp.oracle import brute_force_opt


def test_flat():
    assert generate_random_instance(4, cost_model="flat").cost == [0, 1, 1, 1, 1]


def test_step_shape():
    data = generate_random_instance(4, cost_model="step", K=2)
    assert data.cost == [0, 1, 1, 4, 4]


@pytest.mark.parametrize("model", COST_MODELS)
def test_models_validate_and_are_deterministic(model):
    kw = {"K": 2} if model == "step" else {}
    a = generate_random_instance(7, cost_model=model, seed=5, **kw)
    b = generate_random_instance(7, cost_model=model, seed=5, **kw)
    assert a == b
    a.to_instance()


def test_concave_increments():
    c = generate_random_instance(9, cost_model="concave", seed=2).cost
    d = [c[j + 1] - c[j] for j in range(len(c) - 1)]
    assert all(x >= y for x, y in zip(d, d[1:]))


def test_discrete_sizes():
    data = generate_random_instance(6, size_model="discrete", values=["1/3", "1/2"], seed=1)
    assert set(data.sizes) <= {Q(1, 3), Q(1, 2)}


def test_bad_models():
    with pytest.raises(BadModel):
        generate_random_instance(3, size_model="gauss")
    with pytest.raises(BadModel):
        generate_random_instance(3, cost_model="cubic")
    with pytest.raises(BadModel):
        generate_random_instance(3, cost_model="step")
    with pytest.raises(BadModel):
        generate_random_instance(3, size_model="discrete")


def test_seed_changes_output():
    assert generate_random_instance(8, seed=1) != generate_random_instance(8, seed=2)


@pytest.mark.parametrize("k", [3, 4, 5, 7])
def test_reduction_cost_minimizer(k):
    n = 3 * k
    table = reduction_cost(n, k)
    assert all(a <= b for a, b in zip(table, table[1:]))
    assert minimizer_k(validate_instance([0] * n, table).cost).k == k


def test_reduce_yes_instance_k4():
    data, threshold = reduce_3partition(ThreePartitionInput((2,) * 6, 6, 4))
    assert data.sizes.count(Q(1, 3)) == 6 and data.sizes.count(0) == 2
    inst = data.to_instance()
    assert threshold == 2 * inst.cost.table[4]
    assert packing_cost(inst, brute_force_opt(inst)) == threshold
    assert data.metadata["threshold"] == str(threshold)


def test_reduce_no_instance_k4():
    data, threshold = reduce_3partition(ThreePartitionInput((6, 6, 6, 6, 7, 9), 20, 4))
    inst = data.to_instance()
    assert packing_cost(inst, brute_force_opt(inst)) > threshold


def test_reduce_k3_has_no_padding():
    data, _ = reduce_3partition(ThreePartitionInput((2,) * 6, 6, 3))
    assert len(data.sizes) == 6


@pytest.mark.parametrize(
    "tp",
    [
        ThreePartitionInput((2, 2, 2), 6, 2),
        ThreePartitionInput((1, 2, 3), 6, 3),
        ThreePartitionInput((2, 2, 2, 2), 6, 3),
        ThreePartitionInput((2, 2, 3), 6, 3),
    ],
)
def test_reduce_rejects_invalid(tp):
    with pytest.raises(InvalidThreePartition):
        reduce_3partition(tp)

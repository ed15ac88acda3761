import numpy as np
import pytest
from hypothesis import given, strategies as st

from divexpand.geom import (BudgetExceeded, DivisibilityInstance, count_solutions_bruteforce,
                            lemma_bound, random_instance)


def _inst(M, c, d, N, C, D):
    return DivisibilityInstance(M, c, d, N, C, D)


def test_one_dimensional_example():
    inst = _inst(((1,),), (0,), (5,), (10,), 1, 5)
    assert count_solutions_bruteforce(inst) == 3  # 10, 15, 20
    assert lemma_bound(inst) == pytest.approx(4.0)


def test_identity_example():
    inst = _inst(((1, 0), (0, 1)), (0, 0), (2, 3), (10, 10), 1, 2)
    # 6 even numbers and 3 multiples of 3 in [10, 20]
    assert count_solutions_bruteforce(inst) == 6 * 3
    assert lemma_bound(inst) == pytest.approx(400.0)


def _slow_count(inst):
    import itertools
    total = 0
    for n in itertools.product(*(range(N, 2 * N + 1) for N in inst.N)):
        v = [sum(a * x for a, x in zip(row, n)) + c for row, c in zip(inst.M, inst.c)]
        total += all(x % d == 0 for x, d in zip(v, inst.d))
    return total


@given(st.integers(0, 10**6))
def test_vectorized_count_matches_loop(seed):
    inst = random_instance(np.random.default_rng(seed), max_m=2, max_N=25)
    assert count_solutions_bruteforce(inst) == _slow_count(inst)


def test_invariants_rejected():
    with pytest.raises(ValueError, match="singular"):
        _inst(((1, 2), (2, 4)), (0, 0), (3, 3), (5, 5), 4, 3)
    with pytest.raises(ValueError):
        _inst(((6,),), (0,), (3,), (5,), 5, 3)
    with pytest.raises(ValueError):
        _inst(((1,),), (0,), (2,), (5,), 1, 3)
    with pytest.raises(ValueError):
        _inst(((1,),), (0,), (3,), (2,), 1, 3)


def test_budget():
    inst = _inst(((1, 0), (0, 1)), (0, 0), (2, 2), (5000, 5000), 1, 2)
    with pytest.raises(BudgetExceeded):
        count_solutions_bruteforce(inst)


@given(st.integers(0, 10**6))
def test_bound_holds_on_random_instances(seed):
    inst = random_instance(np.random.default_rng(seed))
    assert count_solutions_bruteforce(inst) <= lemma_bound(inst)


def test_bound_monotone_in_parameters():
    base = dict(M=((1, 1), (0, 1)), c=(0, 0), d=(20, 20), N=(20, 20))
    vals_C = [lemma_bound(_inst(C=C, D=2, **base)) for C in range(1, 6)]
    assert vals_C == sorted(vals_C)
    vals_D = [lemma_bound(_inst(C=2, D=D, **base)) for D in range(1, 20)]
    assert vals_D == sorted(vals_D, reverse=True)

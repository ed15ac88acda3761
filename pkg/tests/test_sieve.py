import itertools
import json
import math
import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from _oracles import sieve_graph_counts, yell3_complement_scan
from divexpand.arith import PrimeSet, build_prime_set, primes_between
from divexpand.sieve import (ZZ, BudgetExceeded, Progression, SieveGraph, Thread,
                             abstract_sieve_identity, build_FD, build_Yell_conditions,
                             count_by_threads, coverage_mask, cross_cut_sum, dump_family,
                             enumerate_sieve_graphs, injective_power_sum, is_in_Yell, load_family,
                             omega, sieve_error_bound, thread_sum_bound, valid_thread_signs,
                             yell_mask)

SQUAREFREE = [q for q in range(1, 211) if all(q % (p * p) for p in (2, 3, 5, 7, 11, 13))]


def test_progression_basics():
    P = Progression(-1, 6)
    assert P.a == 5 and 11 in P and 12 not in P and repr(P) == "5 mod 6"
    assert Progression.parse("5 mod 6") == P
    assert load_family(dump_family([P, ZZ])) == [P, ZZ]
    assert P.members(1, 20).tolist() == [5, 11, 17]
    assert P.shift(1) == Progression(4, 6)
    assert Progression(1, 2).contains(P)
    with pytest.raises(ValueError):
        Progression(0, 12)


@given(st.sampled_from(SQUAREFREE), st.integers(0, 500), st.sampled_from(SQUAREFREE), st.integers(0, 500))
def test_intersection_matches_scan(q1, a1, q2, a2):
    A, B = Progression(a1, q1), Progression(a2, q2)
    C = A.intersect(B)
    L = math.lcm(q1, q2)
    members = [n for n in range(L) if n in A and n in B]
    if C is None:
        assert members == []
    else:
        assert C.q == L and members == [C.a]


def test_abstract_identity_examples():
    assert abstract_sieve_identity(["a", "b", "c"], lambda T: 1) == (0, 0)
    assert abstract_sieve_identity([], lambda T: 1) == (1, 0)
    assert abstract_sieve_identity(["a", "b"], lambda T: int(not T)) == (1, -1)
    with pytest.raises(ValueError):
        abstract_sieve_identity(["a"], lambda T: 2)


@given(st.integers(0, 8), st.integers(0, 10**6))
def test_abstract_identity_random(n, seed):
    rnd = random.Random(seed)
    vals = {}

    def g(T):
        if not T:
            return 1
        return vals.setdefault(T, rnd.randint(-3, 3))

    main, rem = abstract_sieve_identity(list(range(n)), g)
    assert main + rem == (0 if n else 1)


def test_cross_cut_examples():
    assert cross_cut_sum([frozenset("a")]) == -1
    assert cross_cut_sum([], frozenset()) == 1


@given(st.lists(st.frozensets(st.integers(0, 4), min_size=1), max_size=8))
def test_cross_cut_bound(C):
    X = frozenset().union(*C)
    assert abs(cross_cut_sum(C, X)) <= 2 ** len(X)


def test_fd_full_inclusion_exclusion():
    ap = build_FD([Progression(0, 2), Progression(0, 3)], m=2)
    assert ap.coeffs == {ZZ: 1, Progression(0, 2): -1, Progression(0, 3): -1, Progression(0, 6): 1}
    for n in range(1, 100):
        assert ap.F(n) == (math.gcd(n, 6) == 1)
        assert sieve_error_bound(ap, n) == (0, 0)
    rows = json.loads(ap.to_json())
    assert {"R": "0 mod 6", "c": 1} in rows


def test_fd_omega_one():
    fam = [Progression(0, 2), Progression(0, 3), Progression(0, 5)]
    ap = build_FD(fam, m=1)
    assert set(ap.coeffs) == {ZZ, *fam}
    for n in range(1, 211):
        sieve_error_bound(ap, n)
    inner, outer = sieve_error_bound(ap, 30)
    assert {R.q for R in ap.out_boundary} == {6, 10, 15}
    assert inner > 0 and outer > 0


def test_fd_rejects_bad_input():
    with pytest.raises(ValueError):
        build_FD([Progression(0, 2)])
    with pytest.raises(ValueError):
        build_FD([Progression(0, 2)], m=1, ideal=lambda R: True)


@given(st.lists(st.tuples(st.sampled_from([2, 3, 5, 7, 6, 10, 15, 21, 35]), st.integers(0, 209)),
                min_size=1, max_size=5), st.integers(0, 3))
def test_fd_pointwise_over_period(items, m):
    fam = [Progression(a, q) for q, a in items]
    ap = build_FD(fam, m=m)
    for R, c in ap.coeffs.items():
        assert abs(c) <= 2 ** omega(R.q)
    for n in range(210):
        sieve_error_bound(ap, n)


def test_fd_custom_ideal():
    fam = [Progression(0, 2), Progression(1, 3), Progression(0, 5)]
    ap = build_FD(fam, ideal=lambda R: R.q <= 6)
    for n in range(30):
        sieve_error_bound(ap, n)


def test_yell_small_horizon_is_empty():
    assert build_Yell_conditions(primes_between(11, 60).tolist(), 2) == []


def test_yell_worked_progression():
    fam = build_Yell_conditions([11, 13, 31], 3)
    assert Progression(2002, 4433) in fam
    assert not is_in_Yell(2002, [11, 13, 31], 3)
    assert 2002 % 11 == 0 and 2002 % 13 == 0 and 2015 % 31 == 0 and 2046 % 11 == 0


def test_yell_coprime_is_in():
    assert is_in_Yell(1, [11, 13], 3) and is_in_Yell(17 * 19, [11, 13], 4)


def test_yell_matches_definition_scan():
    P = build_prime_set(11, 60)
    N = 30000
    want = yell3_complement_scan(P.primes, N)
    assert np.array_equal(coverage_mask(build_Yell_conditions(P, 3), 1, N), want)
    assert np.array_equal(~yell_mask(P, 3, 1, N), want)
    for n in range(1, N + 1, 37):
        assert is_in_Yell(n, P, 3) == (not want[n - 1])


def test_yell_shifts_and_budget():
    base = build_Yell_conditions([11, 13, 31], 3)
    shifted = build_Yell_conditions([11, 13, 31], 3, shifts=(0, 5))
    assert set(base) <= set(shifted) and {R.shift(5) for R in base} <= set(shifted)
    with pytest.raises(BudgetExceeded):
        build_Yell_conditions(primes_between(11, 1000).tolist(), 4, budget=1000)


def test_yell_complement_density():
    P = build_prime_set(11, 60)
    N = 10**5
    excluded = int(coverage_mask(build_Yell_conditions(P, 3), 1, N).sum())
    assert excluded <= 10 * P.scriptL ** 3 * N / P.H0


def test_sieve_graphs_zero_cost():
    gs = enumerate_sieve_graphs(2, 3, 0)
    assert all(g.r == 0 for g in gs) and len(gs) == 15


def test_single_closed_thread():
    def has_it(ell):
        return any(g.threads == (Thread("closed", 0, 2),) and len(set(g.labels[4:])) == 1
                   for g in enumerate_sieve_graphs(2, ell, 1))
    assert has_it(3) and not has_it(2)


@pytest.mark.parametrize("args", [(1, 2, 1), (1, 3, 2), (2, 3, 1), (2, 3, 2)])
def test_sieve_graph_counts_match_oracle(args):
    gs = enumerate_sieve_graphs(*args)
    assert count_by_threads(gs) == sieve_graph_counts(*args)
    assert all(g.r <= g.cost <= args[2] for g in gs)
    assert len(set(gs)) == len(gs)


def test_strong_non_redundancy_flag():
    g = SieveGraph(2, (Thread("closed", 0, 2),), (0, 1, 0, 0))
    assert g.is_strongly_non_redundant([]) and not g.is_strongly_non_redundant([0])


def test_injective_power_sum_matches_enumeration():
    primes = [11, 13, 17, 19, 23]
    exps = [1, 2, 1]
    brute = sum(math.prod(p ** -e for p, e in zip(ps, exps))
                for ps in itertools.permutations([p for p in primes if p != 13], 3))
    assert injective_power_sum(exps, primes, excluded=[13]) == pytest.approx(brute)


def test_thread_sum_no_threads():
    P = build_prime_set(11, 60)
    g = SieveGraph(4, (), (0, 1, 0, 2))
    bound, brute = thread_sum_bound(g, [], P, check=True)
    assert bound == pytest.approx(P.scriptL ** 3) and brute <= bound


def test_thread_sum_closed_opposite_signs():
    P = build_prime_set(11, 60)
    g = SieveGraph(4, (Thread("closed", 0, 2),), (2, 2, 2, 2, 0, 1))
    _, brute = thread_sum_bound(g, [], P, signs={4: 1, 5: -1})
    assert brute == 0


def test_thread_sum_open_thread():
    P = build_prime_set(11, 101)
    g = SieveGraph(2, (Thread("open", 0, 2),), (3, 3, 0, 1, 2, 2))
    worst = 0.0
    for signs in valid_thread_signs(g):
        for lit in ([], [0], [0, 1]):
            bound, brute = thread_sum_bound(g, lit, P, signs=signs, check=True)
            worst = max(worst, brute / bound)
    assert 0 < worst <= 4


def test_thread_sum_rejects_bad_signs():
    P = build_prime_set(11, 30)
    g = SieveGraph(2, (Thread("closed", 0, 2),), (1, 1, 0, 0))
    with pytest.raises(ValueError):
        thread_sum_bound(g, [], P, signs={2: 1, 3: -1})
    with pytest.raises(ValueError):
        thread_sum_bound(g, [5], P)

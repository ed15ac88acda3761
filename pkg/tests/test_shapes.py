import itertools
import json

import pytest
from hypothesis import given, strategies as st

from _oracles import reduce_bruteforce, revenants_bruteforce
from divexpand.shapes import (Coloring, ReducedShape, ShapeRecord, bell, build_shape_graph,
                              class_blocks, count_gaps, enumerate_shapes, gap_is_balanced,
                              linear_gaps, max_disjoint_revenants, reduce_shape, reduce_word,
                              reduced_graph, rgs_partitions, shape_contribution_bound,
                              singleton_penalty, to_rgs)

K5 = ShapeRecord.from_classes([{1, 8}, {2, 9}, {3}, {4, 7}, {5, 6, 10}],
                              (1, -1, 1, -1, 1, -1, 1, 1, 1, -1))


def _edges(g):
    return {tuple(sorted(e)) for e in g.edges}


@pytest.mark.parametrize("n", range(9))
def test_rgs_counts_are_bell(n):
    parts = list(rgs_partitions(n))
    assert len(parts) == len(set(parts)) == bell(n)
    assert all(to_rgs(p) == p for p in parts)


def test_enumerate_shapes_counts():
    assert sum(1 for _ in enumerate_shapes(1)) == 8
    assert sum(1 for _ in enumerate_shapes(1, min_class_size=2)) == 4
    assert sum(1 for _ in enumerate_shapes(2)) == bell(4) * 16 == 240
    with pytest.raises(ValueError, match="budget"):
        next(enumerate_shapes(6))


def test_record_validation_and_json():
    s = ShapeRecord.from_classes([{1, 3}, {2, 4}], (1, 1, -1, -1), lit=[2])
    assert s.labels == (0, 1, 0, 1) and s.lit == {1} and s.singletons() == set()
    assert ShapeRecord.from_json(s.to_json()) == s
    assert json.loads(s.to_json())["partition"] == "0101"
    with pytest.raises(ValueError):
        ShapeRecord((0, 1, 2), (1, 1, 1))
    with pytest.raises(ValueError):
        ShapeRecord.from_classes([{1, 2}, {2}], (1, 1))


def test_reduction_worked_example():
    r = reduce_shape(K5)
    A, B, C, Y, E = 0, 1, 2, 3, 4
    assert r.reduced_word == ((A, 1), (B, -1), (C, 1), (A, 1), (B, 1), (E, -1))
    assert r.yellow == {Y}
    g = build_shape_graph(r)
    assert _edges(g) == {(0, 1), (0, 2), (0, 4), (1, 2), (1, 4), (2, 4)}
    assert {(A, B), (B, C), (C, A), (B, E), (E, A)} <= g.arrows


def test_graph_first_example():
    s = ShapeRecord.from_classes([{1, 4}, {2, 5}, {3}, {6}], (1,) * 6)
    g = build_shape_graph(reduce_shape(s))
    assert _edges(g) == {(0, 1), (1, 2), (0, 2), (1, 3)}


def test_trivial_and_reduced_words():
    s = ShapeRecord((0, 1, 1, 0), (1, 1, -1, -1))
    r = reduce_shape(s)
    assert r.reduced_word == () and r.yellow == {0, 1} and r.pairs == ((0, 3), (1, 2))
    s2 = ShapeRecord((0, 1, 0, 1), (1, 1, 1, 1))
    assert reduce_shape(s2).surviving == (0, 1, 2, 3) and not reduce_shape(s2).yellow


@given(st.lists(st.tuples(st.integers(0, 3), st.sampled_from((1, -1))), max_size=14))
def test_reduce_word_matches_naive(word):
    surv, pairs = reduce_word(word)
    assert [word[i] for i in surv] == reduce_bruteforce(word)
    assert reduce_word([word[i] for i in surv])[1] == []
    assert sorted(surv + [i for p in pairs for i in p]) == list(range(len(word)))


def test_revenant_examples():
    x, z, y, w, v = range(5)
    assert max_disjoint_revenants([x, x, z, x, y, w, y, v, y]) == 3
    assert max_disjoint_revenants([0, 0, 1, 1]) == 0


@given(st.lists(st.integers(0, 3), max_size=12))
def test_revenants_greedy_is_optimal(word):
    assert max_disjoint_revenants(word) == revenants_bruteforce(word)


def _sweep(kmax=3):
    for k in range(1, kmax + 1):
        for s in enumerate_shapes(k):
            r = reduce_shape(s)
            if r.reduced_word:
                yield s, r


def test_graph_invariants_on_enumeration():
    n = 0
    for s, r in _sweep():
        g = build_shape_graph(r)  # asserts connectivity and in-degrees
        assert g.vertices == r.nonyellow
        assert reduced_graph(r).edges <= g.edges
        kap = max_disjoint_revenants(r)
        assert max(class_blocks(r).values()) <= kap + 1
        n += 1
    assert n > 10000


def test_revenants_can_exceed_repeated_classes():
    # x y x z x: two disjoint revenants from the single repeated class x
    word = [0, 1, 0, 2, 0]
    assert max_disjoint_revenants(word) == 2
    assert sum(1 for c in set(word) if word.count(c) >= 2) == 1


def _word_shape(word):
    lab = to_rgs([c for c, _ in word])
    return ReducedShape(lab, tuple(range(len(word))), frozenset(), tuple(zip(lab, [s for _, s in word])), ())


def test_gap_examples():
    R, x, z, y = 0, 1, 2, 3
    r = _word_shape([(c, 1) for c in (R, x, R, z, R, y, x, R, z, y)])
    assert count_gaps(r, Coloring({1, 2, 3}, {0})) == 4
    assert count_gaps(r, Coloring({0, 1, 2, 3}, set())) == 0
    alt = _word_shape([(i % 2 * 10 + i, 1) for i in range(8)])  # 8 distinct classes
    blue = {c for c in alt.nonyellow if alt.word_classes.index(c) % 2 == 0}
    assert count_gaps(alt, Coloring(blue, alt.nonyellow - blue)) == 4
    with pytest.raises(ValueError):
        count_gaps(r, Coloring({1}, {0}))


def test_linear_gaps_and_balance():
    r = _word_shape([(0, 1), (1, 1), (1, -1), (0, 1), (2, 1), (0, 1)])
    # reduced_word taken as given here
    gaps = linear_gaps(r, Coloring({0}, {1, 2}))
    assert gaps == [[1, 2], [4]]
    assert gap_is_balanced(r, gaps[0]) and not gap_is_balanced(r, gaps[1])


def test_contribution_bound_formula():
    s = ShapeRecord((0, 0, 1, 1), (1, -1, 1, -1))
    assert shape_contribution_bound(s, 0, 10, 100, 0.5, 2) == 0.5 ** 2
    import math
    val = shape_contribution_bound(ShapeRecord((0, 0), (1, -1)), 1, 10, 100, 1.0, 2)
    assert val == pytest.approx(8 * math.log(100) / math.log(2) / 10)
    assert singleton_penalty(ShapeRecord((0, 1), (1, -1)), 0.25) == pytest.approx(4.0)
    with pytest.raises(ValueError):
        shape_contribution_bound(s, -1, 10, 100, 1.0, 2)


def _circ_lhs(s, primes, lit):
    """Sum over distinct class primes with p | beta_j - beta_i for lit i ~ j, of the weights."""
    lit = set(lit)
    total = 0.0
    for ps in itertools.permutations(primes, s.n_classes):
        betas = [0]
        for cl, sg in zip(s.labels, s.sigma):
            betas.append(betas[-1] + sg * ps[cl])
        if any(s.labels[i] == s.labels[j] and (betas[j] - betas[i]) % ps[s.labels[i]]
               for i in lit for j in lit if i < j):
            continue
        w = 1.0
        for i, cl in enumerate(s.labels):
            if i not in lit:
                w /= ps[cl]
        for cl in {s.labels[i] for i in lit}:
            w /= ps[cl]
        total += w
    return total


def test_contribution_bound_dominates_brute_force():
    from divexpand.arith import build_prime_set
    from divexpand.coloring import pick_coloring, span_V_W

    P = build_prime_set(11, 31)
    k = 2
    n = 0
    for s0 in enumerate_shapes(k):
        r = reduce_shape(s0)
        rank = 0
        if r.reduced_word:
            rank = span_V_W(s0, pick_coloring(r, build_shape_graph(r)))[0]
        everything = range(s0.k2)
        full = shape_contribution_bound(s0, rank, P.H0, P.H, P.scriptL, k)
        assert _circ_lhs(s0, P.primes, everything) <= full * (1 + 1e-12)
        none = shape_contribution_bound(s0, 0, P.H0, P.H, P.scriptL, k)
        assert _circ_lhs(s0, P.primes, ()) <= none * (1 + 1e-12)
        n += 1
    assert n == 240

"""Invariant suites behind `divexpand verify`. Each check returns (name, ok, detail)."""

from __future__ import annotations

import itertools
import random
from typing import Callable

import numpy as np

Check = tuple[str, bool, str]


def _run(name: str, fn: Callable[[], str]) -> Check:
    try:
        return name, True, fn() or ""
    except AssertionError as exc:
        return name, False, f"assertion failed: {exc}"
    except Exception as exc:  # a crash is a failed check, not a crashed suite
        return name, False, f"{type(exc).__name__}: {exc}"


def suite_arith() -> list[Check]:
    from .arith import (PrimeSet, build_window, liouville_range, liouville_trial, primes_between,
                        primes_upto)

    def liouville():
        lam = liouville_range(1, 3000)
        assert all(lam[n - 1] == liouville_trial(n) for n in range(1, 3001))
        return "n <= 3000"

    def segmented():
        ref = primes_upto(20000)
        for lo, hi in [(2, 100), (1000, 1100), (9973, 20000)]:
            assert list(primes_between(lo, hi)) == [p for p in ref if lo <= p <= hi]
        return "3 ranges"

    def window():
        P = PrimeSet.from_primes(primes_between(11, 60))
        win = build_window(5000, P)
        for n in range(win.lo, win.hi + 1, 7):
            assert win.pdivs(n) == [p for p in P.primes if n % p == 0]
            assert win.lam_at(n) == liouville_trial(n)
        return "N=5000"

    return [_run("liouville vs trial division", liouville),
            _run("segmented sieve", segmented),
            _run("window divisor table", window)]


def suite_trace() -> list[Check]:
    from .arith import PrimeSet, build_window
    from .divgraph import DivisibilityOperator, dense_matrix
    from .walks import trace_power_operator, trace_power_walksum, walksum_crt

    def cross():
        n = 0
        for N, ps in [(64, (11, 13)), (200, (13, 31)), (256, (11, 29))]:
            win = build_window(N, PrimeSet.from_primes(ps))
            op = DivisibilityOperator(win)
            M = dense_matrix(win)
            for k in (1, 2, 3):
                a = trace_power_operator(op, k)[0]
                b = trace_power_walksum(win, k)
                c = float(np.trace(np.linalg.matrix_power(M, 2 * k)))
                scale = max(1.0, abs(c))
                assert abs(a - c) <= 1e-8 * scale and abs(b - c) <= 1e-8 * scale, (N, ps, k, a, b, c)
                n += 1
        return f"{n} cases"

    def crt():
        single, _ = walksum_crt((11, 13, 17), 2)
        assert single == 0, single
        return "singleton part 0"

    return [_run("operator = walk sum = dense", cross), _run("exact singleton cancellation", crt)]


def _shape_sweep(kmax: int = 3):
    from .shapes import build_shape_graph, enumerate_shapes, reduce_shape

    for k in range(1, kmax + 1):
        for s in enumerate_shapes(k):
            r = reduce_shape(s)
            if r.reduced_word:
                yield s, r, build_shape_graph(r)


def suite_shapes() -> list[Check]:
    from collections import Counter

    from .shapes import class_blocks, max_disjoint_revenants, reduce_word

    def sweep():
        n = 0
        for s, r, g in _shape_sweep():
            kap = max_disjoint_revenants(r)
            assert max(class_blocks(r).values()) <= kap + 1
            reps = Counter(r.word_classes)
            assert kap <= sum(v - 1 for v in reps.values())
            assert reduce_word(r.reduced_word)[1] == []
            n += 1
        return f"{n} shapes with k <= 3"

    return [_run("graph, revenant and block invariants", sweep)]


def suite_coloring() -> list[Check]:
    from .coloring import (dim_W_lower_bound, exact_rank_fractions, pick_coloring,
                           rank_lower_bound, select_independent_boundary, span_V_W)
    from .shapes import max_disjoint_revenants

    def pipeline():
        n = 0
        for s, r, g in _shape_sweep():
            c = pick_coloring(r, g)
            rv, rw, rvw = span_V_W(s, c)
            assert rv == rw == rvw, (s, c)
            dim_W_lower_bound(r, c, max_disjoint_revenants(r), s)
            n += 1
        return f"{n} colorings, V = W"

    def boundary():
        rnd = random.Random(0)
        for _ in range(300):
            n = rnd.randint(1, 10)
            arrows = {(rnd.randrange(n), v) for v in range(n)}
            arrows = {(u, v) for u, v in arrows if u != v} | {((v + 1) % n, v) for v in range(n)}
            arrows = {(u, v) for u, v in arrows if u != v}
            if n == 1:
                continue
            S = {v for v in range(n) if rnd.random() < 0.7}
            out = select_independent_boundary(range(n), arrows, S)
            assert out <= S and 3 * len(out) >= len(S)
            assert all(any(u not in out for u, w in arrows if w == v) for v in out)
        return "300 random digraphs"

    def rank():
        rnd = random.Random(1)
        done = 0
        while done < 200:
            rows, cols = rnd.randint(1, 8), rnd.randint(1, 8)
            A = [[rnd.choice((-1, 0, 0, 1)) for _ in range(cols)] for _ in range(rows)]
            if any(not any(r) for r in A):
                continue
            kap = max(sum(1 for r in A if r[j]) for j in range(cols))
            rk, _ = rank_lower_bound(A, max(kap, 1))
            assert rk == exact_rank_fractions(A)
            done += 1
        return "200 random matrices"

    return [_run("coloring pipeline k <= 3", pipeline),
            _run("independent boundary selection", boundary),
            _run("rank lemma vs elimination", rank)]


def suite_geom(n: int = 200, seed: int = 0) -> list[Check]:
    from .geom import count_solutions_bruteforce, lemma_bound, random_instance

    def random_instances():
        rng = np.random.default_rng(seed)
        worst = 0.0
        for _ in range(n):
            inst = random_instance(rng)
            b, B = count_solutions_bruteforce(inst), lemma_bound(inst)
            assert b <= B, (inst, b, B)
            worst = max(worst, b / B)
        return f"{n} instances, worst ratio {worst:.3f}"

    return [_run("counting lemma", random_instances)]


def suite_codec() -> list[Check]:
    from .codec import (EncodedPartition, decode_partition, dot_count_check, encode_partition,
                        partition_shape)
    from .shapes import rgs_partitions

    def example():
        r = partition_shape([{1, 7, 15}, {2, 16}, {3, 4, 5, 11}, {6, 10, 12, 14}, {8}, {9, 13}])
        e = encode_partition(r)
        assert e.symbols == "***00*·**··2·2··", e.symbols
        assert e.to_line().split(" ")[1] == "7:1,10:6,11:3,13:9,15:1,16:2"
        return e.to_line()

    def sweep():
        n = 0
        for lab in rgs_partitions(8):
            cls = [[i for i, x in enumerate(lab) if x == c] for c in range(max(lab) + 1)]
            r = partition_shape(cls, one_based=False)
            e = encode_partition(r)
            assert decode_partition(EncodedPartition.from_line(e.to_line())) == sorted(cls)
            assert e.symbols.count("*") == len(cls)
            d, b = dot_count_check(r)
            assert d <= b, (lab, d, b)
            n += 1
        return f"{n} partitions"

    return [_run("worked example", example), _run("exhaustive round trip 2k = 8", sweep)]


def suite_sieve() -> list[Check]:
    from .arith import PrimeSet, primes_between
    from .sieve import (Progression, build_FD, build_Yell_conditions, coverage_mask, is_in_Yell,
                        sieve_error_bound)

    def fd():
        fam = [Progression(0, 2), Progression(0, 3), Progression(0, 5), Progression(1, 7)]
        for m in (1, 2, 3, 4):
            ap = build_FD(fam, m)
            for n in range(2 * 3 * 5 * 7):
                sieve_error_bound(ap, n)
        return "moduli {2,3,5,7}, m = 1..4"

    def yell():
        P = PrimeSet.from_primes(primes_between(11, 40))
        fam = build_Yell_conditions(P, 3)
        cov = coverage_mask(fam, 1, 20000)
        assert all(is_in_Yell(n, P, 3) == (not cov[n - 1]) for n in range(1, 20001))
        assert not is_in_Yell(2002, P, 3)
        return f"{len(fam)} progressions, n <= 20000"

    return [_run("composite-moduli inequality", fd), _run("Y_ell cross-oracle", yell)]


SUITES: dict[str, Callable[[], list[Check]]] = {
    "arith": suite_arith,
    "trace": suite_trace,
    "shapes": suite_shapes,
    "coloring": suite_coloring,
    "geom": suite_geom,
    "codec": suite_codec,
    "sieve": suite_sieve,
}


def run_suite(name: str) -> list[Check]:
    if name not in SUITES:
        raise KeyError(name)
    return SUITES[name]()

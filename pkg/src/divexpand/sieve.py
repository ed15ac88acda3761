"""Sieving with composite moduli, the premature-revenant family Y_ell, and sieve graphs."""

from __future__ import annotations

import itertools
import json
import math
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from .arith import PrimeSet


class BudgetExceeded(RuntimeError):
    pass


@lru_cache(maxsize=None)
def prime_factors(q: int) -> tuple[int, ...]:
    """Prime factors of q with multiplicity, by trial division."""
    out = []
    d = 2
    while d * d <= q:
        while q % d == 0:
            out.append(d)
            q //= d
        d += 1 if d == 2 else 2
    if q > 1:
        out.append(q)
    return tuple(out)


def omega(q: int) -> int:
    return len(set(prime_factors(q)))


def is_squarefree(q: int) -> bool:
    f = prime_factors(q)
    return len(f) == len(set(f))


@dataclass(frozen=True, order=True)
class Progression:
    """The residue class a mod q, q square-free, stored with 0 <= a < q."""

    q: int
    a: int

    def __init__(self, a: int, q: int, _trusted: bool = False):
        if q < 1:
            raise ValueError("modulus must be positive")
        if not _trusted and not is_squarefree(q):
            raise ValueError(f"modulus {q} is not square-free")
        object.__setattr__(self, "q", int(q))
        object.__setattr__(self, "a", int(a) % int(q))

    def __repr__(self):
        return f"{self.a} mod {self.q}"

    def __contains__(self, n: int) -> bool:
        return (n - self.a) % self.q == 0

    def intersect(self, other: "Progression") -> "Progression | None":
        """CRT intersection; None when empty."""
        g = math.gcd(self.q, other.q)
        if (other.a - self.a) % g:
            return None
        qg, rg = self.q // g, other.q // g
        t = ((other.a - self.a) // g) * pow(qg, -1, rg) % rg if rg > 1 else 0
        return Progression(self.a + self.q * t, self.q * rg, _trusted=True)

    def shift(self, beta: int) -> "Progression":
        """{n : n + beta in self}."""
        return Progression(self.a - beta, self.q, _trusted=True)

    def contains(self, other: "Progression") -> bool:
        return other.q % self.q == 0 and other.a % self.q == self.a

    def members(self, lo: int, hi: int) -> np.ndarray:
        start = lo + (self.a - lo) % self.q
        return np.arange(start, hi + 1, self.q, dtype=np.int64)

    @classmethod
    def parse(cls, s: str) -> "Progression":
        a, _, q = s.partition("mod")
        return cls(int(a), int(q))


ZZ = Progression(0, 1)


def coverage_mask(family: Iterable[Progression], lo: int, hi: int) -> np.ndarray:
    """Boolean mask over [lo, hi] of integers lying in some progression."""
    hit = np.zeros(hi - lo + 1, dtype=bool)
    for P in family:
        start = (P.a - lo) % P.q
        hit[start :: P.q] = True
    return hit


def dump_family(family: Iterable[Progression]) -> str:
    return "".join(f"{P.a} mod {P.q}\n" for P in family)


def load_family(text: str) -> list[Progression]:
    return [Progression.parse(line) for line in text.splitlines() if line.strip()]


# ---------------------------------------------------------------------------
# abstract sieve and cross-cuts


def abstract_sieve_identity(Qx: Sequence, g: Callable[[frozenset], int]) -> tuple[int, int]:
    """Split 1_{Q(x) empty} into a main term and a remainder.

    Qx is listed in the chosen linear order. main = sum_{T <= Q(x)} g(T) (-1)^|T|;
    remainder = sum over S containing min Q(x) of (-1)^|S| (g(S - min) - g(S)).
    """
    if g(frozenset()) != 1:
        raise ValueError("g(empty) must be 1")
    items = list(Qx)
    if len(items) > 24:
        raise BudgetExceeded("condition set too large")
    main = 0
    for r in range(len(items) + 1):
        for T in itertools.combinations(items, r):
            main += (-1) ** r * g(frozenset(T))
    rem = 0
    if items:
        first, rest = items[0], items[1:]
        for r in range(len(rest) + 1):
            for T in itertools.combinations(rest, r):
                S = frozenset(T) | {first}
                rem += (-1) ** len(S) * (g(frozenset(T)) - g(S))
    assert main + rem == (0 if items else 1)
    return main, rem


def cross_cut_sum(C: Sequence[frozenset], X: frozenset | None = None) -> int:
    """sum over subcollections S of C with union(S) = X of (-1)^|S|."""
    C = [frozenset(c) for c in C]
    if len(C) > 20:
        raise BudgetExceeded("at most 20 sets")
    if X is None:
        X = frozenset().union(*C)
    X = frozenset(X)
    total = 0
    for r in range(len(C) + 1):
        for S in itertools.combinations(C, r):
            if frozenset().union(*S) == X:
                total += (-1) ** r
    assert abs(total) <= 2 ** len(X)
    return total


# ---------------------------------------------------------------------------
# composite-moduli sieve


@dataclass
class SieveApprox:
    family: list[Progression]
    D: set[Progression]
    coeffs: dict[Progression, int]
    boundary: set[Progression] = field(default_factory=set)  # inner boundary
    out_boundary: set[Progression] = field(default_factory=set)

    def F(self, n: int) -> int:
        return sum(c for R, c in self.coeffs.items() if n in R)

    def to_json(self) -> str:
        rows = [{"R": repr(R), "c": c} for R, c in sorted(self.coeffs.items())]
        return json.dumps(rows)


def omega_ideal(m: int) -> Callable[[Progression], bool]:
    return lambda R: omega(R.q) <= m


def build_FD(family: Sequence[Progression], m: int | None = None,
             ideal: Callable[[Progression], bool] | None = None,
             max_nodes: int = 2_000_000) -> SieveApprox:
    """Coefficients c_R of F_D(n) = sum over S <= Q with cap(S) in D of (-1)^|S| 1_{n in cap(S)}.

    D is the ideal of non-empty intersections with omega(modulus) <= m, or any
    containment-closed predicate. The empty subfamily contributes the term 1_Z.
    """
    if (m is None) == (ideal is None):
        raise ValueError("give exactly one of m or ideal")
    in_D = omega_ideal(m) if ideal is None else ideal
    Q = list(dict.fromkeys(family))
    for P in Q:
        if not is_squarefree(P.q):
            raise ValueError(f"modulus {P.q} is not square-free")
    if not in_D(ZZ):
        raise ValueError("the ideal must contain Z")
    coeffs: Counter = Counter()
    D: set[Progression] = set()
    nodes = 0
    # DFS over subfamilies listed in increasing index order; since D is
    # containment closed, a subfamily whose intersection leaves D has no
    # extension back inside it
    stack = [(0, ZZ, 0)]
    while stack:
        start, R, size = stack.pop()
        nodes += 1
        if nodes > max_nodes:
            raise BudgetExceeded("too many intersections")
        coeffs[R] += (-1) ** size
        D.add(R)
        for j in range(start, len(Q)):
            S = R.intersect(Q[j])
            if S is not None and in_D(S):
                stack.append((j + 1, S, size + 1))
    coeffs = {R: c for R, c in coeffs.items() if c != 0}
    # an empty P & R lies outside D (the empty set is never a member), so it
    # puts R on the inner boundary; it adds nothing to the outer boundary
    boundary, out_boundary = set(), set()
    for R in D:
        for P in Q:
            S = R.intersect(P)
            if S is None:
                boundary.add(R)
            elif S not in D:
                boundary.add(R)
                out_boundary.add(S)
    if ideal is not None and len(D) + len(out_boundary) <= 4000:
        # containment closure among the intersections we have seen
        for R in D:
            for S in out_boundary:
                assert not S.contains(R), f"ideal not containment closed: {R} in D, {S} not"
    for R, c in coeffs.items():
        assert abs(c) <= 2 ** omega(R.q), (R, c)
    return SieveApprox(Q, D, coeffs, boundary, out_boundary)


def sieve_error_bound(approx: SieveApprox, n: int) -> tuple[int, int]:
    """(sum over inner boundary of 2^omega 1_{n in R}, same over outer boundary with 3^omega)."""
    inner = sum(2 ** omega(R.q) for R in approx.boundary if n in R)
    outer = sum(3 ** omega(R.q) for R in approx.out_boundary if n in R)
    truth = 0 if any(n in P for P in approx.family) else 1
    assert abs(truth - approx.F(n)) <= min(inner, outer), (n, truth, approx.F(n), inner, outer)
    return inner, outer


# ---------------------------------------------------------------------------
# premature revenants


def _chains(primes: Sequence[int], ell: int) -> Iterator[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Prime chains (p_1..p_l) with signs, 1 <= l < ell, repeats only as same-sign runs."""

    def rec(ps, ss):
        if ps:
            yield tuple(ps), tuple(ss)
        if len(ps) == ell - 1:
            return
        for p in primes:
            if p in ps and ps[-1] != p:
                continue
            for s in (1, -1):
                if ps and ps[-1] == p and ss[-1] != s:
                    continue
                ps.append(p)
                ss.append(s)
                yield from rec(ps, ss)
                ps.pop()
                ss.pop()

    yield from rec([], [])


def _crt_chain(ps: Sequence[int], ss: Sequence[int]) -> Progression | None:
    """n with p_1 | n, p_2 | n + s_1 p_1, ..., p_l | n + beta_{l-1}."""
    R = ZZ
    beta = 0
    for p, s in zip(ps, ss):
        R = R.intersect(Progression(-beta, p, _trusted=True))
        if R is None:
            return None
        beta += s * p
    return R


def build_Yell_conditions(P: PrimeSet | Sequence[int], ell: int, shifts: Sequence[int] = (0,),
                          budget: int = 5_000_000) -> list[Progression]:
    """The progressions whose union is the complement of Y_ell, shifted by -beta for each beta."""
    primes = list(P.primes if isinstance(P, PrimeSet) else P)
    if len(primes) ** max(ell - 1, 0) * 2 ** max(ell - 1, 0) > budget:
        raise BudgetExceeded("chain enumeration too large")
    pset = set(primes)
    base: set[Progression] = set()
    for ps, ss in _chains(primes, ell):
        R = _crt_chain(ps, ss)
        if R is None:
            continue
        beta = sum(p * s for p, s in zip(ps, ss))
        if beta == 0:
            base.add(R)
            continue
        for p0 in set(prime_factors(abs(beta))):
            if p0 in pset and p0 not in ps:
                S = R.intersect(Progression(0, p0, _trusted=True))
                if S is not None:
                    base.add(S)
    out = {R.shift(b) for R in base for b in shifts}
    return sorted(out)


def is_in_Yell(n: int, P: PrimeSet | Sequence[int], ell: int) -> bool:
    """Direct search for a chain from n closing up as a premature revenant."""
    primes = list(P.primes if isinstance(P, PrimeSet) else P)

    def divs(x):
        return [p for p in primes if x % p == 0]

    at_n = divs(n)
    if not at_n:
        return True

    def rec(ps, ss, beta):
        if ps:
            if beta == 0:
                return True
            if any(p0 not in ps and (n + beta) % p0 == 0 for p0 in at_n):
                return True
        if len(ps) == ell - 1:
            return False
        for p in divs(n + beta):
            if p in ps and ps[-1] != p:
                continue
            for s in (1, -1):
                if ps and ps[-1] == p and ss[-1] != s:
                    continue
                if rec(ps + [p], ss + [s], beta + s * p):
                    return True
        return False

    return not rec([], [], 0)


def yell_mask(P: PrimeSet | Sequence[int], ell: int, lo: int, hi: int) -> np.ndarray:
    """Boolean mask over [lo, hi] of members of Y_ell."""
    return ~coverage_mask(build_Yell_conditions(P, ell), lo, hi)


# ---------------------------------------------------------------------------
# sieve graphs


@dataclass(frozen=True, order=True)
class Thread:
    kind: str  # "open" or "closed"
    attach: int  # vertex 0..2k on the horizontal path
    length: int  # number of non-witness edges

    @property
    def n_edges(self) -> int:
        return self.length + (2 if self.kind == "open" else 0)


@dataclass(frozen=True)
class SieveGraph:
    """Horizontal path of k2 edges plus threads, with a class label on every edge.

    Edge order: horizontal edges 0..k2-1, then each thread's path edges in order
    from the attachment vertex, followed (open threads) by its two witnesses.
    """

    k2: int
    threads: tuple[Thread, ...]
    labels: tuple[int, ...]

    def thread_edges(self) -> list[tuple[list[int], tuple[int, int] | None]]:
        out, pos = [], self.k2
        for t in self.threads:
            path = list(range(pos, pos + t.length))
            wit = (pos + t.length, pos + t.length + 1) if t.kind == "open" else None
            out.append((path, wit))
            pos += t.n_edges
        return out

    def thread_classes(self, t: int) -> set[int]:
        path, wit = self.thread_edges()[t]
        idx = path + (list(wit) if wit else [])
        return {self.labels[i] for i in idx}

    @property
    def r(self) -> int:
        return len(self.threads)

    @property
    def s(self) -> int:
        return len(set(self.labels))

    @property
    def cost(self) -> int:
        return len(set().union(*(self.thread_classes(t) for t in range(self.r)))) if self.r else 0

    def private_classes(self, t: int) -> set[int]:
        others = set()
        for u in range(self.r):
            if u != t:
                others |= self.thread_classes(u)
        return self.thread_classes(t) - others

    def is_strongly_non_redundant(self, lit: Iterable[int]) -> bool:
        lit_classes = {self.labels[i] for i in lit}
        return all(self.private_classes(t) - lit_classes for t in range(self.r))


def _rgs(labels: Sequence[int]) -> tuple[int, ...]:
    seen: dict[int, int] = {}
    return tuple(seen.setdefault(x, len(seen)) for x in labels)


def _local_patterns(t: Thread) -> list[tuple[int, ...]]:
    """Class patterns inside one thread, as RGS over its edges."""
    out = []
    L = t.length
    # contiguous runs along the path, each run a fresh class
    for cuts in itertools.product((0, 1), repeat=L - 1):
        lab, cur = [0], 0
        for c in cuts:
            cur += c
            lab.append(cur)
        if t.kind == "open":
            w = cur + 1
            lab += [w, w]
        out.append(tuple(lab))
    return out


def _canonical(k2: int, threads: Sequence[Thread], labels: Sequence[int]) -> SieveGraph:
    """Sort threads and relabel; among equal threads pick the least labelling."""
    offsets, pos = [], k2
    for t in threads:
        offsets.append(pos)
        pos += t.n_edges
    order = sorted(range(len(threads)), key=lambda i: threads[i])
    groups = [list(g) for _, g in itertools.groupby(order, key=lambda i: threads[i])]
    best = None
    for perms in itertools.product(*(itertools.permutations(g) for g in groups)):
        seq = [i for g in perms for i in g]
        lab = list(labels[:k2])
        for i in seq:
            lab += labels[offsets[i] : offsets[i] + threads[i].n_edges]
        key = _rgs(lab)
        if best is None or key < best:
            best = key
    return SieveGraph(k2, tuple(threads[i] for i in order), best)


def thread_types(k: int, ell: int) -> list[Thread]:
    return [Thread(kind, a, L) for kind in ("closed", "open") for a in range(2 * k + 1)
            for L in range(1, ell)]


def enumerate_sieve_graphs(k: int, ell: int, m: int, budget: int = 2_000_000) -> list[SieveGraph]:
    """All non-redundant (G, ~) with cost <= m, up to thread order and relabelling."""
    if k > 3 or ell > 4 or m > 4:
        raise BudgetExceeded("parameters too large for exhaustive enumeration")
    k2 = 2 * k
    types = thread_types(k, ell)
    found: set[SieveGraph] = set()
    work = 0
    for r in range(m + 1):
        for combo in itertools.combinations_with_replacement(types, r):
            pats = [_local_patterns(t) for t in combo]
            for choice in itertools.product(*pats):
                # map each thread's local classes injectively to global thread classes
                for glob in _merge_threads(choice, m):
                    classes = [set(g) for g in glob]
                    if any(not (classes[i] - set().union(*(classes[j] for j in range(r) if j != i)))
                           for i in range(r)):
                        continue
                    nt = len(set().union(*classes)) if r else 0
                    flat = [x for g in glob for x in g]
                    for hor in _horizontal_labellings(k2, nt):
                        work += 1
                        if work > budget:
                            raise BudgetExceeded("sieve-graph enumeration budget")
                        # horizontal-only classes get labels >= nt
                        found.add(_canonical(k2, combo, list(hor) + flat))
    return sorted(found, key=lambda g: (g.r, g.threads, g.labels))


def _merge_threads(choice: Sequence[tuple[int, ...]], m: int) -> Iterator[list[tuple[int, ...]]]:
    def rec(i, used, acc):
        if i == len(choice):
            yield list(acc)
            return
        pat = choice[i]
        nloc = max(pat) + 1
        for targets in _injections(nloc, used, m):
            acc.append(tuple(targets[x] for x in pat))
            yield from rec(i + 1, max(used, max(targets) + 1), acc)
            acc.pop()

    yield from rec(0, 0, [])


def _injections(nloc: int, used: int, m: int) -> Iterator[tuple[int, ...]]:
    """Injective maps from nloc local classes into {0..used-1} plus fresh labels, <= m total."""
    def rec(j, acc, fresh):
        if j == nloc:
            yield tuple(acc)
            return
        for g in range(used):
            if g not in acc:
                acc.append(g)
                yield from rec(j + 1, acc, fresh)
                acc.pop()
        if used + fresh < m:
            acc.append(used + fresh)
            yield from rec(j + 1, acc, fresh + 1)
            acc.pop()

    yield from rec(0, [], 0)


def _horizontal_labellings(k2: int, nt: int) -> Iterator[tuple[int, ...]]:
    """Each horizontal edge takes a thread class 0..nt-1 or a horizontal-only class (RGS from nt)."""
    def rec(acc, nxt):
        if len(acc) == k2:
            yield tuple(acc)
            return
        for c in range(nxt):
            acc.append(c)
            yield from rec(acc, nxt)
            acc.pop()
        acc.append(nxt)
        yield from rec(acc, nxt + 1)
        acc.pop()

    yield from rec([], nt)


def count_by_threads(graphs: Iterable[SieveGraph]) -> dict[int, int]:
    return dict(sorted(Counter(g.r for g in graphs).items()))


def _set_partitions(items: Sequence) -> Iterator[list[list]]:
    if not items:
        yield []
        return
    head, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        yield [[head]] + part
        for i in range(len(part)):
            yield part[:i] + [[head] + part[i]] + part[i + 1 :]


def injective_power_sum(exps: Sequence[int], primes: Sequence[int],
                        excluded: Iterable[int] = ()) -> float:
    """sum over injective f: classes -> primes \\ excluded of prod p_f(c)^(-e_c).

    Moebius inversion over set partitions: each block B contributes
    (-1)^(|B|-1) (|B|-1)! times the power sum with the block's summed exponent.
    """
    excl = set(excluded)
    pool = [p for p in primes if p not in excl]
    total = 0.0
    cache: dict[int, float] = {}
    for part in _set_partitions(list(range(len(exps)))):
        term = 1.0
        for B in part:
            e = sum(exps[i] for i in B)
            if e not in cache:
                cache[e] = math.fsum(p ** -e for p in pool)
            term *= (-1) ** (len(B) - 1) * math.factorial(len(B) - 1) * cache[e]
        total += term
    return total


def valid_thread_signs(G: SieveGraph) -> Iterator[dict[int, int]]:
    """Sign patterns on thread path edges with same-class neighbours sharing a sign."""
    path_edges = [e for path, _ in G.thread_edges() for e in path]
    for signs in itertools.product((1, -1), repeat=len(path_edges)):
        sg = dict(zip(path_edges, signs))
        ok = all(sg[a] == sg[b] for path, _ in G.thread_edges() for a, b in zip(path, path[1:])
                 if G.labels[a] == G.labels[b])
        if ok:
            yield sg


def thread_sum_bound(G: SieveGraph, lit: Iterable[int], P: PrimeSet,
                     signs: dict[int, int] | None = None, C: float = 4.0,
                     check: bool = False, budget: int = 2_000_000) -> tuple[float, float]:
    """(L^(s-r) (log H / H0)^r, exact weighted count of admissible prime assignments).

    An assignment gives distinct primes to classes. Closed threads need
    sum sigma p = 0 along the cycle; open threads need the witness prime to divide
    sum sigma p along the path. Weight: 1/p per unlit horizontal edge, and 1/p once
    for every class that has a lit or thread edge.
    """
    lit = set(lit)
    if any(not 0 <= i < G.k2 for i in lit):
        raise ValueError("lit indices must be horizontal edges")
    tedges = G.thread_edges()
    if signs is None:
        signs = {e: 1 for path, _ in tedges for e in path}
    for path, _ in tedges:
        for a, b in zip(path, path[1:]):
            if G.labels[a] == G.labels[b] and signs[a] != signs[b]:
                raise ValueError("consecutive same-class thread edges need equal signs")
    labels = G.labels
    classes = sorted(set(labels))
    exps = {c: 0 for c in classes}
    touched = set()
    for i in range(G.k2):
        if i in lit:
            touched.add(labels[i])
        else:
            exps[labels[i]] += 1
    for i in range(G.k2, len(labels)):
        touched.add(labels[i])
    for c in touched:
        exps[c] += 1
    T = sorted({labels[i] for i in range(G.k2, len(labels))})
    R = [c for c in classes if c not in T]
    primes = list(P.primes)
    if len(primes) ** len(T) > budget:
        raise BudgetExceeded("thread-class assignment enumeration too large")
    cons = []
    for path, wit in tedges:
        terms = [(labels[e], signs[e]) for e in path]
        cons.append((terms, labels[wit[0]] if wit else None))
    tpos = {c: j for j, c in enumerate(T)}
    brute_terms = []
    for assign in itertools.permutations(primes, len(T)):
        ok = True
        for terms, w in cons:
            tot = sum(s * assign[tpos[c]] for c, s in terms)
            if (w is None and tot != 0) or (w is not None and tot % assign[tpos[w]]):
                ok = False
                break
        if not ok:
            continue
        wt = math.prod(assign[tpos[c]] ** -exps[c] for c in T)
        brute_terms.append(wt * injective_power_sum([exps[c] for c in R], primes, assign))
    brute = math.fsum(brute_terms)
    bound = P.scriptL ** (G.s - G.r) * (math.log(P.H) / P.H0) ** G.r
    if check:
        assert brute <= C * bound, (G, brute, bound)
    return bound, brute

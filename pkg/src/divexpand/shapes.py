"""Walk shapes: word reduction, yellow classes, the shape graph, revenants and gaps.

Positions are 0-based throughout (position i is the i + 1-th letter of the walk).
A partition is stored as a restricted growth string: labels[i] is the class of
position i and classes are numbered in order of first appearance.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence


def rgs_partitions(n: int) -> Iterator[tuple[int, ...]]:
    """All set partitions of n points as restricted growth strings."""
    if n == 0:
        yield ()
        return
    lab = [0] * n

    def rec(i, mx):
        if i == n:
            yield tuple(lab)
            return
        for c in range(mx + 2):
            lab[i] = c
            yield from rec(i + 1, max(mx, c))

    yield from rec(1, 0)


def to_rgs(labels: Sequence) -> tuple[int, ...]:
    seen: dict = {}
    return tuple(seen.setdefault(x, len(seen)) for x in labels)


def bell(n: int) -> int:
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
    return row[0]


@dataclass(frozen=True)
class ShapeRecord:
    labels: tuple[int, ...]
    sigma: tuple[int, ...]
    lit: frozenset[int] = frozenset()

    def __post_init__(self):
        if len(self.labels) != len(self.sigma):
            raise ValueError("labels and sigma differ in length")
        if len(self.labels) % 2:
            raise ValueError("shapes have even length 2k")
        if tuple(self.labels) != to_rgs(self.labels):
            object.__setattr__(self, "labels", to_rgs(self.labels))
        if any(s not in (1, -1) for s in self.sigma):
            raise ValueError("signs must be +-1")
        if any(not 0 <= i < len(self.labels) for i in self.lit):
            raise ValueError("lit index out of range")
        object.__setattr__(self, "lit", frozenset(self.lit))

    @classmethod
    def from_classes(cls, classes: Iterable[Iterable[int]], sigma: Sequence[int],
                     lit: Iterable[int] = (), one_based: bool = True) -> "ShapeRecord":
        off = 1 if one_based else 0
        n = len(sigma)
        lab = [-1] * n
        for c, members in enumerate(classes):
            for i in members:
                if lab[i - off] != -1:
                    raise ValueError(f"index {i} in two classes")
                lab[i - off] = c
        if -1 in lab:
            raise ValueError("classes do not cover every index")
        return cls(to_rgs(lab), tuple(sigma), frozenset(i - off for i in lit))

    @property
    def k2(self) -> int:
        return len(self.labels)

    @property
    def n_classes(self) -> int:
        return max(self.labels) + 1 if self.labels else 0

    def classes(self) -> list[list[int]]:
        out = [[] for _ in range(self.n_classes)]
        for i, c in enumerate(self.labels):
            out[c].append(i)
        return out

    def singletons(self) -> set[int]:
        return {c for c, m in enumerate(self.classes()) if len(m) == 1}

    def to_json(self) -> str:
        """1-based indices, matching the usual {1..2k} numbering."""
        return json.dumps({"k": self.k2 // 2,
                           "partition": "".join(_RGS_DIGITS[c] for c in self.labels),
                           "sigma": list(self.sigma), "lit": sorted(i + 1 for i in self.lit)})

    @classmethod
    def from_json(cls, text: str) -> "ShapeRecord":
        d = json.loads(text)
        labels = tuple(_RGS_DIGITS.index(ch) for ch in d["partition"])
        if len(labels) != 2 * d["k"]:
            raise ValueError("partition length does not match k")
        return cls(labels, tuple(d["sigma"]), frozenset(i - 1 for i in d["lit"]))


_RGS_DIGITS = "0123456789abcdefghijklmnopqrstuvwxyz"


@dataclass(frozen=True)
class ReducedShape:
    labels: tuple[int, ...]  # of the full shape
    surviving: tuple[int, ...]
    yellow: frozenset[int]
    reduced_word: tuple[tuple[int, int], ...]
    pairs: tuple[tuple[int, int], ...]  # (opening, closing) positions cancelled in reduction

    @property
    def nonyellow(self) -> frozenset[int]:
        return frozenset(c for c, _ in self.reduced_word)

    @property
    def word_classes(self) -> tuple[int, ...]:
        return tuple(c for c, _ in self.reduced_word)


def reduce_word(word: Sequence[tuple[int, int]]):
    """Free reduction with a stack; returns (surviving positions, cancelled pairs)."""
    stack: list[int] = []
    pairs = []
    for i, (c, s) in enumerate(word):
        if stack and word[stack[-1]][0] == c and word[stack[-1]][1] == -s:
            pairs.append((stack.pop(), i))
        else:
            stack.append(i)
    return stack, pairs


def reduce_shape(s: ShapeRecord) -> ReducedShape:
    word = list(zip(s.labels, s.sigma))
    surv, pairs = reduce_word(word)
    alive = {s.labels[i] for i in surv}
    yellow = frozenset(range(s.n_classes)) - alive
    return ReducedShape(s.labels, tuple(surv), yellow, tuple(word[i] for i in surv),
                        tuple(sorted(pairs)))


@dataclass(frozen=True)
class ShapeGraph:
    vertices: frozenset[int]
    edges: frozenset[frozenset[int]]
    arrows: frozenset[tuple[int, int]]

    def neighbors(self, v: int) -> set[int]:
        return {u for e in self.edges if v in e for u in e if u != v}

    def degree(self, v: int) -> int:
        return len(self.neighbors(v))

    def adjacency(self) -> dict[int, set[int]]:
        adj = {v: set() for v in self.vertices}
        for e in self.edges:
            a, b = tuple(e)
            adj[a].add(b)
            adj[b].add(a)
        return adj

    def n_high_degree(self) -> int:
        adj = self.adjacency()
        return sum(1 for v in self.vertices if len(adj[v]) >= 3)

    def in_arrows(self) -> dict[int, set[int]]:
        inn = {v: set() for v in self.vertices}
        for u, v in self.arrows:
            inn[v].add(u)
        return inn


def is_connected(vertices: Iterable, adj: dict) -> bool:
    vs = set(vertices)
    if not vs:
        return True
    start = next(iter(vs))
    seen, todo = {start}, [start]
    while todo:
        v = todo.pop()
        for u in adj.get(v, ()):
            if u in vs and u not in seen:
                seen.add(u)
                todo.append(u)
    return seen == vs


def build_shape_graph(r: ReducedShape, s: ShapeRecord | None = None) -> ShapeGraph:
    """Vertices: non-yellow classes.

    Edges join [i1] != [i2] when every position strictly between i1 and i2 lies
    in a yellow class, and also join classes of consecutive letters of the
    reduced word (letters erased between them cancel in pairs). Arrows point from
    each reduced letter to the next one of a different class, cyclically.
    """
    labels = r.labels
    V = r.nonyellow
    edges = set()
    n = len(labels)
    for i1 in range(n):
        if labels[i1] in r.yellow:
            continue
        for i2 in range(i1 + 1, n):
            c2 = labels[i2]
            if c2 not in r.yellow:
                if c2 != labels[i1]:
                    edges.add(frozenset((labels[i1], c2)))
                break
    wc = r.word_classes
    for a, b in zip(wc, wc[1:]):
        if a != b:
            edges.add(frozenset((a, b)))
    arrows = set()
    m = len(wc)
    for t in range(m):
        a, b = wc[t], wc[(t + 1) % m]
        if a != b:
            arrows.add((a, b))
    g = ShapeGraph(frozenset(V), frozenset(edges), frozenset(arrows))
    assert is_connected(V, g.adjacency()), "shape graph must be connected"
    if len(V) >= 2:
        assert all(g.in_arrows()[v] for v in V), "every vertex needs an incoming arrow"
    return g


def reduced_graph(r: ReducedShape) -> ShapeGraph:
    """The graph of the relation restricted to the surviving positions alone."""
    wc = r.word_classes
    edges = {frozenset((a, b)) for a, b in zip(wc, wc[1:]) if a != b}
    return ShapeGraph(frozenset(wc), frozenset(edges), frozenset())


def max_disjoint_revenants(r: ReducedShape | Sequence[int]) -> int:
    """Largest number of triples i < j < i' (i ~ i', j !~ i) with i'_t <= i_{t+1}.

    Earliest-end greedy: for each start, the earliest possible end is the next
    occurrence of its class after the first foreign letter.
    """
    w = r.word_classes if isinstance(r, ReducedShape) else tuple(r)
    n = len(w)
    ends = [None] * n
    for i in range(n):
        j = next((t for t in range(i + 1, n) if w[t] != w[i]), None)
        if j is None:
            continue
        ends[i] = next((t for t in range(j + 1, n) if w[t] == w[i]), None)
    count, last = 0, 0
    while True:
        cands = [ends[i] for i in range(last, n) if ends[i] is not None]
        if not cands:
            return count
        last = min(cands)
        count += 1


def class_blocks(r: ReducedShape) -> dict[int, int]:
    """Number of maximal runs of each class in the reduced word (linear)."""
    out: dict[int, int] = {}
    prev = None
    for c in r.word_classes:
        if c != prev:
            out[c] = out.get(c, 0) + 1
        prev = c
    return out


@dataclass(frozen=True)
class Coloring:
    blue: frozenset[int]
    red: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "blue", frozenset(self.blue))
        object.__setattr__(self, "red", frozenset(self.red))
        if self.blue & self.red:
            raise ValueError("a class cannot be both blue and red")


def _check_coloring(r: ReducedShape, c: Coloring):
    if c.blue | c.red != r.nonyellow:
        raise ValueError("coloring must cover exactly the non-yellow classes")


def red_runs(r: ReducedShape, c: Coloring) -> list[list[int]]:
    """Maximal runs of red letters (as reduced-word positions), cyclically merged."""
    _check_coloring(r, c)
    wc = r.word_classes
    n = len(wc)
    if not c.blue or not c.red:
        return []
    red = [x in c.red for x in wc]
    start = next(t for t in range(n) if not red[t])  # a blue letter
    runs, cur = [], []
    for d in range(1, n + 1):
        t = (start + d) % n
        if red[t]:
            cur.append(t)
        elif cur:
            runs.append(cur)
            cur = []
    return runs


def count_gaps(r: ReducedShape, c: Coloring) -> int:
    return len(red_runs(r, c))


def linear_gaps(r: ReducedShape, c: Coloring) -> list[list[int]]:
    """Red letters strictly between consecutive blue letters of the reduced word.

    The wrap-around gap is left out: its vector is minus the sum of the others.
    """
    _check_coloring(r, c)
    wc = r.word_classes
    blue_pos = [t for t, x in enumerate(wc) if x in c.blue]
    return [[t for t in range(a + 1, b) if wc[t] in c.red]
            for a, b in zip(blue_pos, blue_pos[1:]) if b > a + 1]


def gap_is_balanced(r: ReducedShape, gap: Sequence[int]) -> bool:
    tot: dict[int, int] = {}
    for t in gap:
        c, s = r.reduced_word[t]
        tot[c] = tot.get(c, 0) + s
    return all(v == 0 for v in tot.values())


def singleton_penalty(s: ShapeRecord, scriptL: float) -> float:
    return scriptL ** (-len(s.singletons()) / 2)


def shape_contribution_bound(s: ShapeRecord, r: int, H0: float, H: float, scriptL: float,
                             k: int) -> float:
    """(1/H0^r) (4 k r log H / (L log 2))^r L^{#classes}."""
    if r < 0:
        raise ValueError("rank must be >= 0")
    if r == 0:
        return scriptL ** s.n_classes
    return (4 * k * r * math.log(H) / (scriptL * math.log(2)) / H0) ** r * scriptL ** s.n_classes


def enumerate_shapes(k: int, min_class_size: int = 1, max_singletons: int | None = None,
                     max_k: int = 5) -> Iterator[ShapeRecord]:
    if k > max_k:
        raise ValueError(f"k={k} exceeds the enumeration budget k <= {max_k} "
                         f"(Bell(2k) * 4^k shapes)")
    for lab in rgs_partitions(2 * k):
        sizes = [lab.count(c) for c in range(max(lab) + 1)] if lab else []
        if min(sizes, default=2) < min_class_size:
            continue
        if max_singletons is not None and sizes.count(1) > max_singletons:
            continue
        for sig in itertools.product((1, -1), repeat=2 * k):
            yield ShapeRecord(lab, sig)

"""Blue/red colorings: leafy spanning trees, the in-degree selection, and rank bounds."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Sequence

from ._exact import bareiss_rank
from .shapes import (Coloring, ReducedShape, ShapeGraph, ShapeRecord, count_gaps,
                     gap_is_balanced, is_connected, linear_gaps, max_disjoint_revenants)

Graph = Mapping[Hashable, set]


@dataclass(frozen=True)
class Tree:
    vertices: frozenset
    edges: frozenset  # of frozenset pairs

    def degree(self, v) -> int:
        return sum(1 for e in self.edges if v in e)

    def leaves(self) -> set:
        return {v for v in self.vertices if self.degree(v) == 1}


def _check_graph(G: Graph):
    for v, nb in G.items():
        for u in nb:
            if v not in G.get(u, ()):
                raise ValueError("graph adjacency must be symmetric")
    if not is_connected(G.keys(), G):
        raise ValueError("graph is not connected")


def _greedy_leafy_tree(G: Graph) -> Tree:
    """Grow a tree by expanding the leaf that adds the most new vertices.

    A leaf with >= 2 outside neighbours is expanded first; failing that, a leaf
    whose single outside neighbour would itself bring in >= 2 new vertices;
    otherwise any expandable leaf.
    """
    V = set(G)
    root = max(sorted(V, key=repr), key=lambda v: len(G[v]))
    intree = {root} | set(G[root])
    edges = {frozenset((root, u)) for u in G[root]}
    while intree != V:
        leaves = sorted((v for v in intree if sum(1 for e in edges if v in e) <= 1), key=repr)
        best, best_score = None, None
        for v in leaves:
            out = [u for u in G[v] if u not in intree]
            if not out:
                continue
            if len(out) >= 2:
                score = (2, len(out))
            else:
                u = out[0]
                nxt = [w for w in G[u] if w not in intree and w != u]
                score = (1, len(nxt)) if len(nxt) >= 2 else (0, len(nxt))
            if best_score is None or score > best_score:
                best, best_score = v, score
        if best is None:
            # every tree vertex with outside neighbours is internal; expand any of them
            best = next(v for v in sorted(intree, key=repr) if any(u not in intree for u in G[v]))
        out = [u for u in G[best] if u not in intree]
        if best_score is not None and best_score[0] == 1:
            u = out[0]
            edges.add(frozenset((best, u)))
            intree.add(u)
            for w in G[u]:
                if w not in intree:
                    edges.add(frozenset((u, w)))
                    intree.add(w)
        else:
            for u in out:
                edges.add(frozenset((best, u)))
                intree.add(u)
    return Tree(frozenset(V), frozenset(edges))


def _tree_from_cds(G: Graph, D: set) -> Tree:
    """Spanning tree whose internal vertices lie in the connected dominating set D."""
    D = set(D)
    start = next(iter(sorted(D, key=repr)))
    edges, seen, todo = set(), {start}, [start]
    while todo:
        v = todo.pop()
        for u in sorted(G[v], key=repr):
            if u in D and u not in seen:
                seen.add(u)
                edges.add(frozenset((v, u)))
                todo.append(u)
    for v in sorted(set(G) - D, key=repr):
        u = next(w for w in sorted(G[v], key=repr) if w in D)
        edges.add(frozenset((v, u)))
    return Tree(frozenset(G), frozenset(edges))


def max_leaf_tree_exhaustive(G: Graph) -> Tree:
    """Max-leaf spanning tree via a minimum connected dominating set (|V| <= 12)."""
    V = sorted(G, key=repr)
    if len(V) > 12:
        raise ValueError("exhaustive search limited to 12 vertices")
    if len(V) <= 2:
        return _greedy_leafy_tree(G)
    for size in range(1, len(V) + 1):
        for D in itertools.combinations(V, size):
            Ds = set(D)
            if not is_connected(Ds, G):
                continue
            if all(v in Ds or G[v] & Ds for v in V):
                return _tree_from_cds(G, Ds)
    raise AssertionError("unreachable: V itself dominates")


def n_high_degree(G: Graph) -> int:
    return sum(1 for v in G if len(G[v]) >= 3)


def spanning_tree_many_leaves(G: Graph) -> Tree:
    """Spanning tree with >= n/4 + 2 leaves when n vertices have degree >= 3 (|V| >= 2)."""
    _check_graph(G)
    if len(G) == 1:
        return Tree(frozenset(G), frozenset())
    T = _greedy_leafy_tree(G)
    need = n_high_degree(G) / 4 + 2
    if len(T.leaves()) < need and len(G) <= 12:
        T = max_leaf_tree_exhaustive(G)
    assert len(T.edges) == len(G) - 1 and is_connected(T.vertices, _tree_adj(T))
    assert len(T.leaves()) >= need, (len(T.leaves()), need)
    return T


def _tree_adj(T: Tree) -> dict:
    adj = {v: set() for v in T.vertices}
    for e in T.edges:
        a, b = tuple(e)
        adj[a].add(b)
        adj[b].add(a)
    return adj


def select_independent_boundary(vertices: Iterable, arrows: Iterable[tuple], S: Iterable) -> set:
    """S' within S, |S'| >= |S|/3, each member having an arrow from outside S'.

    Keep one incoming arrow per vertex of S, which makes S a union of trees
    hanging from outside roots or from cycles. A proper 3-colouring along the
    kept arrows (cycles alternate, odd cycles get one third colour) has a colour
    class of size >= |S|/3, and its members' kept predecessors lie outside it.
    """
    S = sorted(set(S), key=repr)
    inn: dict = {v: [] for v in vertices}
    for u, v in arrows:
        if u != v:
            inn[v].append(u)
    for v in inn:
        if not inn[v]:
            raise ValueError(f"vertex {v!r} has in-degree 0")
    if not S:
        return set()
    Sset = set(S)
    pred = {}
    for v in S:
        outside = sorted((u for u in inn[v] if u not in Sset), key=repr)
        pred[v] = outside[0] if outside else sorted(inn[v], key=repr)[0]
    color: dict = {}
    for v in S:
        if v in color:
            continue
        # walk predecessors until leaving S, hitting a coloured vertex, or closing a cycle
        path, pos = [], {}
        x = v
        while x in Sset and x not in color and x not in pos:
            pos[x] = len(path)
            path.append(x)
            x = pred[x]
        if x in pos:
            cyc = path[pos[x]:]
            # cyc[t+1] is the predecessor of cyc[t]; colour along the cycle
            for t, y in enumerate(cyc):
                color[y] = 1 if t % 2 == 0 else 0
            if len(cyc) % 2:
                color[cyc[-1]] = 2
            tail = path[: pos[x]]
        else:
            tail = path
        for y in reversed(tail):
            p = pred[y]
            pc = color.get(p) if p in Sset else None
            color[y] = 0 if pc is None else min(c for c in (0, 1, 2) if c != pc)
    classes = {c: [v for v in S if color[v] == c] for c in (0, 1, 2)}
    best = max((0, 1, 2), key=lambda c: (len(classes[c]), -c))
    out = set(classes[best])
    assert 3 * len(out) >= len(S)
    for v in out:
        assert any(u not in out for u in inn[v])
    return out


def rank_lower_bound(A: Sequence[Sequence[int]], kappa: int) -> tuple[int, list[int]]:
    """Exact rank of A and the greedy certificate columns S with rank >= |S| >= rows/kappa."""
    rows = [list(map(int, r)) for r in A]
    n = len(rows)
    if n == 0:
        return 0, []
    ncols = len(rows[0])
    if any(not any(r) for r in rows):
        raise ValueError("every row needs a non-zero entry")
    for j in range(ncols):
        if sum(1 for r in rows if r[j]) > kappa:
            raise ValueError(f"column {j} has more than {kappa} non-zero entries")
    S: list[int] = []
    while True:
        i = next((i for i in range(n) if all(rows[i][j] == 0 for j in S)), None)
        if i is None:
            break
        S.append(next(j for j in range(ncols) if rows[i][j] != 0))
    rank = bareiss_rank(rows)
    sub = [[r[j] for j in S] for r in rows]
    assert bareiss_rank(sub) == len(S), "certificate columns must be independent"
    assert rank >= len(S) and kappa * len(S) >= n
    return rank, S


def graph_adjacency(g: ShapeGraph) -> dict:
    return g.adjacency()


def pick_coloring(r: ReducedShape, g: ShapeGraph) -> Coloring:
    adj = g.adjacency()
    V = set(g.vertices)
    if len(V) <= 1:
        return Coloring(frozenset(V), frozenset())
    T = spanning_tree_many_leaves(adj)
    leaves = T.leaves()
    red = select_independent_boundary(V, g.arrows, leaves)
    c = Coloring(frozenset(V - red), frozenset(red))
    assert c.blue and is_connected(c.blue, adj), "blue part must be connected"
    gaps = count_gaps(r, c)
    assert gaps >= len(red), (gaps, red)
    nu = g.n_high_degree()
    assert 3 * gaps >= nu / 4 + 2, (gaps, nu)
    return c


def v_vectors(s: ShapeRecord, c: Coloring) -> list[dict[int, int]]:
    """v(i) = sum over j < i with [j] red of sigma_j x_[j], as sparse dicts."""
    out, cur = [], {}
    for i, (cl, sg) in enumerate(zip(s.labels, s.sigma)):
        out.append(dict(cur))
        if cl in c.red:
            cur[cl] = cur.get(cl, 0) + sg
    return out


def _diff_rows(vs, pairs, cols) -> list[list[int]]:
    rows = []
    for a, b in pairs:
        rows.append([vs[b].get(x, 0) - vs[a].get(x, 0) for x in cols])
    return rows


def span_V_W(s: ShapeRecord, c: Coloring) -> tuple[int, int, int]:
    """(rank V, rank W, rank V+W) for the two difference systems over blue positions."""
    vs = v_vectors(s, c)
    cols = sorted(c.red)
    blue_pos = [i for i, cl in enumerate(s.labels) if cl in c.blue]
    same = [(a, b) for a, b in itertools.combinations(blue_pos, 2) if s.labels[a] == s.labels[b]]
    every = list(itertools.combinations(blue_pos, 2))
    if not cols:
        return 0, 0, 0
    V = _diff_rows(vs, same, cols)
    W = _diff_rows(vs, every, cols)
    return bareiss_rank(V) if V else 0, bareiss_rank(W) if W else 0, bareiss_rank(V + W) if V + W else 0


def gap_matrix(r: ReducedShape, c: Coloring) -> list[list[int]]:
    """Signed counts of each red class in each linear gap."""
    cols = sorted(c.red)
    rows = []
    for gap in linear_gaps(r, c):
        row = dict.fromkeys(cols, 0)
        for t in gap:
            cl, sg = r.reduced_word[t]
            row[cl] += sg
        rows.append([row[x] for x in cols])
    return rows


def dim_W_lower_bound(r: ReducedShape, c: Coloring, kappa: int,
                      s: ShapeRecord | None = None) -> int:
    """Certified lower bound for dim W from the gap matrix.

    Zero (balanced) rows are dropped; there are at most kappa of them. Each red
    class occupies at most kappa + 1 runs of the word, so columns have at most
    kappa + 1 non-zeros. With the shape given, the bound is checked against the
    exact rank of the full difference system.
    """
    if max_disjoint_revenants(r) > kappa:
        raise ValueError("kappa must bound the disjoint revenants")
    A = gap_matrix(r, c)
    nz = [row for row in A if any(row)]
    zero_rows = len(A) - len(nz)
    assert zero_rows <= kappa, (zero_rows, kappa)
    assert all(gap_is_balanced(r, gap) == (not any(row))
               for gap, row in zip(linear_gaps(r, c), A))
    if not nz:
        bound = 0
    else:
        col_max = max(sum(1 for row in nz if row[j]) for j in range(len(nz[0])))
        assert col_max <= kappa + 1
        _, S = rank_lower_bound(nz, max(col_max, 1))
        bound = len(S)
    if s is not None:
        rv, rw, _ = span_V_W(s, c)
        assert bound <= rw, (bound, rw)
    return bound


def exact_rank_fractions(rows: Sequence[Sequence[Fraction]]) -> int:
    """Rank over Q by plain Gaussian elimination on Fractions; an independent oracle."""
    M = [[Fraction(x) for x in r] for r in rows]
    rank, ncols = 0, len(M[0]) if M else 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(M)) if M[i][col] != 0), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        for i in range(len(M)):
            if i != rank and M[i][col] != 0:
                f = M[i][col] / M[rank][col]
                M[i] = [a - f * b for a, b in zip(M[i], M[rank])]
        rank += 1
    return rank

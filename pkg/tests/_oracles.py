"""Independent brute-force oracles shared by the tests."""

from __future__ import annotations

import itertools

from divexpand.shapes import rgs_partitions


def _rgs(seq):
    seen = {}
    return tuple(seen.setdefault(x, len(seen)) for x in seq)


def _thread_ok(lab, kind, length):
    path = lab[:length]
    if kind == "open":
        w1, w2 = lab[length], lab[length + 1]
        if w1 != w2 or w1 in path:
            return False
    for c in set(path):
        idx = [i for i, x in enumerate(path) if x == c]
        if idx[-1] - idx[0] + 1 != len(idx):
            return False
    return True


def sieve_graph_counts(k, ell, m):
    """Count non-redundant labelled sieve graphs of cost <= m by number of threads.

    Thread edges get every set partition, filtered by the rules; horizontal edges
    get every set partition whose blocks map injectively to thread classes or stay new.
    """
    k2 = 2 * k
    types = [(kind, a, L) for kind in ("closed", "open") for a in range(k2 + 1) for L in range(1, ell)]
    hor_parts = list(rgs_partitions(k2))
    seen = set()
    for r in range(m + 1):
        for combo in itertools.combinations_with_replacement(sorted(types), r):
            sizes = [L + (2 if kind == "open" else 0) for kind, _, L in combo]
            offs = [sum(sizes[:i]) for i in range(r)]
            total = sum(sizes)
            for tl in rgs_partitions(total) if total else [()]:
                parts = [tl[o:o + s] for o, s in zip(offs, sizes)]
                if not all(_thread_ok(p, t[0], t[2]) for p, t in zip(parts, combo)):
                    continue
                cls = [set(p) for p in parts]
                nt = len(set(tl))
                if nt > m:
                    continue
                if any(not cls[i] - set().union(*[cls[j] for j in range(r) if j != i]) for i in range(r)):
                    continue
                for hp in hor_parts:
                    nb = max(hp) + 1
                    # each horizontal block joins a distinct thread class or stays new (-1)
                    for tgt in itertools.product(range(-1, nt), repeat=nb):
                        used = [t for t in tgt if t >= 0]
                        if len(used) != len(set(used)):
                            continue
                        hl = [tgt[b] if tgt[b] >= 0 else nt + b for b in hp]
                        seen.add(_canon(combo, offs, sizes, k2, hl, tl))
    out = {}
    for combo, _ in seen:
        out[len(combo)] = out.get(len(combo), 0) + 1
    return dict(sorted(out.items()))


def _canon(combo, offs, sizes, k2, hl, tl):
    best = None
    for perm in itertools.permutations(range(len(combo))):
        if [combo[i] for i in perm] != list(combo):
            continue
        seq = list(hl) + [x for i in perm for x in tl[offs[i]:offs[i] + sizes[i]]]
        key = _rgs(seq)
        if best is None or key < best:
            best = key
    return combo, best


def revenants_bruteforce(word):
    """Longest chain of revenant triples (i, j, i') with i'_t <= i_{t+1}, by exhaustive search."""
    n = len(word)
    triples = [(i, ip) for i in range(n) for ip in range(i + 2, n)
               if word[i] == word[ip] and any(word[j] != word[i] for j in range(i + 1, ip))]
    best = {}

    def longest(start):
        if start not in best:
            best[start] = max((1 + longest(ip) for i, ip in triples if i >= start), default=0)
        return best[start]

    return longest(0)


def reduce_bruteforce(word):
    """Free reduction by repeated deletion of the leftmost cancelling pair."""
    w = list(word)
    changed = True
    while changed:
        changed = False
        for i in range(len(w) - 1):
            if w[i][0] == w[i + 1][0] and w[i][1] == -w[i + 1][1]:
                del w[i:i + 2]
                changed = True
                break
    return w


def yell3_complement_scan(primes, N):
    """Mask over 1..N of integers with a premature revenant at horizon 3, straight from the definition.

    Chains have length 1 or 2. Length 1 cannot close (p0 | p1 or p1 = 0 would be needed).
    Length 2: p1 | n, p2 | n + s1 p1 with p2 != p1 or (p2 = p1, s2 = s1); it closes if
    s1 p1 + s2 p2 = 0, or if some p0 in P outside the chain divides n and n + s1 p1 + s2 p2.
    """
    import numpy as np

    n = np.arange(1, N + 1, dtype=np.int64)
    hit = np.zeros(N, dtype=bool)
    pset = set(primes)
    for p1 in primes:
        m1 = n % p1 == 0
        for s1 in (1, -1):
            for p2 in primes:
                m2 = m1 & ((n + s1 * p1) % p2 == 0)
                if not m2.any():
                    continue
                for s2 in (1, -1):
                    if p2 == p1 and s2 != s1:
                        continue
                    beta = s1 * p1 + s2 * p2
                    if beta == 0:
                        hit |= m2
                        continue
                    for p0 in pset - {p1, p2}:
                        if beta % p0 == 0:
                            hit |= m2 & (n % p0 == 0)
    return hit

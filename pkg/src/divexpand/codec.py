"""Writer/reader encoding of an equivalence relation on the surviving indices.

Reading the surviving indices left to right, the writer emits one symbol each:

    '*'  first occurrence of a class
    '0'  same class as the immediate predecessor
    '1'  the first class seen so far next to the predecessor's class
    '2'  the second such class
    '·'  anything else; the smallest earlier index of the class goes to sideinfo

'1' and '2' are only used when the predecessor's class has degree <= 2, so the
list of classes seen next to it has at most two entries. The reader replays
the same bookkeeping and needs no degrees.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .shapes import (ReducedShape, ShapeGraph, ShapeRecord, max_disjoint_revenants,
                     reduce_shape, reduced_graph, to_rgs)

DOT = "·"
ALPHABET = ("*", "0", "1", "2", DOT)


class DecodeError(ValueError):
    pass


@dataclass(frozen=True)
class EncodedPartition:
    symbols: str
    sideinfo: dict = field(default_factory=dict)  # symbol position -> earlier position, 0-based
    positions: tuple[int, ...] = ()  # the surviving indices the symbols stand for
    yellow_refs: dict = field(default_factory=dict)  # full-walk variant only

    def __post_init__(self):
        if any(ch not in ALPHABET for ch in self.symbols):
            raise ValueError("symbol outside the five-letter alphabet")
        if not self.positions:
            object.__setattr__(self, "positions", tuple(range(len(self.symbols))))
        if len(self.positions) != len(self.symbols):
            raise ValueError("positions and symbols differ in length")

    @property
    def n_dots(self) -> int:
        return self.symbols.count(DOT)

    def to_line(self) -> str:
        """Symbols, a space, then 1-based position:index pairs."""
        side = ",".join(f"{p + 1}:{q + 1}" for p, q in sorted(self.sideinfo.items()))
        return f"{self.symbols} {side}".rstrip()

    @classmethod
    def from_line(cls, line: str) -> "EncodedPartition":
        parts = line.strip().split(" ")
        symbols = parts[0] if parts and parts[0] else ""
        side = {}
        if len(parts) > 1 and parts[1]:
            for item in parts[1].split(","):
                a, b = item.split(":")
                side[int(a) - 1] = int(b) - 1
        return cls(symbols, side)


class _Reader:
    """Shared bookkeeping: classes seen next to each class, in order of first appearance."""

    def __init__(self):
        self.seen: dict[int, list[int]] = {}

    def note(self, a: int, b: int):
        if a == b:
            return
        for x, y in ((a, b), (b, a)):
            lst = self.seen.setdefault(x, [])
            if y not in lst:
                lst.append(y)

    def nbrs(self, a: int) -> list[int]:
        return self.seen.get(a, [])


def encode_labels(labels: Sequence[int], degree) -> EncodedPartition:
    """Encode a class sequence; `degree(c)` gives the graph degree of class c."""
    syms, side = [], {}
    first: dict[int, int] = {}
    rd = _Reader()
    for i, c in enumerate(labels):
        prev = labels[i - 1] if i else None
        if c not in first:
            syms.append("*")
            first[c] = i
        elif c == prev:
            syms.append("0")
        else:
            lst = rd.nbrs(prev)
            if degree(prev) <= 2 and c in lst[:2]:
                syms.append("12"[lst.index(c)])
            else:
                syms.append(DOT)
                side[i] = first[c]
        if prev is not None:
            rd.note(prev, c)
    return EncodedPartition("".join(syms), side)


def decode_labels(e: EncodedPartition) -> tuple[int, ...]:
    labels: list[int] = []
    rd = _Reader()
    n_cls = 0
    for i, ch in enumerate(e.symbols):
        prev = labels[-1] if labels else None
        if ch == "*":
            c = n_cls
            n_cls += 1
        elif prev is None:
            raise DecodeError(f"position {i + 1}: '{ch}' needs a predecessor")
        elif ch == "0":
            c = prev
        elif ch in "12":
            lst = rd.nbrs(prev)
            t = int(ch) - 1
            if t >= len(lst):
                raise DecodeError(f"position {i + 1}: no class number {ch} next to the predecessor")
            c = lst[t]
        else:
            j = e.sideinfo.get(i)
            if j is None or not 0 <= j < i:
                raise DecodeError(f"position {i + 1}: '·' without a valid earlier index")
            c = labels[j]
        labels.append(c)
        if prev is not None:
            rd.note(prev, c)
    return tuple(labels)


def encode_partition(r: ReducedShape, g: ShapeGraph | None = None) -> EncodedPartition:
    """Encode the relation restricted to the surviving indices of r."""
    if g is None:
        g = reduced_graph(r)
    adj = g.adjacency()
    wc = r.word_classes
    e = encode_labels(wc, lambda c: len(adj.get(c, ())))
    return EncodedPartition(e.symbols, e.sideinfo, tuple(r.surviving))


def decode_partition(e: EncodedPartition) -> list[list[int]]:
    """Classes as sorted lists of the encoded positions, ordered by first element."""
    labels = decode_labels(e)
    out: dict[int, list[int]] = {}
    for pos, c in zip(e.positions, labels):
        out.setdefault(c, []).append(pos)
    return sorted(out.values())


def dot_budget(nu: int, kappa: int) -> int:
    if nu < 0 or kappa < 0:
        raise ValueError("nu and kappa must be >= 0")
    return (kappa - 1) * nu + 2


def partition_shape(classes: Sequence[Sequence[int]], one_based: bool = True) -> ReducedShape:
    """Reduced shape of a partition with all signs +1, so every index survives."""
    n = sum(len(c) for c in classes)
    s = ShapeRecord.from_classes(classes, (1,) * n, one_based=one_based) if n % 2 == 0 else None
    if s is not None:
        return reduce_shape(s)
    off = 1 if one_based else 0
    lab = [0] * n
    for c, members in enumerate(classes):
        for i in members:
            lab[i - off] = c
    lab = to_rgs(lab)
    return ReducedShape(lab, tuple(range(n)), frozenset(), tuple((c, 1) for c in lab), ())


def max_class_exits(word: Sequence[int]) -> int:
    """Largest number of indices of one class whose successor lies in another class.

    This is the quantity the dot count really uses. It is at most one more than
    the number of disjoint revenants, and can exceed it (AABCADBC: 1 revenant,
    class A exits twice).
    """
    cnt: dict[int, int] = {}
    for a, b in zip(word, word[1:]):
        if a != b:
            cnt[a] = cnt.get(a, 0) + 1
    exits = max(cnt.values(), default=0)
    assert exits <= max_disjoint_revenants(word) + 1
    return exits


def dot_count_check(r: ReducedShape, g: ShapeGraph | None = None) -> tuple[int, int]:
    """(number of dots, budget), with nu and the per-class exit bound measured here."""
    if g is None:
        g = reduced_graph(r)
    e = encode_partition(r, g)
    return e.n_dots, dot_budget(g.n_high_degree(), max_class_exits(r.word_classes))


# ---------------------------------------------------------------------------
# full-walk variant


@dataclass(frozen=True)
class EncodedWalk:
    parens: str  # '(' opener, ')' closer, '.' surviving, over all 2k indices
    survivors: EncodedPartition
    refs: dict  # index -> ("new",) | ("num", t) | ("idx", j)


def _walk_pairs(parens: str) -> dict[int, int]:
    stack, mate = [], {}
    for i, ch in enumerate(parens):
        if ch == "(":
            stack.append(i)
        elif ch == ")":
            if not stack:
                raise DecodeError(f"position {i + 1}: unmatched ')'")
            j = stack.pop()
            mate[i] = j
        elif ch != ".":
            raise DecodeError(f"position {i + 1}: bad parenthesis symbol {ch!r}")
    if stack:
        raise DecodeError(f"position {stack[-1] + 1}: unmatched '('")
    return mate


def _candidates(n: int, primes: Sequence[int], betas: Sequence[int], lit, labels, j: int) -> list[int]:
    """Classes with a lit index i < j whose prime divides beta_j - beta_i, by first appearance."""
    out = []
    for i in range(j):
        if i in lit and (betas[j] - betas[i]) % primes[i] == 0 and labels[i] not in out:
            out.append(labels[i])
    return out


def encode_walk(n: int, primes: Sequence[int], sigma: Sequence[int], lit=()) -> EncodedWalk:
    """Encode the equal-prime relation of a walk from n.

    Closers follow their openers. Openers and first surviving occurrences that
    repeat an earlier class name it by its number among the lit-divisor
    candidates when possible, and by an explicit earlier index otherwise.
    """
    lit = frozenset(lit)
    betas = [0]
    for p, s in zip(primes, sigma):
        betas.append(betas[-1] + s * p)
    for i in lit:
        if (n + betas[i]) % primes[i]:
            raise ValueError(f"lit index {i + 1} is not a divisibility step")
    labels = to_rgs(primes)
    s = ShapeRecord(labels, tuple(sigma), lit)
    r = reduce_shape(s)
    parens = ["."] * len(labels)
    for a, b in r.pairs:
        parens[a], parens[b] = "(", ")"
    surv = set(r.surviving)
    first_surv: dict[int, int] = {}
    for i in r.surviving:
        first_surv.setdefault(labels[i], i)
    refs = {}
    for j, c in enumerate(labels):
        needs = parens[j] == "(" or (j in surv and first_surv[c] == j)
        if not needs:
            continue
        if c not in labels[:j]:
            refs[j] = ("new",)
            continue
        cand = _candidates(n, primes, betas, lit, labels, j)
        if c in cand:
            t = cand.index(c) + 1
            assert t <= _omega_shift(n + betas[j], primes[:j])
            refs[j] = ("num", t)
        else:
            refs[j] = ("idx", labels.index(c))
    return EncodedWalk("".join(parens), encode_partition(r), refs)


def _omega_shift(x: int, primes: Sequence[int]) -> int:
    return sum(1 for p in set(primes) if x % p == 0)


def decode_walk(e: EncodedWalk, n: int, prime_of, sigma: Sequence[int], lit=()) -> tuple[int, ...]:
    """Recover the class labels. prime_of(i) is only called for indices already decoded."""
    lit = frozenset(lit)
    k2 = len(e.parens)
    mate = _walk_pairs(e.parens)
    surv = [i for i, ch in enumerate(e.parens) if ch == "."]
    surv_labels = decode_labels(EncodedPartition(e.survivors.symbols, e.survivors.sideinfo))
    if len(surv_labels) != len(surv):
        raise DecodeError("survivor encoding length does not match the parentheses")
    labels: list[int] = []
    primes: list[int] = []
    betas = [0]
    next_cls = 0
    surv_cls: dict[int, int] = {}  # survivor-local class -> global class
    surv_idx = {i: t for t, i in enumerate(surv)}
    for j in range(k2):
        ch = e.parens[j]
        if ch == ")":
            c = labels[mate[j]]
        elif ch == "." and surv_labels[surv_idx[j]] in surv_cls:
            c = surv_cls[surv_labels[surv_idx[j]]]
        else:
            ref = e.refs.get(j)
            if ref is None:
                raise DecodeError(f"position {j + 1}: missing class reference")
            if ref[0] == "new":
                c = next_cls
            elif ref[0] == "num":
                cand = _candidates(n, primes, betas, lit, labels, j)
                if not 1 <= ref[1] <= len(cand):
                    raise DecodeError(f"position {j + 1}: candidate number {ref[1]} out of range")
                c = cand[ref[1] - 1]
            elif ref[0] == "idx":
                if not 0 <= ref[1] < j:
                    raise DecodeError(f"position {j + 1}: index reference must point backwards")
                c = labels[ref[1]]
            else:
                raise DecodeError(f"position {j + 1}: unknown reference {ref!r}")
            if ch == ".":
                surv_cls[surv_labels[surv_idx[j]]] = c
        if c == next_cls:
            next_cls += 1
        labels.append(c)
        primes.append(prime_of(j))
        betas.append(betas[-1] + sigma[j] * primes[-1])
    return tuple(labels)

"""Closed walks and the trace of even powers of A, plus the naive random-walk model."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .arith import PrimeSet, Window
from .divgraph import DivisibilityOperator


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class WalkSpec:
    primes: tuple[int, ...]
    sigma: tuple[int, ...]

    def __post_init__(self):
        if len(self.primes) != len(self.sigma):
            raise ValueError("primes and signs differ in length")
        if any(s not in (1, -1) for s in self.sigma):
            raise ValueError("signs must be +-1")

    @property
    def k2(self) -> int:
        return len(self.primes)

    @property
    def betas(self) -> list[int]:
        """Partial sums beta_0 = 0, beta_1, ..., beta_{2k}."""
        out = [0]
        for p, s in zip(self.primes, self.sigma):
            out.append(out[-1] + s * p)
        return out

    @property
    def closed(self) -> bool:
        return self.betas[-1] == 0

    def has_singleton(self) -> bool:
        c = Counter(self.primes)
        return any(v == 1 for v in c.values())


def closed_walks(primes: Sequence[int], k2: int, slack: int | None = None,
                 budget: int = 10_000_000) -> Iterator[WalkSpec]:
    """All step sequences (sigma_i p_i) of length k2 summing to 0.

    A partial sum further from 0 than the largest remaining return distance is
    pruned; `slack` additionally caps |beta_i| (e.g. at N for a window).
    """
    ps = sorted(primes)
    if not ps:
        return
    H = ps[-1]
    count = 0
    steps = [(p, s) for p in ps for s in (1, -1)]
    pr, sg = [], []

    def rec(beta):
        nonlocal count
        i = len(pr)
        if i == k2:
            if beta == 0:
                count += 1
                if count > budget:
                    raise BudgetExceeded(f"more than {budget} closed walks enumerated")
                w = WalkSpec(tuple(pr), tuple(sg))
                assert w.betas[-1] == 0 and w.betas[0] == 0
                yield w
            return
        left = k2 - i
        for p, s in steps:
            b = beta + s * p
            if abs(b) > (left - 1) * H:
                continue
            if slack is not None and abs(b) > slack:
                continue
            pr.append(p)
            sg.append(s)
            yield from rec(b)
            pr.pop()
            sg.pop()

    yield from rec(0)


def trace_power_operator(op: DivisibilityOperator, k: int, mask: np.ndarray | None = None,
                         mode: str = "exact", probes: int = 64, seed: int = 0,
                         block: int = 256) -> tuple[float, float]:
    """Tr (A|X)^{2k} as (value, standard error); the error is 0 in exact mode.

    Exact mode applies A 2k times to blocks of basis vectors and reads the
    diagonal. Estimate mode uses Hutchinson's estimator with +-1 probes z and
    z^T A^{2k} z = |A^k z|^2.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    N = op.N
    m = np.ones(N, dtype=bool) if mask is None else mask
    if k == 0:
        return float(m.sum()), 0.0
    if mode == "exact":
        idx = np.flatnonzero(m)
        diag = []
        for a in range(0, len(idx), block):
            cols = idx[a : a + block]
            E = np.zeros((N, len(cols)))
            E[cols, np.arange(len(cols))] = 1.0
            Y = E
            for _ in range(2 * k):
                Y = op.apply(Y, mask)
            diag.append(Y[cols, np.arange(len(cols))])
        val = math.fsum(np.concatenate(diag)) if diag else 0.0
        assert val >= -1e-9 * max(1.0, abs(val))
        return val, 0.0
    if mode == "hutchinson":
        rng = np.random.default_rng(seed)
        ests = []
        for _ in range(probes):
            z = rng.choice((-1.0, 1.0), size=N) * m
            y = z
            for _ in range(k):
                y = op.apply(y, mask)
            ests.append(float(y @ y))
        ests = np.array(ests)
        se = float(ests.std(ddof=1) / math.sqrt(len(ests))) if len(ests) > 1 else float("inf")
        return float(ests.mean()), se
    raise ValueError(f"unknown mode {mode!r}")


def _walk_weight_vector(win: Window, w: WalkSpec, mask: np.ndarray | None) -> np.ndarray:
    """Per-start-vertex weight of one step sequence: prod (1_{p | n + beta} - 1/p)."""
    N = win.N
    n = win.n_values
    betas = w.betas
    lo_b, hi_b = min(betas), max(betas)
    # start indices whose whole orbit stays inside the window
    valid = np.zeros(N, dtype=bool)
    a, b = max(0, -lo_b), min(N, N - hi_b)
    if a >= b:
        return np.zeros(N)
    valid[a:b] = True
    out = valid.astype(np.float64)
    for i, (p, s) in enumerate(zip(w.primes, w.sigma)):
        node = n + betas[i]
        out *= (node % p == 0) - 1.0 / p
    if mask is not None:
        for bt in betas[:-1]:
            sh = np.zeros(N, dtype=bool)
            lo_i, hi_i = max(0, -bt), min(N, N - bt)
            if lo_i < hi_i:
                sh[lo_i:hi_i] = mask[lo_i + bt : hi_i + bt]
            out *= sh
    return out


def trace_power_walksum(win: Window, k: int, mask: np.ndarray | None = None,
                        budget: int = 10_000_000, split_singletons: bool = False):
    """N_{2k}: the closed-walk sum over start points in X with every node in X.

    With split_singletons, returns (sum over walks where some prime occurs exactly
    once, sum over the rest) instead of the total.
    """
    if k == 0:
        total = float(win.N if mask is None else mask.sum())
        return (0.0, total) if split_singletons else total
    single, rest = [], []
    primes = [p for p in win.pset.primes if p < win.N]
    for w in closed_walks(primes, 2 * k, slack=win.N, budget=budget):
        v = math.fsum(_walk_weight_vector(win, w, mask))
        (single if w.has_singleton() else rest).append(v)
    if split_singletons:
        return math.fsum(single), math.fsum(rest)
    return math.fsum(single + rest)


def walksum_crt(primes: Sequence[int], k: int) -> tuple[Fraction, Fraction]:
    """Exact (singleton part, rest) of the closed-walk sum on Z / PZ, P = prod primes.

    Weights are scaled by p to the integers p 1_{p | x} - 1, so all arithmetic is exact.
    """
    ps = sorted(set(primes))
    P = math.prod(ps)
    single, rest = Fraction(0), Fraction(0)
    n = np.arange(P, dtype=np.int64)
    for w in closed_walks(ps, 2 * k):
        acc = np.ones(P, dtype=object)
        for i, (p, s) in enumerate(zip(w.primes, w.sigma)):
            node = (n + w.betas[i]) % P
            acc = acc * (p * (node % p == 0).astype(np.int64) - 1)
        val = Fraction(int(acc.sum()), math.prod(w.primes))
        if w.has_singleton():
            single += val
        else:
            rest += val
    return single, rest


def singleton_cancellation_check(win: Window | None, k: int, mask: np.ndarray | None = None,
                                 primes: Sequence[int] | None = None, mode: str = "window"):
    """(singleton part, rest) of the closed-walk sum, in the window or exactly mod P."""
    if mode == "crt":
        if primes is None:
            primes = win.pset.primes
        return walksum_crt(primes, k)
    if mode == "window":
        return trace_power_walksum(win, k, mask, split_singletons=True)
    raise ValueError(f"unknown mode {mode!r}")


def count_trivial_walks(k: int) -> int:
    """2^k C_k: walks whose prime pattern is a matched parenthesis word."""
    if k < 0:
        raise ValueError("k must be >= 0")
    return 2**k * math.comb(2 * k, k) // (k + 1)


@dataclass
class WalkStats:
    k: int
    samples: int
    mean: float
    variance: float
    stderr: float
    expected_variance: float
    bin_edges: np.ndarray
    counts: np.ndarray


def simulate_naive_walk(P: PrimeSet, k: int, samples: int, seed: int = 0,
                        block: int = 100_000, bins: int = 41) -> WalkStats:
    """k-step walks taking step sigma p with probability 1 / (2 L p).

    Each block draws from its own child stream of the master seed, so blocks
    can run in any order or in parallel; seed and block size fix the result.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    ps = P.array
    prob = (1.0 / ps) / P.scriptL
    prob /= prob.sum()
    var_exp = k * math.fsum(float(p) / P.scriptL for p in P.primes)
    scale = math.sqrt(max(k, 1)) * len(ps) / P.scriptL
    edges = np.linspace(-4 * scale, 4 * scale, bins + 1)
    counts = np.zeros(bins, dtype=np.int64)
    nblocks = -(-samples // block)
    ss = np.random.SeedSequence(seed)
    parts1, parts2 = [], []
    for b, child in enumerate(ss.spawn(nblocks)):
        rng = np.random.default_rng(child)
        m = min(block, samples - b * block)
        if k == 0:
            end = np.zeros(m)
        else:
            steps = rng.choice(ps, size=(m, k), p=prob) * rng.choice((-1, 1), size=(m, k))
            end = steps.sum(axis=1).astype(np.float64)
        parts1.append(math.fsum(end))
        parts2.append(math.fsum(end * end))
        counts += np.histogram(end, bins=edges)[0]
    s1, s2 = math.fsum(parts1), math.fsum(parts2)
    mean = s1 / samples
    var = (s2 - samples * mean * mean) / max(samples - 1, 1)
    se = math.sqrt(var / samples) if samples > 1 else float("inf")
    return WalkStats(k, samples, mean, var, se, var_exp, edges, counts)

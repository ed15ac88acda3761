"""Windowed integer arithmetic: sieving primes, Liouville values, P-divisor tables."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

RECIP_TOL = 1e-12


def primes_upto(n: int) -> np.ndarray:
    """All primes <= n (sieve of Eratosthenes)."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.flatnonzero(sieve).astype(np.int64)


def primes_between(lo: int, hi: int) -> np.ndarray:
    """Primes in [lo, hi] via a segmented sieve over that range only."""
    lo = max(lo, 2)
    if hi < lo:
        return np.zeros(0, dtype=np.int64)
    seg = np.ones(hi - lo + 1, dtype=bool)
    for p in primes_upto(math.isqrt(hi)):
        p = int(p)
        start = max(p * p, ((lo + p - 1) // p) * p)
        seg[start - lo :: p] = False
    return np.flatnonzero(seg).astype(np.int64) + lo


@dataclass(frozen=True)
class PrimeSet:
    primes: tuple[int, ...]
    H0: int
    H: int
    scriptL: float

    def __post_init__(self):
        if not self.primes:
            raise ValueError("empty prime set")
        if any(b <= a for a, b in zip(self.primes, self.primes[1:])):
            raise ValueError("primes must be strictly increasing")
        if self.primes[0] < self.H0 or self.primes[-1] > self.H:
            raise ValueError("primes must lie in [H0, H]")

    @classmethod
    def from_primes(cls, primes, H0: int | None = None, H: int | None = None) -> "PrimeSet":
        ps = tuple(sorted(int(p) for p in primes))
        if not ps:
            raise ValueError("empty prime set")
        return cls(ps, ps[0] if H0 is None else H0, ps[-1] if H is None else H,
                   math.fsum(1.0 / p for p in ps))

    def __len__(self):
        return len(self.primes)

    def __iter__(self):
        return iter(self.primes)

    def __contains__(self, p):
        return p in self._set

    @property
    def _set(self) -> frozenset:
        # cached lazily on the frozen instance
        s = self.__dict__.get("_pset")
        if s is None:
            s = frozenset(self.primes)
            object.__setattr__(self, "_pset", s)
        return s

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.primes, dtype=np.int64)


def build_prime_set(H0: int, H: int) -> PrimeSet:
    if not 2 <= H0 <= H:
        raise ValueError(f"need 2 <= H0 <= H, got H0={H0}, H={H}")
    ps = primes_between(H0, H)
    if len(ps) == 0:
        raise ValueError(f"no primes in [{H0}, {H}]")
    return PrimeSet.from_primes(ps.tolist(), H0, H)


def big_omega_range(lo: int, hi: int) -> np.ndarray:
    """Omega(n) (prime factors with multiplicity) for n in [lo, hi].

    Divides out every prime <= sqrt(hi) from a copy of the range; a cofactor
    left over is a single prime above sqrt(hi).
    """
    if lo < 1 or hi < lo:
        raise ValueError("need 1 <= lo <= hi")
    rem = np.arange(lo, hi + 1, dtype=np.int64)
    omega = np.zeros(hi - lo + 1, dtype=np.int16)
    for p in primes_upto(math.isqrt(hi)):
        p = int(p)
        pk = p
        while pk <= hi:
            start = (-lo) % pk
            omega[start::pk] += 1
            rem[start::pk] //= p
            if pk > hi // p:
                break
            pk *= p
    omega += rem > 1
    return omega


def liouville_range(lo: int, hi: int) -> np.ndarray:
    """lambda(n) in {-1, +1} for n in [lo, hi], as int8."""
    omega = big_omega_range(lo, hi)
    return (1 - 2 * (omega & 1)).astype(np.int8)


def liouville_trial(n: int) -> int:
    """lambda(n) by trial division; used as an oracle."""
    count = 0
    d = 2
    while d * d <= n:
        while n % d == 0:
            n //= d
            count += 1
        d += 1
    if n > 1:
        count += 1
    return -1 if count % 2 else 1


@dataclass(frozen=True, eq=False)
class Window:
    """The vertex set (N, 2N] with lambda values and divisors from a PrimeSet.

    Index i of every array corresponds to the integer N + 1 + i.
    """

    N: int
    pset: PrimeSet
    lam: np.ndarray
    omega_P: np.ndarray
    # CSR layout: divisors of N+1+i are pd_primes[pd_ptr[i]:pd_ptr[i+1]]
    pd_ptr: np.ndarray = field(repr=False)
    pd_primes: np.ndarray = field(repr=False)

    @property
    def lo(self) -> int:
        return self.N + 1

    @property
    def hi(self) -> int:
        return 2 * self.N

    @property
    def n_values(self) -> np.ndarray:
        return np.arange(self.lo, self.hi + 1, dtype=np.int64)

    def index(self, n: int) -> int:
        if not self.lo <= n <= self.hi:
            raise IndexError(f"{n} outside ({self.N}, {2 * self.N}]")
        return n - self.lo

    def pdivs(self, n: int) -> list[int]:
        i = self.index(n)
        return self.pd_primes[self.pd_ptr[i] : self.pd_ptr[i + 1]].tolist()

    def lam_at(self, n: int) -> int:
        return int(self.lam[self.index(n)])

    def multiples(self, p: int) -> np.ndarray:
        """Window indices of the multiples of p."""
        start = (-self.lo) % p
        return np.arange(start, self.N, p, dtype=np.int64)


def build_window(N: int, P: PrimeSet) -> Window:
    if N < 1:
        raise ValueError("N must be >= 1")
    if 2 * N > np.iinfo(np.int64).max // 4:
        raise OverflowError("window too large for int64 index arithmetic")
    lam = liouville_range(N + 1, 2 * N)
    idx_parts, p_parts = [], []
    lo = N + 1
    for p in P.primes:
        start = (-lo) % p
        idx = np.arange(start, N, p, dtype=np.int64)
        idx_parts.append(idx)
        p_parts.append(np.full(len(idx), p, dtype=np.int64))
    if idx_parts:
        idx = np.concatenate(idx_parts)
        ps = np.concatenate(p_parts)
        order = np.argsort(idx, kind="stable")
        idx, ps = idx[order], ps[order]
    else:
        idx = ps = np.zeros(0, dtype=np.int64)
    omega_P = np.bincount(idx, minlength=N).astype(np.int32)
    ptr = np.zeros(N + 1, dtype=np.int64)
    np.cumsum(omega_P, out=ptr[1:])
    return Window(N, P, lam, omega_P, ptr, ps)


def expected_incidences(N: int, P: PrimeSet) -> int:
    """Sum over p in P of the number of multiples of p in (N, 2N]."""
    return sum(2 * N // p - N // p for p in P.primes)


@dataclass
class RegimeParams:
    N: int
    k: int
    K: float
    ell: int
    m: int = 1

    def __post_init__(self):
        for name in ("N", "k", "ell", "m"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 1:
                raise ValueError(f"{name} must be a positive integer, got {v!r}")
        if not self.K > 0:
            raise ValueError("K must be positive")

    def check(self, P: PrimeSet, warn: bool = True) -> dict[str, bool]:
        """Report which of the Main Theorem's hypotheses hold; never raises."""
        logH = math.log(P.H)
        logH0 = math.log(P.H0)
        logN = math.log(self.N)
        L = P.scriptL
        llH = math.log(logH) if logH > 1 else float("-inf")
        report = {
            "log H0 >= (log H)^(1/2) (log log H)^2": logH > 1 and logH0 >= math.sqrt(logH) * llH**2,
            "scriptL >= e": L >= math.e,
            "log H <= sqrt(log N / scriptL)": logH <= math.sqrt(logN / L),
            "K <= log N / (scriptL (log H)^2)": self.K <= logN / (L * logH**2),
            "K >= 1": self.K >= 1,
        }
        if warn:
            bad = [k for k, ok in report.items() if not ok]
            if bad:
                warnings.warn("outside the theorem's regime: " + "; ".join(bad), RuntimeWarning,
                              stacklevel=2)
        return report


def log_chowla_sum(x: int) -> float:
    """(1/log x) * sum_{n <= x} lambda(n) lambda(n+1) / n, with fsum accumulation."""
    if x < 3:
        raise ValueError("x must be >= 3")
    lam = liouville_range(1, x + 1).astype(np.float64)
    n = np.arange(1, x + 1, dtype=np.float64)
    terms = lam[:-1] * lam[1:] / n
    return math.fsum(terms) / math.log(x)


def log_chowla_series(xs) -> list[tuple[int, float]]:
    """log_chowla_sum at each x in xs, sharing one Liouville table."""
    xs = sorted(int(x) for x in xs)
    if not xs or xs[0] < 3:
        raise ValueError("every x must be >= 3")
    lam = liouville_range(1, xs[-1] + 1).astype(np.float64)
    terms = lam[:-1] * lam[1:] / np.arange(1, xs[-1] + 1, dtype=np.float64)
    # a fresh fsum per x keeps each value bit-identical to log_chowla_sum(x)
    return [(x, math.fsum(terms[:x]) / math.log(x)) for x in xs]


def log_chowla_window(x: int, w: float) -> float:
    """(1/log w) * sum_{x/w <= n <= x} lambda(n) lambda(n+1) / n."""
    if not math.e < w <= x:
        raise ValueError("need e < w <= x")
    lo = max(1, math.ceil(x / w))
    lam = liouville_range(lo, x + 1).astype(np.float64)
    n = np.arange(lo, x + 1, dtype=np.float64)
    return math.fsum(lam[:-1] * lam[1:] / n) / math.log(w)

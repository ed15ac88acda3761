"""The divisibility graph, its averaged companion and their difference operator.

Vectors are arrays over the window, index i <-> integer N + 1 + i. Every
operator accepts 1-D vectors or 2-D blocks (columns are vectors). Terms that
would land outside the window are dropped; there is no wraparound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

from .arith import Window

# above this many primes the averaged operator is applied by FFT convolution
FFT_PRIME_THRESHOLD = 64


def gamma_matrix(win: Window) -> sp.csr_matrix:
    """Adjacency of the divisibility graph: {n, n+p} when p | n, both in the window."""
    N = win.N
    rows, cols = [], []
    for p in win.pset.primes:
        idx = win.multiples(p)
        idx = idx[idx + p < N]
        rows.append(idx)
        cols.append(idx + p)
    r = np.concatenate(rows) if rows else np.zeros(0, dtype=np.int64)
    c = np.concatenate(cols) if cols else np.zeros(0, dtype=np.int64)
    data = np.ones(2 * len(r))
    m = sp.coo_matrix((data, (np.concatenate([r, c]), np.concatenate([c, r]))), shape=(N, N))
    return m.tocsr()


class DivisibilityOperator:
    """Applies Ad_Gamma, Ad_Gamma' and A = Ad_Gamma - Ad_Gamma' on a window."""

    def __init__(self, win: Window, use_fft: bool | None = None):
        self.win = win
        self.N = win.N
        self.gamma = gamma_matrix(win)
        self.primes = [p for p in win.pset.primes if p < self.N]
        if use_fft is None:
            use_fft = len(self.primes) > FFT_PRIME_THRESHOLD
        self.use_fft = use_fft
        if use_fft and self.primes:
            H = max(self.primes)
            kern = np.zeros(2 * H + 1)
            for p in self.primes:
                kern[H + p] = kern[H - p] = 1.0 / p
            self._kernel = kern
            self._H = H

    def apply_gamma(self, f: np.ndarray) -> np.ndarray:
        return self.gamma @ f

    def apply_gamma_prime(self, f: np.ndarray) -> np.ndarray:
        f = np.asarray(f, dtype=np.float64)
        if self.use_fft and self.primes:
            from scipy.signal import oaconvolve

            kern = self._kernel if f.ndim == 1 else self._kernel[:, None]
            full = oaconvolve(f, kern, mode="full", axes=0)
            return full[self._H : self._H + self.N]
        out = np.zeros_like(f)
        for p in self.primes:
            w = 1.0 / p
            out[:-p] += w * f[p:]
            out[p:] += w * f[:-p]
        return out

    def apply(self, f: np.ndarray, mask: np.ndarray | None = None) -> np.ndarray:
        """A f, or (A|X) f = 1_X A (1_X f) when a boolean mask is given."""
        f = np.asarray(f, dtype=np.float64)
        if f.shape[0] != self.N:
            raise ValueError(f"vector length {f.shape[0]} != window size {self.N}")
        if mask is not None:
            m = mask if f.ndim == 1 else mask[:, None]
            f = f * m
        out = self.apply_gamma(f) - self.apply_gamma_prime(f)
        if mask is not None:
            out = out * m
        return out

    def linear_operator(self, mask: np.ndarray | None = None) -> LinearOperator:
        return LinearOperator((self.N, self.N), matvec=lambda v: self.apply(v.ravel(), mask),
                              matmat=lambda V: self.apply(V, mask), dtype=np.float64)


def apply_adjacency(win: Window, f: np.ndarray, which: str = "A",
                    mask: np.ndarray | None = None) -> np.ndarray:
    op = DivisibilityOperator(win)
    if which == "A":
        return op.apply(f, mask)
    if mask is not None:
        f = f * (mask if np.ndim(f) == 1 else mask[:, None])
    if which == "gamma":
        out = op.apply_gamma(f)
    elif which == "gamma_prime":
        out = op.apply_gamma_prime(f)
    else:
        raise ValueError(f"unknown operator {which!r}")
    if mask is not None:
        out = out * (mask if np.ndim(out) == 1 else mask[:, None])
    return out


def dense_matrix(win: Window, mask: np.ndarray | None = None) -> np.ndarray:
    """A as a dense matrix built entry by entry; an oracle for small windows."""
    N = win.N
    M = np.zeros((N, N))
    for i in range(N):
        n = win.lo + i
        for p in win.pset.primes:
            j = i + p
            if j >= N:
                continue
            w = (1.0 if n % p == 0 else 0.0) - 1.0 / p
            M[i, j] = M[j, i] = w
    if mask is not None:
        M = M * mask[:, None] * mask[None, :]
    return M


def inner(f: np.ndarray, g: np.ndarray) -> float:
    """<f, g> = (1/N) sum f g over the window."""
    return float(np.dot(f, g)) / len(f)


def rayleigh_quotient(op: DivisibilityOperator, f: np.ndarray,
                      mask: np.ndarray | None = None) -> float:
    nf = inner(f, f)
    if nf == 0:
        raise ValueError("zero vector")
    return inner(f, op.apply(f, mask)) / nf


@dataclass
class EigenEstimate:
    value: float
    residual: float
    converged: bool
    vector: np.ndarray | None = None


def estimate_extreme_eigenvalue(op: DivisibilityOperator, mask: np.ndarray | None = None,
                                iters: int = 3000, seed: int = 0,
                                tol: float = 1e-10) -> EigenEstimate:
    """Largest-magnitude eigenvalue of A|X via implicitly restarted Lanczos.

    Every returned value is a Ritz value, so its modulus never exceeds the
    true spectral radius; `residual` is ||A v - value v|| for the unit Ritz vector.
    """
    N = op.N
    if mask is not None and not mask.any():
        return EigenEstimate(0.0, 0.0, True, np.zeros(N))
    if N <= 2:
        M = op.apply(np.eye(N), mask)
        w, V = np.linalg.eigh(M)
        j = int(np.argmax(np.abs(w)))
        return EigenEstimate(float(w[j]), 0.0, True, V[:, j])
    rng = np.random.default_rng(seed)
    v0 = rng.standard_normal(N)
    if mask is not None:
        v0 = v0 * mask
    lin = op.linear_operator(mask)
    converged = True
    try:
        w, V = eigsh(lin, k=1, which="LM", v0=v0, maxiter=iters, tol=tol)
    except ArpackNoConvergence as exc:
        converged = False
        w, V = exc.eigenvalues, exc.eigenvectors
        if len(w) == 0:
            # fall back on a Rayleigh quotient of the starting vector
            v = v0 / np.linalg.norm(v0)
            val = float(v @ op.apply(v, mask))
            return EigenEstimate(val, float(np.linalg.norm(op.apply(v, mask) - val * v)), False, v)
    val = float(w[0])
    v = V[:, 0] / np.linalg.norm(V[:, 0])
    res = float(np.linalg.norm(op.apply(v, mask) - val * v))
    return EigenEstimate(val, res, converged, v)


@dataclass
class LocalPiece:
    lo: int  # first integer of the interval
    hi: int  # last integer of the interval
    quotient: float
    weight: float  # share of ||f||^2 carried by the piece


def extract_local_rayleigh(op: DivisibilityOperator, f: np.ndarray, rho: float,
                           mask: np.ndarray | None = None) -> list[LocalPiece]:
    """Split f into restrictions to intervals of length ceil(10 H / rho).

    Since A only connects integers at distance <= H, the quotient of f is the
    weighted mean of the piece quotients up to cross terms between adjacent pieces.
    """
    if not 0 < rho:
        raise ValueError("rho must be positive")
    H = max(op.win.pset.primes)
    L = max(1, math.ceil(10 * H / rho))
    total = float(np.dot(f, f))
    pieces = []
    for a in range(0, op.N, L):
        g = np.zeros_like(f)
        g[a : a + L] = f[a : a + L]
        ng = float(np.dot(g, g))
        if ng == 0:
            continue
        q = float(np.dot(g, op.apply(g, mask))) / ng
        pieces.append(LocalPiece(op.win.lo + a, op.win.lo + min(a + L, op.N) - 1, q, ng / total))
    return pieces


def iterate_extraction(op: DivisibilityOperator, rho: float, threshold: float,
                       mask: np.ndarray | None = None, max_rounds: int = 10,
                       seed: int = 0) -> list[list[LocalPiece]]:
    """Repeatedly find a top eigenvector, remove its pieces with |quotient| >= threshold.

    Returns the extracted pieces per round; stops when nothing exceeds the threshold.
    """
    cur = np.ones(op.N, dtype=bool) if mask is None else mask.copy()
    rounds = []
    for r in range(max_rounds):
        est = estimate_extreme_eigenvalue(op, cur, seed=seed + r)
        if abs(est.value) < threshold or est.vector is None:
            break
        hot = [pc for pc in extract_local_rayleigh(op, est.vector, rho, cur)
               if abs(pc.quotient) >= threshold]
        if not hot:
            break
        for pc in hot:
            cur[pc.lo - op.win.lo : pc.hi - op.win.lo + 1] = False
        rounds.append(hot)
    return rounds


@dataclass
class VertexMask:
    bits: np.ndarray
    predicted: float = float("nan")  # N e^{-K L log K} + N / sqrt(H0), for reports only

    @property
    def excluded_count(self) -> int:
        return int(len(self.bits) - self.bits.sum())

    def __and__(self, other: "VertexMask") -> "VertexMask":
        return VertexMask(self.bits & other.bits)


def build_mask(win: Window, K: float, ell: int) -> VertexMask:
    """X = {n : omega_P(n) <= K L} intersected with Y_ell."""
    from .sieve import yell_mask

    L = win.pset.scriptL
    bits = win.omega_P <= K * L
    if ell >= 2:
        bits &= yell_mask(win.pset, ell, win.lo, win.hi)
    pred = win.N * math.exp(-K * L * math.log(K)) + win.N / math.sqrt(win.pset.H0) if K > 0 else float(win.N)
    return VertexMask(bits, pred)

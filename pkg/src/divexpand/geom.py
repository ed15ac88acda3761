"""Counting solutions of d_i | (M n + c)_i with n in a box."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._exact import bareiss_det

DEFAULT_BUDGET = 10_000_000


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class DivisibilityInstance:
    M: tuple[tuple[int, ...], ...]
    c: tuple[int, ...]
    d: tuple[int, ...]
    N: tuple[int, ...]  # box i is [N_i, 2 N_i]
    C: int
    D: int

    def __post_init__(self):
        M = tuple(tuple(int(x) for x in row) for row in self.M)
        object.__setattr__(self, "M", M)
        for name in ("c", "d", "N"):
            object.__setattr__(self, name, tuple(int(x) for x in getattr(self, name)))
        m = len(M)
        if m == 0 or any(len(row) != m for row in M):
            raise ValueError("M must be a non-empty square matrix")
        if not (len(self.c) == len(self.d) == len(self.N) == m):
            raise ValueError("c, d and N must have length m")
        if self.C < 1 or self.D < 1:
            raise ValueError("C and D must be positive")
        if any(abs(x) > self.C for row in M for x in row):
            raise ValueError(f"an entry of M exceeds C={self.C} in absolute value")
        if any(di < self.D for di in self.d):
            raise ValueError(f"every modulus must be >= D={self.D}")
        if any(Ni < self.D for Ni in self.N):
            raise ValueError(f"every box size must be >= D={self.D}")
        if bareiss_det(M) == 0:
            raise ValueError("M is singular")

    @property
    def m(self) -> int:
        return len(self.M)

    @property
    def box_volume(self) -> int:
        return math.prod(n + 1 for n in self.N)


def count_solutions_bruteforce(inst: DivisibilityInstance, budget: int = DEFAULT_BUDGET) -> int:
    if inst.box_volume > budget:
        raise BudgetExceeded(f"box has {inst.box_volume} points, budget {budget}")
    axes = [np.arange(n, 2 * n + 1, dtype=np.int64) for n in inst.N]
    grid = np.meshgrid(*axes, indexing="ij")
    ok = np.ones(grid[0].shape, dtype=bool)
    for i, row in enumerate(inst.M):
        val = sum(a * g for a, g in zip(row, grid)) + inst.c[i]
        ok &= val % inst.d[i] == 0
    return int(ok.sum())


def lemma_bound(inst: DivisibilityInstance) -> float:
    """(2 C m / D)^m prod N_i."""
    m = inst.m
    return (2 * inst.C * m / inst.D) ** m * math.prod(inst.N)


def random_instance(rng: np.random.Generator, max_m: int = 3, max_C: int = 5,
                    max_D: int = 20, max_N: int = 50, max_tries: int = 1000) -> DivisibilityInstance:
    """Draw parameters uniformly, rejecting draws that break the instance invariants."""
    for _ in range(max_tries):
        m = int(rng.integers(1, max_m + 1))
        C = int(rng.integers(1, max_C + 1))
        D = int(rng.integers(1, max_D + 1))
        if D > max_N:
            continue
        M = rng.integers(-C, C + 1, size=(m, m)).tolist()
        c = rng.integers(-100, 101, size=m).tolist()
        d = rng.integers(D, 3 * D + 1, size=m).tolist()
        N = rng.integers(D, max_N + 1, size=m).tolist()
        try:
            return DivisibilityInstance(tuple(map(tuple, M)), tuple(c), tuple(d), tuple(N), C, D)
        except ValueError:
            continue
    raise RuntimeError("could not draw a valid instance")

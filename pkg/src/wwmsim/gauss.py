"""Exact multivariate quadratic Gauss sums over Z/dZ.

A spec is the data of sum_{x in (Z/dZ)^m} w_d**(x^T A x + beta.x) times a
constant phase w_{d**h}**c.  `eval_brute` enumerates; `eval_closed` computes
the same value by symmetric Gaussian elimination (completing the square) in
O(m^3) ring operations, which also yields the zero criterion: the sum
vanishes iff some direction eliminated to zero quadratic coefficient keeps a
nonzero linear coefficient.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product

import numpy as np

from .ring import CyclotomicAmplitude, Modulus, RingError, legendre, mod_inverse

BRUTE_VARIABLE_CAP = 8


@dataclass
class GaussSumSpec:
    """One indexed quadratic Gauss sum."""

    m: int
    A: np.ndarray
    beta: np.ndarray
    c: int
    d: int
    h: int = 1

    def __post_init__(self):
        self.A = np.asarray(self.A, dtype=np.int64) % self.d
        self.beta = np.asarray(self.beta, dtype=np.int64) % self.d
        if self.A.shape != (self.m, self.m):
            raise ValueError(f"A must be {self.m}x{self.m}")
        if ((self.A - self.A.T) % self.d).any():
            raise ValueError("A must be symmetric mod d")
        if self.beta.shape != (self.m,):
            raise ValueError("beta has wrong length")
        self.c = int(self.c) % self.d**self.h

    @property
    def modulus(self) -> Modulus:
        return Modulus(self.d, self.h)


@dataclass
class ReducedForm:
    """Congruent diagonalization output: pivots, free directions, carried constant."""

    pivots: list
    residual_beta: list
    const: int  # mod-d constant picked up while completing squares
    d: int
    h: int
    c: int  # original mod-d**h constant

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def diagonal_spec(self) -> GaussSumSpec:
        m = len(self.pivots) + len(self.residual_beta)
        A = np.zeros((m, m), dtype=np.int64)
        for i, a in enumerate(self.pivots):
            A[i, i] = a
        beta = np.zeros(m, dtype=np.int64)
        beta[len(self.pivots) :] = self.residual_beta
        c = (self.c + self.d ** (self.h - 1) * self.const) % self.d**self.h
        return GaussSumSpec(m, A, beta, c, self.d, self.h)

    def provably_zero(self) -> bool:
        return any(b % self.d for b in self.residual_beta)


def eval_brute(spec: GaussSumSpec) -> CyclotomicAmplitude:
    """Exact sum over all d**m assignments (capped at m <= 8)."""
    if spec.m > BRUTE_VARIABLE_CAP:
        raise ValueError(f"brute force capped at {BRUTE_VARIABLE_CAP} variables")
    mod = spec.modulus
    lift = spec.d ** (spec.h - 1)
    if spec.m == 0:
        return CyclotomicAmplitude.root_power(mod, spec.c)
    grid = np.array(list(product(range(spec.d), repeat=spec.m)), dtype=np.int64)
    quad = np.einsum("si,ij,sj->s", grid, spec.A, grid)
    lin = grid @ spec.beta
    expo = (spec.c + lift * (quad + lin)) % mod.m
    counts = np.bincount(expo, minlength=mod.m)
    return CyclotomicAmplitude.from_power_counts(mod, counts)


@lru_cache(maxsize=None)
def unit_gauss_sum(d: int, h: int) -> CyclotomicAmplitude:
    """g = sum_u w_d**(u^2), exact; |g| = sqrt(d)."""
    mod = Modulus(d, h)
    lift = d ** (h - 1)
    counts = np.zeros(mod.m, dtype=np.int64)
    for u in range(d):
        counts[(u * u * lift) % mod.m] += 1
    return CyclotomicAmplitude.from_power_counts(mod, counts)


def reduce_form(spec: GaussSumSpec) -> ReducedForm:
    """Symmetric Gaussian elimination over Z/dZ, completing the square per pivot."""
    d = spec.d
    inv = lambda a: mod_inverse(a, d)
    A = spec.A.copy() % d
    beta = spec.beta.copy() % d
    const = 0
    live = list(range(spec.m))
    pivots = []
    while live:
        # prefer a nonzero diagonal pivot
        pidx = next((i for i in live if A[i, i] % d), None)
        if pidx is None:
            pair = next(
                ((i, j) for i in live for j in live if i != j and A[i, j] % d), None
            )
            if pair is None:
                break  # fully degenerate: only linear parts remain
            i, j = pair
            # congruence substitution x = S y with S = I + E_{ji} turns the
            # off-diagonal A_ij into a diagonal entry 2*A_ij (d odd, so nonzero)
            S = np.eye(spec.m, dtype=np.int64)
            S[j, i] = 1
            A = (S.T @ A @ S) % d
            beta = (S.T @ beta) % d
            continue
        a = int(A[pidx, pidx] % d)
        others = [j for j in live if j != pidx]
        arow = A[pidx, others] % d
        ia = inv(a)
        inv2 = inv(2)
        if others:
            A[np.ix_(others, others)] = (
                A[np.ix_(others, others)] - ia * np.outer(arow, arow)
            ) % d
        beta_p = int(beta[pidx] % d)
        for idx, j in enumerate(others):
            beta[j] = (beta[j] - ia * beta_p * arow[idx]) % d
        const = (const - ia * inv2 * inv2 * beta_p * beta_p) % d
        pivots.append(a)
        live.remove(pidx)
        A[pidx, :] = 0
        A[:, pidx] = 0
    residual = [int(beta[i] % d) for i in live]
    return ReducedForm(pivots, residual, const, d, spec.h, spec.c)


def eval_closed(spec: GaussSumSpec) -> CyclotomicAmplitude:
    """Closed-form value via `reduce_form`; exactly equals `eval_brute`."""
    red = reduce_form(spec)
    mod = spec.modulus
    if red.provably_zero():
        return CyclotomicAmplitude.zero(mod)
    free = len(red.residual_beta)
    value = CyclotomicAmplitude.root_power(
        mod, (spec.c + spec.d ** (spec.h - 1) * red.const) % mod.m
    )
    g1 = unit_gauss_sum(spec.d, spec.h)
    sign = 1
    for a in red.pivots:
        value = value * g1
        sign *= legendre(a, spec.d)
    if sign < 0:
        value = value * (-1)
    if free:
        value = value * (spec.d**free)
    return value


def block_diag_spec(specs) -> GaussSumSpec:
    """Direct sum of independent specs (used to test multiplicativity)."""
    specs = list(specs)
    d, h = specs[0].d, specs[0].h
    m = sum(s.m for s in specs)
    A = np.zeros((m, m), dtype=np.int64)
    beta = np.zeros(m, dtype=np.int64)
    c = 0
    off = 0
    for s in specs:
        if (s.d, s.h) != (d, h):
            raise RingError("blocks must share d and h")
        A[off : off + s.m, off : off + s.m] = s.A
        beta[off : off + s.m] = s.beta
        c = (c + s.c) % d**h
        off += s.m
    return GaussSumSpec(m, A, beta, c, d, h)


def random_spec(m: int, d: int, rng, h: int = 1) -> GaussSumSpec:
    A = rng.integers(0, d, size=(m, m))
    A = (A + A.T) % d
    beta = rng.integers(0, d, size=m)
    c = int(rng.integers(0, d**h))
    return GaussSumSpec(m, A, beta, c, d, h)

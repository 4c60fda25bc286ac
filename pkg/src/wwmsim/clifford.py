"""Affine symplectic phase-space representations of CNOT-type Clifford gates.

Coordinates are ordered as (x_p1..x_pn, x_q1..x_qn); the symplectic form is
J = [[0, I], [-I, 0]] in that block ordering.  The controlled-not map between
control i and target j sends x_pj -> x_pj - x_pi and x_qi -> x_qi + x_qj,
leaving everything else fixed; composite sequences for the 3/6/12-qudit
reduced forms are stored as data files (one gate token per line) so they can
be diffed against their source rather than audited inside code.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .phasespace import PhasePoint, check_dense_cap
from .ring import ExactArray, Modulus, RingError


def symplectic_form(n: int, d: int) -> np.ndarray:
    J = np.zeros((2 * n, 2 * n), dtype=np.int64)
    J[:n, n:] = np.eye(n, dtype=np.int64)
    J[n:, :n] = -np.eye(n, dtype=np.int64) % d
    return J


def mat_inverse_mod(M: np.ndarray, d: int) -> np.ndarray:
    """Inverse of a matrix over Z/dZ (d prime) by Gauss-Jordan elimination."""
    M = np.asarray(M, dtype=np.int64) % d
    k = M.shape[0]
    aug = np.concatenate([M, np.eye(k, dtype=np.int64)], axis=1)
    row = 0
    for col in range(k):
        pivots = np.nonzero(aug[row:, col] % d)[0]
        if len(pivots) == 0:
            raise RingError("matrix is singular mod %d" % d)
        p = row + pivots[0]
        if p != row:
            aug[[row, p]] = aug[[p, row]]
        aug[row] = (aug[row] * pow(int(aug[row, col]), -1, d)) % d
        for r in range(k):
            if r != row and aug[r, col] % d:
                aug[r] = (aug[r] - aug[r, col] * aug[row]) % d
        row += 1
    return aug[:, k:] % d


@dataclass
class AffineSymplectic:
    """Pair (M, v): x -> Mx + v over Z/dZ on 2n phase-space coordinates."""

    n: int
    d: int
    M: np.ndarray
    v: np.ndarray = None

    def __post_init__(self):
        self.M = np.asarray(self.M, dtype=np.int64) % self.d
        if self.v is None:
            self.v = np.zeros(2 * self.n, dtype=np.int64)
        self.v = np.asarray(self.v, dtype=np.int64) % self.d
        if self.M.shape != (2 * self.n, 2 * self.n):
            raise ValueError(f"M must be {2*self.n}x{2*self.n}")

    def apply(self, x):
        vec = x.vector() if isinstance(x, PhasePoint) else np.asarray(x, dtype=np.int64)
        out = (self.M @ vec + self.v) % self.d
        return PhasePoint.from_vector(out) if isinstance(x, PhasePoint) else out

    def inverse(self) -> "AffineSymplectic":
        Minv = mat_inverse_mod(self.M, self.d)
        return AffineSymplectic(self.n, self.d, Minv, (-Minv @ self.v) % self.d)

    def is_symplectic(self) -> bool:
        J = symplectic_form(self.n, self.d)
        return bool(((self.M.T @ J @ self.M - J) % self.d == 0).all())

    def momentum_block(self) -> np.ndarray:
        return self.M[: self.n, : self.n]

    def position_block(self) -> np.ndarray:
        return self.M[self.n :, self.n :]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, AffineSymplectic)
            and self.n == other.n
            and self.d == other.d
            and (self.M % self.d == other.M % other.d).all()
            and (self.v % self.d == other.v % other.d).all()
        )


def identity_map(n: int, d: int) -> AffineSymplectic:
    return AffineSymplectic(n, d, np.eye(2 * n, dtype=np.int64))


def cnot_map(i: int, j: int, n: int, d: int, power: int = 1) -> AffineSymplectic:
    """Phase-space map of the controlled-not between control i and target j (1-based)."""
    if i == j:
        raise ValueError("control and target must differ")
    if not (1 <= i <= n and 1 <= j <= n):
        raise ValueError(f"qudit indices must lie in 1..{n}")
    M = np.eye(2 * n, dtype=np.int64)
    # momentum block rows: p_j -= p_i
    M[j - 1, i - 1] = (-power) % d
    # position block rows: q_i += q_j
    M[n + i - 1, n + j - 1] = power % d
    return AffineSymplectic(n, d, M % d)


def compose(seq) -> AffineSymplectic:
    """Map equal to applying seq left-to-right: (M, v) = (Mk..M1, Mk..M2 v1 + ...)."""
    seq = list(seq)
    if not seq:
        raise ValueError("need at least one map")
    first = seq[0]
    M = first.M.copy()
    v = first.v.copy()
    for g in seq[1:]:
        if g.n != first.n or g.d != first.d:
            raise ValueError("maps must share n and d")
        M = (g.M @ M) % first.d
        v = (g.M @ v + g.v) % first.d
    return AffineSymplectic(first.n, first.d, M, v)


@dataclass(frozen=True)
class GateToken:
    """One CNOT-power token `C i j pow` from a sequence data file."""

    control: int
    target: int
    power: int


def load_gate_list(name: str):
    text = resources.files("wwmsim.data").joinpath(name).read_text()
    gates = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        tok = line.split()
        if tok[0] != "C" or len(tok) != 4:
            raise ValueError(f"bad gate token line: {line!r}")
        gates.append(GateToken(int(tok[1]), int(tok[2]), int(tok[3])))
    return gates


CANNED_SEQUENCES = {
    "C3": ("gates_c3.txt", 3),
    "C6": ("gates_c6.txt", 6),
    "C12": ("gates_c12.txt", 12),
}

# The source lists each gate's variable substitution in reading order; applying
# those substitutions one after another composes the matrices in reading order
# as well (first gate leftmost), which is what reproduces the published
# transformed polynomials.  Resolved empirically against the two-/three-qudit
# fixtures; see tests.
SUBSTITUTION_ORDER = "as-written"


def canned_sequence(name: str, d: int = 3) -> AffineSymplectic:
    """Composite map for one of the named reduced-form sequences (C3, C6, C12)."""
    if name not in CANNED_SEQUENCES:
        raise KeyError(f"unknown canned sequence {name!r}; have {sorted(CANNED_SEQUENCES)}")
    fname, n = CANNED_SEQUENCES[name]
    gates = load_gate_list(fname)
    maps = [cnot_map(g.control, g.target, n, d, g.power) for g in gates]
    return substitution_composite(maps)


def substitution_composite(maps) -> AffineSymplectic:
    """Composite substitution matrix for maps applied as successive substitutions.

    Substituting x -> M1 x into a function, then x -> M2 x, yields f(M1 M2 x),
    so the net substitution matrix multiplies in reading order (first map
    leftmost) - the reverse of `compose`.
    """
    return compose(list(reversed(list(maps))))


def cnot_unitary(i: int, j: int, n: int, d: int, power: int = 1, exact: bool = False,
                 mod: Modulus | None = None):
    """Dense |q_i, q_j> -> |q_i, q_j + power*q_i> permutation unitary."""
    if i == j:
        raise ValueError("control and target must differ")
    check_dense_cap(n)
    dim = d**n
    from itertools import product as iproduct

    basis = np.array(list(iproduct(range(d), repeat=n)), dtype=np.int64)
    image = basis.copy()
    image[:, j - 1] = (image[:, j - 1] + power * image[:, i - 1]) % d
    rows = np.ravel_multi_index(image.T, (d,) * n)
    cols = np.arange(dim)
    if exact:
        mod = mod or Modulus(d, 1)
        coeffs = np.zeros((dim, dim, mod.m), dtype=np.int64)
        coeffs[rows, cols, 0] = 1
        return ExactArray(mod, coeffs)
    U = np.zeros((dim, dim), dtype=complex)
    U[rows, cols] = 1
    return U


def unitary_map(i: int, j: int, n: int, d: int, power: int = 1) -> AffineSymplectic:
    """Phase-space map K with U R(x) U^dag = R(Kx) for U = cnot_unitary(i, j).

    Heisenberg conjugation of the displacement labels gives q_j' = q_j + power*q_i
    and p_i' = p_i - power*p_j, i.e. the `cnot_map` with control and target
    swapped.
    """
    return cnot_map(j, i, n, d, power)


def random_cnot_product(n: int, d: int, length: int, rng) -> AffineSymplectic:
    maps = []
    for _ in range(length):
        i, j = rng.choice(n, size=2, replace=False) + 1
        power = int(rng.integers(1, d))
        maps.append(cnot_map(int(i), int(j), n, d, power))
    return compose(maps)

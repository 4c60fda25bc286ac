"""Generalized Pauli/Weyl operators, Wigner tables, and the dense oracle.

Conventions (fixed once, verified by tests):

* Phase points x = (x_p, x_q) with all momentum components first.
* X is the cyclic shift |q> -> |q+1>, Z the clock phase |q> -> w_d**q |q>.
* The Weyl (phase-point) operator is
  R(x) = d**-n * sum_{y_p,y_q} w_d**(y_q.x_p - y_p.x_q - inv2*y_p.y_q) Z**y_p X**y_q,
  which collapses entrywise to R[a,b] = w_d**((a-b).x_p) * [a+b = 2 x_q mod d].
  The sign of the (y, x) pairing is fixed so that the position marginal of a
  state lands at +x_q (sum_{x_p} W(x_p, x_q) = <x_q|rho|x_q>); the opposite
  pairing is the same operator at the reflected point -x.
* Weyl symbols are normalized as A(x) = d**-n Tr(R(x) A), so density-operator
  tables sum to exactly 1 and sum_x A(x) R(x) reconstructs A.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from itertools import product

import numpy as np

from .ring import CyclotomicAmplitude, ExactArray, Modulus, RingError, mod_inverse

DENSE_QUDIT_CAP = 6


class DenseCapError(RuntimeError):
    """Raised when a dense Hilbert-space operation exceeds the qudit cap."""


def check_dense_cap(n: int):
    if n > DENSE_QUDIT_CAP:
        raise DenseCapError(f"dense oracle is capped at {DENSE_QUDIT_CAP} qudits, got {n}")


@dataclass(frozen=True)
class PhasePoint:
    """A point of (Z/dZ)**2n, split into momentum and position halves."""

    xp: tuple
    xq: tuple

    def __post_init__(self):
        if len(self.xp) != len(self.xq):
            raise ValueError("momentum and position halves must have equal length")

    @property
    def n(self) -> int:
        return len(self.xp)

    def vector(self) -> np.ndarray:
        return np.array(self.xp + self.xq, dtype=np.int64)

    @classmethod
    def from_vector(cls, vec) -> "PhasePoint":
        vec = tuple(int(v) for v in vec)
        n = len(vec) // 2
        return cls(vec[:n], vec[n:])

    def qudit(self, i: int) -> "PhasePoint":
        """Single-qudit sub-point (i is 0-based)."""
        return PhasePoint((self.xp[i],), (self.xq[i],))


def all_phase_points(n: int, d: int):
    """Iterate phase points in row-major (xp_1..xp_n, xq_1..xq_n) order."""
    for comps in product(range(d), repeat=2 * n):
        yield PhasePoint(comps[:n], comps[n:])


def point_index(x: PhasePoint, d: int) -> int:
    return int(np.ravel_multi_index(x.vector(), (d,) * (2 * x.n)))


def _embed(mod: Modulus, e: int) -> int:
    """Exponent e of w_d as a power of the primitive m-th root."""
    return (e * mod.d ** (mod.h - 1)) % mod.m


def pauli_xz(d: int, exact: bool = False, mod: Modulus | None = None):
    """Generalized Pauli pair (X, Z) with ZX = w_d XZ."""
    if exact:
        mod = mod or Modulus(d, 1)
        shift = np.zeros((d, d, mod.m), dtype=np.int64)
        clock = np.zeros((d, d, mod.m), dtype=np.int64)
        for q in range(d):
            shift[(q + 1) % d, q, 0] = 1
            clock[q, q, _embed(mod, q)] = 1
        return ExactArray(mod, shift), ExactArray(mod, clock)
    w = np.exp(2j * np.pi / d)
    X = np.zeros((d, d), dtype=complex)
    Z = np.zeros((d, d), dtype=complex)
    for q in range(d):
        X[(q + 1) % d, q] = 1
        Z[q, q] = w**q
    return X, Z


def weyl_operator(x: PhasePoint, n: int, d: int, exact: bool = False, mod: Modulus | None = None):
    """Weyl operator R(x): Hermitian, self-inverse, unitary, trace 1."""
    check_dense_cap(n)
    dim = d**n
    basis = np.array(list(product(range(d), repeat=n)), dtype=np.int64)  # (dim, n)
    xp = np.array(x.xp, dtype=np.int64)
    xq = np.array(x.xq, dtype=np.int64)
    b = (2 * xq - basis) % d  # row index paired with column a
    phase = ((b - basis) @ xp) % d  # R[row, col] = w**((row-col).x_p)
    cols = np.arange(dim)
    rows = np.ravel_multi_index(b.T, (d,) * n)
    if exact:
        mod = mod or Modulus(d, 1)
        coeffs = np.zeros((dim, dim, mod.m), dtype=np.int64)
        coeffs[rows, cols, (phase * d ** (mod.h - 1)) % mod.m] = 1
        return ExactArray(mod, coeffs)
    out = np.zeros((dim, dim), dtype=complex)
    out[rows, cols] = np.exp(2j * np.pi * phase / d)
    return out


def magic_state_vector(k: int, d: int = 3, exact: bool = True, mod: Modulus | None = None):
    """|T>**k for qutrits: |T> = (|0> + w9|1> + w9**-1|2>)/sqrt(3)."""
    if d != 3:
        raise ValueError(f"magic-state phases are only defined here for d=3, got d={d}")
    check_dense_cap(k)
    phases = np.array([0, 1, 8], dtype=np.int64)
    basis = np.array(list(product(range(3), repeat=k)), dtype=np.int64)
    exponents = phases[basis].sum(axis=1) % 9
    if exact:
        mod = mod or Modulus(3, 2)
        if mod.m % 9 != 0:
            raise RingError("magic state needs a modulus divisible by 9")
        lift = mod.m // 9
        coeffs = np.zeros((3**k, mod.m), dtype=np.int64)
        coeffs[np.arange(3**k), (exponents * lift) % mod.m] = 1
        return ExactArray(mod, coeffs, scale=k)
    return np.exp(2j * np.pi * exponents / 9) / 3 ** (k / 2)


def density(state):
    """|v><v| in either mode."""
    if isinstance(state, ExactArray):
        return state.outer_conj()
    return np.outer(state, state.conj())


@dataclass
class WignerTable:
    """Real quasi-probability table over all d**2n phase points."""

    n: int
    d: int
    values: object  # ExactArray of shape (d**2n,) or float ndarray

    @property
    def exact(self) -> bool:
        return isinstance(self.values, ExactArray)

    def value(self, x: PhasePoint):
        i = point_index(x, self.d)
        if self.exact:
            return self.values.entry(i)
        return float(self.values[i])

    def total(self):
        if self.exact:
            m = self.values.mod.m
            return CyclotomicAmplitude(self.values.mod, self.values.coeffs.sum(axis=0), self.values.scale)
        return float(self.values.sum())

    def to_float(self) -> np.ndarray:
        if self.exact:
            vals = self.values.to_complex()
            return vals.real
        return np.asarray(self.values, dtype=float)

    def write_csv(self, path):
        n = self.n
        header = [f"xp_{i+1}" for i in range(n)] + [f"xq_{i+1}" for i in range(n)]
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            if self.exact:
                phi = self.values.mod.phi
                writer.writerow(header + [f"coeff_{j}" for j in range(phi)] + ["scale"])
                from .ring import reduce_power_vector

                canon = reduce_power_vector(self.values.coeffs, self.values.mod)
                for i, x in enumerate(all_phase_points(n, self.d)):
                    writer.writerow(list(x.xp) + list(x.xq) + list(canon[i]) + [self.values.scale])
            else:
                writer.writerow(header + ["value"])
                for i, x in enumerate(all_phase_points(n, self.d)):
                    writer.writerow(list(x.xp) + list(x.xq) + [repr(float(self.values[i]))])

    @classmethod
    def read_csv(cls, path, d: int = 3) -> "WignerTable":
        with open(path) as fh:
            rows = list(csv.reader(fh))
        header, data = rows[0], rows[1:]
        n = sum(1 for h in header if h.startswith("xp_"))
        if header[-1] == "scale":
            phi = len(header) - 2 * n - 1
            if phi == 6:
                mod = Modulus(3, 2)
            elif phi == 2:
                mod = Modulus(3, 1)
            else:
                raise RingError(f"unrecognized exact basis width {phi}")
            coeffs = np.zeros((d ** (2 * n), mod.m), dtype=np.int64)
            scale = int(data[0][-1])
            for row in data:
                x = PhasePoint(tuple(map(int, row[:n])), tuple(map(int, row[n : 2 * n])))
                coeffs[point_index(x, d), :phi] = [int(v) for v in row[2 * n : 2 * n + phi]]
            return cls(n, d, ExactArray(mod, coeffs, scale))
        values = np.zeros(d ** (2 * n))
        for row in data:
            x = PhasePoint(tuple(map(int, row[:n])), tuple(map(int, row[n : 2 * n])))
            values[point_index(x, d)] = float(row[-1])
        return cls(n, d, values)


def weyl_symbol(A, n: int, d: int, points=None) -> WignerTable:
    """Weyl symbol A(x) = d**-n Tr(R(x) A); Wigner function when A is a state.

    Uses the generalized-permutation structure of R(x), so each point costs
    d**n scalar operations.  ``points`` restricts evaluation (full table by
    default); restricted tables store zeros elsewhere.
    """
    check_dense_cap(n)
    dim = d**n
    exact = isinstance(A, ExactArray)
    if (A.shape if exact else A.shape) != (dim, dim):
        raise ValueError(f"operator has wrong shape for n={n}, d={d}")
    basis = np.array(list(product(range(d), repeat=n)), dtype=np.int64)
    a_idx = np.arange(dim)
    it = list(all_phase_points(n, d)) if points is None else list(points)
    if exact:
        mod = A.mod
        lift = d ** (mod.h - 1)
        out = np.zeros((d ** (2 * n), mod.m), dtype=np.int64)
        for x in it:
            xp = np.array(x.xp, dtype=np.int64)
            xq = np.array(x.xq, dtype=np.int64)
            b = (2 * xq - basis) % d
            b_idx = np.ravel_multi_index(b.T, (d,) * n)
            phase = (((b - basis) @ xp) % d) * lift  # exponent of w_m
            # Tr(R A) = sum_a R[b(a), a] * A[a, b(a)] with R-entry phase (b(a)-a).x_p
            entries = A.coeffs[a_idx, b_idx]
            rolled = np.zeros_like(entries)
            for e in range(mod.m):
                sel = phase % mod.m == e
                if sel.any():
                    rolled[sel] = np.roll(entries[sel], e, axis=-1)
            out[point_index(x, d)] = rolled.sum(axis=0)
        return WignerTable(n, d, ExactArray(mod, out, A.scale + 2 * n))
    out = np.zeros(d ** (2 * n), dtype=complex)
    for x in it:
        xp = np.array(x.xp, dtype=np.int64)
        xq = np.array(x.xq, dtype=np.int64)
        b = (2 * xq - basis) % d
        b_idx = np.ravel_multi_index(b.T, (d,) * n)
        phase = ((b - basis) @ xp) % d
        out[point_index(x, d)] = (np.exp(2j * np.pi * phase / d) * A[a_idx, b_idx]).sum() / dim
    if np.abs(out.imag).max() < 1e-12:
        out = out.real
    return WignerTable(n, d, out)


def reconstruct_from_symbol(table: WignerTable):
    """sum_x A(x) R(x); exact when the table is exact."""
    n, d = table.n, table.d
    check_dense_cap(n)
    dim = d**n
    if table.exact:
        mod = table.values.mod
        acc = ExactArray.zeros(mod, (dim, dim), scale=table.values.scale)
        for x in all_phase_points(n, d):
            r = weyl_operator(x, n, d, exact=True, mod=mod)
            acc = acc + r * table.values.entry(point_index(x, d))
        return acc
    acc = np.zeros((dim, dim), dtype=complex)
    for x in all_phase_points(n, d):
        acc += table.value(x) * weyl_operator(x, n, d)
    return acc


def single_qutrit_magic_wigner(exact: bool = True) -> WignerTable:
    """Wigner table of |T><T| (9 points), the building block for tensor oracles."""
    vec = magic_state_vector(1, 3, exact=exact)
    rho = density(vec)
    return weyl_symbol(rho, 1, 3)


def tensor_magic_wigner_value(x: PhasePoint, table1: WignerTable):
    """W_{T tensor k}(x) as a product of single-qutrit Wigner values."""
    acc = None
    for i in range(x.n):
        v = table1.value(x.qudit(i))
        acc = v if acc is None else acc * v
    return acc

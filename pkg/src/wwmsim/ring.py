"""Exact arithmetic over Z/mZ and over cyclotomic integer rings Z[w].

Everything downstream (Wigner tables, Gauss sums, magic-state polynomials)
is evaluated exactly in the ring of integers extended by a primitive
``d**h``-th root of unity ``w``, with an overall scale that is an integer
power of ``d**(1/2)``.  Floating point only appears at output boundaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np


class RingError(ValueError):
    """Raised for invalid ring operations (non-invertible element, modulus mismatch)."""


def mod_inverse(a: int, m: int) -> int:
    """Return b with a*b = 1 (mod m), 0 <= b < m.

    Raises RingError if gcd(a, m) != 1 rather than returning a wrong value.
    """
    a = a % m
    g = math.gcd(a, m)
    if g != 1:
        raise RingError(f"{a} is not invertible mod {m} (gcd {g})")
    return pow(a, -1, m)


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a|p) in {-1, 0, 1} for odd prime p."""
    a = a % p
    if a == 0:
        return 0
    s = pow(a, (p - 1) // 2, p)
    return 1 if s == 1 else -1


def logical_negation_delta(alpha: int, p: int) -> int:
    """Delta of logical negation: 1 iff alpha != 0 (mod p).

    Computed as delta((alpha**(p-1) - 1)**(p-1) mod p), the polynomial
    identity that expresses "is nonzero" over a prime field.
    """
    inner = (pow(alpha % p, p - 1, p) - 1) % p
    return 1 if pow(inner, p - 1, p) == 0 else 0


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in range(2, int(n**0.5) + 1):
        if n % q == 0:
            return False
    return True


@dataclass(frozen=True)
class Modulus:
    """Prime-power modulus m = d**h for an odd prime d."""

    d: int
    h: int = 1

    def __post_init__(self):
        if self.d < 3 or self.d % 2 == 0 or not _is_prime(self.d):
            raise RingError(f"d must be an odd prime, got {self.d}")
        if self.h < 1:
            raise RingError(f"h must be positive, got {self.h}")

    @property
    def m(self) -> int:
        return self.d**self.h

    @property
    def phi(self) -> int:
        """Degree of the cyclotomic polynomial of x**m - 1's primitive factor."""
        return self.d ** (self.h - 1) * (self.d - 1)


@lru_cache(maxsize=None)
def _reduction_table(d: int, h: int) -> np.ndarray:
    """Matrix mapping power-basis vectors (length m) to canonical ones (length phi).

    The m-th cyclotomic polynomial for m = d**h is 1 + x**s + ... + x**((d-1)s)
    with s = d**(h-1), so w**e for e >= phi reduces to -(w**(e-phi) + w**(e-phi+s)
    + ... ), applied repeatedly.
    """
    mod = Modulus(d, h)
    m, phi, s = mod.m, mod.phi, d ** (h - 1)
    table = np.zeros((m, phi), dtype=np.int64)
    for e in range(phi):
        table[e, e] = 1
    # Powers phi..m-1 reduce in a single step: e - phi + j*s < phi for all j <= d-2.
    for e in range(phi, m):
        for j in range(d - 1):
            table[e] -= table[e - phi + j * s]
    return table


def reduce_power_vector(vec: np.ndarray, mod: Modulus) -> np.ndarray:
    """Reduce a length-m power-basis integer vector to the canonical phi basis."""
    vec = np.asarray(vec, dtype=np.int64)
    if vec.shape[-1] != mod.m:
        raise RingError(f"expected power vector of length {mod.m}, got {vec.shape[-1]}")
    return vec @ _reduction_table(mod.d, mod.h)


class CyclotomicAmplitude:
    """Exact element c * d**(-s/2) of Z[w, 1/sqrt(d)], w = exp(2*pi*i/d**h).

    ``coeffs`` are canonical integer coordinates in the power basis
    w**0..w**(phi-1); ``scale`` is the integer s.  Canonical form divides out
    common factors of d from the coefficients (each lowers s by 2), so
    equality is plain field comparison.
    """

    __slots__ = ("mod", "coeffs", "scale")

    def __init__(self, mod: Modulus, coeffs, scale: int = 0, reduce: bool = True):
        self.mod = mod
        c = np.asarray(coeffs, dtype=np.int64)
        if reduce:
            if c.shape[-1] == mod.m:
                c = reduce_power_vector(c, mod)
            elif c.shape[-1] != mod.phi:
                raise RingError(f"bad coefficient length {c.shape[-1]}")
        if not c.any():
            scale = 0
        else:
            while scale != 0 and not (c % mod.d).any():
                c = c // mod.d
                scale -= 2
        self.coeffs = tuple(int(x) for x in c)
        self.scale = int(scale)

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, mod: Modulus) -> "CyclotomicAmplitude":
        return cls(mod, np.zeros(mod.phi, dtype=np.int64), reduce=False)

    @classmethod
    def from_int(cls, mod: Modulus, value: int, scale: int = 0) -> "CyclotomicAmplitude":
        vec = np.zeros(mod.m, dtype=np.int64)
        vec[0] = value
        return cls(mod, vec, scale)

    @classmethod
    def root_power(cls, mod: Modulus, e: int, scale: int = 0) -> "CyclotomicAmplitude":
        """w**e with an optional d**(-scale/2) prefactor."""
        vec = np.zeros(mod.m, dtype=np.int64)
        vec[e % mod.m] = 1
        return cls(mod, vec, scale)

    @classmethod
    def from_power_counts(cls, mod: Modulus, counts, scale: int = 0) -> "CyclotomicAmplitude":
        """Sum_j counts[j] * w**j from a length-m histogram of exponents."""
        return cls(mod, np.asarray(counts, dtype=np.int64), scale)

    # -- ring operations ----------------------------------------------------

    def _check(self, other: "CyclotomicAmplitude"):
        if self.mod != other.mod:
            raise RingError(f"modulus mismatch: {self.mod} vs {other.mod}")

    def __add__(self, other: "CyclotomicAmplitude") -> "CyclotomicAmplitude":
        self._check(other)
        a, b = self, other
        if a.is_zero():
            return b
        if b.is_zero():
            return a
        if (a.scale - b.scale) % 2 != 0:
            raise RingError("cannot add amplitudes whose scales differ by sqrt(d)")
        if a.scale < b.scale:
            a, b = b, a
        lift = self.mod.d ** ((a.scale - b.scale) // 2)
        c = np.array(a.coeffs, dtype=np.int64) + lift * np.array(b.coeffs, dtype=np.int64)
        return CyclotomicAmplitude(self.mod, c, a.scale, reduce=False)

    def __neg__(self) -> "CyclotomicAmplitude":
        return CyclotomicAmplitude(self.mod, -np.array(self.coeffs), self.scale, reduce=False)

    def __sub__(self, other: "CyclotomicAmplitude") -> "CyclotomicAmplitude":
        return self + (-other)

    def __mul__(self, other) -> "CyclotomicAmplitude":
        if isinstance(other, int):
            return CyclotomicAmplitude(
                self.mod, np.array(self.coeffs) * other, self.scale, reduce=False
            )
        self._check(other)
        m, phi = self.mod.m, self.mod.phi
        a = np.array(self.coeffs, dtype=np.int64)
        b = np.array(other.coeffs, dtype=np.int64)
        prod = np.zeros(m, dtype=np.int64)
        for i in range(phi):
            if a[i]:
                idx = (i + np.arange(phi)) % m
                np.add.at(prod, idx, a[i] * b)
        return CyclotomicAmplitude(self.mod, prod, self.scale + other.scale)

    __rmul__ = __mul__

    def conj(self) -> "CyclotomicAmplitude":
        m = self.mod.m
        vec = np.zeros(m, dtype=np.int64)
        for i, c in enumerate(self.coeffs):
            vec[(-i) % m] += c
        return CyclotomicAmplitude(self.mod, vec, self.scale)

    def rescale(self, delta: int) -> "CyclotomicAmplitude":
        """Multiply by d**(-delta/2)."""
        return CyclotomicAmplitude(self.mod, np.array(self.coeffs), self.scale + delta, reduce=False)

    def abs_squared(self) -> "CyclotomicAmplitude":
        return self * self.conj()

    # -- predicates / output -------------------------------------------------

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_real(self) -> bool:
        return self == self.conj()

    def to_complex(self) -> complex:
        m = self.mod.m
        w = np.exp(2j * np.pi * np.arange(self.mod.phi) / m)
        return complex(np.dot(self.coeffs, w) * self.mod.d ** (-self.scale / 2))

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = CyclotomicAmplitude.from_int(self.mod, other)
        if not isinstance(other, CyclotomicAmplitude):
            return NotImplemented
        return self.mod == other.mod and self.coeffs == other.coeffs and self.scale == other.scale

    def __hash__(self):
        return hash((self.mod, self.coeffs, self.scale))

    def __repr__(self):
        return f"CyclotomicAmplitude(m={self.mod.m}, coeffs={self.coeffs}, scale={self.scale})"


def cyclo_arith(a: CyclotomicAmplitude, b, op: str) -> CyclotomicAmplitude:
    """Dispatch {add, mul, conj, scale} on exact amplitudes.

    ``conj`` ignores b; ``scale`` interprets b as an integer power of
    d**(-1/2) to fold into a's prefactor.
    """
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "conj":
        return a.conj()
    if op == "scale":
        return a.rescale(int(b))
    raise RingError(f"unknown op {op!r}")


def cyclo_to_complex(a: CyclotomicAmplitude) -> complex:
    return a.to_complex()


class ExactArray:
    """Dense tensor of cyclotomic amplitudes sharing one scale.

    Stored as an int64 array of shape ``shape + (m,)`` of power-basis
    coefficients plus a single scale exponent; this keeps matrix products
    and traces exact while staying vectorized.
    """

    __slots__ = ("mod", "coeffs", "scale")

    def __init__(self, mod: Modulus, coeffs: np.ndarray, scale: int = 0):
        self.mod = mod
        self.coeffs = np.asarray(coeffs, dtype=np.int64)
        if self.coeffs.shape[-1] != mod.m:
            raise RingError("last axis must index the m power-basis coefficients")
        self.scale = int(scale)

    @property
    def shape(self):
        return self.coeffs.shape[:-1]

    @classmethod
    def zeros(cls, mod: Modulus, shape, scale: int = 0) -> "ExactArray":
        return cls(mod, np.zeros(tuple(shape) + (mod.m,), dtype=np.int64), scale)

    @classmethod
    def identity(cls, mod: Modulus, dim: int) -> "ExactArray":
        c = np.zeros((dim, dim, mod.m), dtype=np.int64)
        c[np.arange(dim), np.arange(dim), 0] = 1
        return cls(mod, c)

    @classmethod
    def from_phases(cls, mod: Modulus, exponents: np.ndarray, mask=None, scale: int = 0) -> "ExactArray":
        """Array of w**exponents (zeroed where mask is False)."""
        exponents = np.asarray(exponents) % mod.m
        c = np.zeros(exponents.shape + (mod.m,), dtype=np.int64)
        np.put_along_axis(c, exponents[..., None], 1, axis=-1)
        if mask is not None:
            c *= np.asarray(mask, dtype=np.int64)[..., None]
        return cls(mod, c, scale)

    def _check(self, other: "ExactArray"):
        if self.mod != other.mod:
            raise RingError("modulus mismatch")

    def _aligned(self, other: "ExactArray"):
        self._check(other)
        if (self.scale - other.scale) % 2 != 0:
            raise RingError("cannot add arrays whose scales differ by sqrt(d)")
        if self.scale >= other.scale:
            lift = self.mod.d ** ((self.scale - other.scale) // 2)
            return self.coeffs, lift * other.coeffs, self.scale
        lift = self.mod.d ** ((other.scale - self.scale) // 2)
        return lift * self.coeffs, other.coeffs, other.scale

    def __add__(self, other: "ExactArray") -> "ExactArray":
        a, b, s = self._aligned(other)
        return ExactArray(self.mod, a + b, s)

    def __sub__(self, other: "ExactArray") -> "ExactArray":
        a, b, s = self._aligned(other)
        return ExactArray(self.mod, a - b, s)

    def __mul__(self, other) -> "ExactArray":
        if isinstance(other, int):
            return ExactArray(self.mod, self.coeffs * other, self.scale)
        if isinstance(other, CyclotomicAmplitude):
            if other.mod != self.mod:
                raise RingError("modulus mismatch")
            m = self.mod.m
            out = np.zeros_like(self.coeffs)
            for e, c in enumerate(other.coeffs):
                if c:
                    out += c * np.roll(self.coeffs, e, axis=-1)
            return ExactArray(self.mod, out, self.scale + other.scale)
        return NotImplemented

    __rmul__ = __mul__

    def __matmul__(self, other: "ExactArray") -> "ExactArray":
        """Matrix (or matrix-vector) product with exact coefficients."""
        self._check(other)
        m = self.mod.m
        a, b = self.coeffs, other.coeffs
        vec = b.ndim == 2
        if vec:
            b = b[:, None, :]
        out = np.zeros((a.shape[0], b.shape[1], m), dtype=np.int64)
        for u in range(m):
            au = a[..., u]  # (i, k)
            if not au.any():
                continue
            out += np.einsum("ik,kjm->ijm", au, np.roll(b, u, axis=-1))
        if vec:
            out = out[:, 0, :]
        return ExactArray(self.mod, out, self.scale + other.scale)

    def kron(self, other: "ExactArray") -> "ExactArray":
        self._check(other)
        m = self.mod.m
        a, b = self.coeffs, other.coeffs
        if a.ndim == 2:  # vectors
            out = np.zeros((a.shape[0], b.shape[0], m), dtype=np.int64)
            for u in range(m):
                au = a[..., u]
                if not au.any():
                    continue
                out += np.einsum("i,jm->ijm", au, np.roll(b, u, axis=-1))
            out = out.reshape(a.shape[0] * b.shape[0], m)
        else:
            out = np.zeros((a.shape[0], b.shape[0], a.shape[1], b.shape[1], m), dtype=np.int64)
            for u in range(m):
                au = a[..., u]
                if not au.any():
                    continue
                out += np.einsum("ij,klm->ikjlm", au, np.roll(b, u, axis=-1))
            out = out.reshape(a.shape[0] * b.shape[0], a.shape[1] * b.shape[1], m)
        return ExactArray(self.mod, out, self.scale + other.scale)

    def dagger(self) -> "ExactArray":
        idx = (-np.arange(self.mod.m)) % self.mod.m
        c = self.coeffs[..., idx]
        if c.ndim == 3:
            c = c.transpose(1, 0, 2)
        return ExactArray(self.mod, c, self.scale)

    def trace_product(self, other: "ExactArray") -> CyclotomicAmplitude:
        """Tr(self @ other) without forming the product matrix."""
        self._check(other)
        m = self.mod.m
        out = np.zeros(m, dtype=np.int64)
        b = other.coeffs.transpose(1, 0, 2)  # b[j,i] -> aligned with a[i,j]
        for u in range(m):
            au = self.coeffs[..., u]
            if not au.any():
                continue
            out += np.einsum("ij,ijm->m", au, np.roll(b, u, axis=-1))
        return CyclotomicAmplitude(self.mod, out, self.scale + other.scale)

    def entry(self, *index) -> CyclotomicAmplitude:
        return CyclotomicAmplitude(self.mod, self.coeffs[index], self.scale)

    def outer_conj(self) -> "ExactArray":
        """|v><v| for a vector v."""
        m = self.mod.m
        conj = self.dagger().coeffs  # vector conj
        out = np.zeros((self.coeffs.shape[0], self.coeffs.shape[0], m), dtype=np.int64)
        for u in range(m):
            au = self.coeffs[..., u]
            if not au.any():
                continue
            out += np.einsum("i,jm->ijm", au, np.roll(conj, u, axis=-1))
        return ExactArray(self.mod, out, 2 * self.scale)

    def to_complex(self) -> np.ndarray:
        w = np.exp(2j * np.pi * np.arange(self.mod.m) / self.mod.m)
        return self.coeffs @ w * self.mod.d ** (-self.scale / 2)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExactArray):
            return NotImplemented
        a, b = self, other
        da = a.coeffs @ _reduction_table(a.mod.d, a.mod.h)
        db = b.coeffs @ _reduction_table(b.mod.d, b.mod.h)
        # Align scales (equal arrays must have equal scale parity).
        if (a.scale - b.scale) % 2 != 0:
            return bool((da == 0).all() and (db == 0).all())
        if a.scale >= b.scale:
            db = db * a.mod.d ** ((a.scale - b.scale) // 2)
        else:
            da = da * a.mod.d ** ((b.scale - a.scale) // 2)
        return a.mod == b.mod and bool((da == db).all())

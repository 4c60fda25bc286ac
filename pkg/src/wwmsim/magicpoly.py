"""Exponential-sum polynomial form of tensored magic-state Wigner functions.

The Wigner function of k tensored qutrit magic states is an exponential sum

    W(x) = 3**prefactor * sum_{y in (Z/3Z)^k} exp(2*pi*i * P(y, x) / 9)

for a degree-<=3 polynomial P over Z/9Z in intermediate variables y_1..y_k
and final variables (x_p, x_q).  Only two kinds of monomials occur: pure
cubes (any coefficient mod 9) and monomials with coefficient divisible by 3;
exactly this class is well defined as a function of residues mod 3 and is
closed under affine substitutions, which is what makes the CNOT-sequence
transforms exact term-level rewrites.

Variable ids are 0-based: y_i -> i, xp_i -> k+i, xq_i -> 2k+i.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from itertools import combinations, product

import numpy as np

from .clifford import AffineSymplectic, cnot_map, mat_inverse_mod
from .gauss import GaussSumSpec
from .phasespace import PhasePoint, single_qutrit_magic_wigner
from .ring import CyclotomicAmplitude, ExactArray, Modulus, RingError, mod_inverse

MOD9 = Modulus(3, 2)


class FixtureError(RuntimeError):
    """Raised when a stored reduced form fails to assemble or verify."""


def _canonical_terms(terms: dict) -> dict:
    """Unique normal form for polynomials viewed as functions on residues mod 3.

    Since 3*(v**3 - v) vanishes identically on Z/3Z points mod 9, the
    3-divisible part of any pure-cube coefficient is moved to the linear
    term; pure cubes keep coefficients in {1, 2}.  With that rewrite, two
    admissible polynomials are equal as functions iff their term dicts match.
    """
    staged = {}
    for mono, coeff in terms.items():
        key = tuple(sorted(mono))
        staged[key] = staged.get(key, 0) + coeff
    out = {}
    for mono, coeff in staged.items():
        c = coeff % 9
        if len(mono) == 3 and mono[0] == mono[1] == mono[2]:
            out[mono] = out.get(mono, 0) + c % 3
            out[(mono[0],)] = out.get((mono[0],), 0) + (c - c % 3)
        else:
            out[mono] = out.get(mono, 0) + c
    return {m: c % 9 for m, c in out.items() if c % 9}


def _validate_terms(terms: dict):
    for mono, coeff in terms.items():
        if len(mono) > 3:
            raise ValueError(f"monomial degree exceeds 3: {mono}")
        pure_cube = len(mono) == 3 and mono[0] == mono[1] == mono[2]
        if len(mono) == 0 or pure_cube or coeff % 3 == 0:
            continue
        raise ValueError(
            f"monomial {mono} with coefficient {coeff} is not well defined "
            "on residues mod 3 (needs pure cube or coefficient divisible by 3)"
        )


@dataclass
class ExponentialSumPoly:
    """P(y, x) mod 9 plus the power-of-3 prefactor of the outer sum."""

    k: int
    terms: dict
    prefactor: int

    def __post_init__(self):
        self.terms = _canonical_terms(self.terms)
        _validate_terms(self.terms)

    # -- variable helpers ----------------------------------------------------

    def y(self, i: int) -> int:
        return i - 1

    def xp(self, i: int) -> int:
        return self.k + i - 1

    def xq(self, i: int) -> int:
        return 2 * self.k + i - 1

    @property
    def nvars(self) -> int:
        return 3 * self.k

    def var_name(self, v: int) -> str:
        if v < self.k:
            return f"yq{v + 1}"
        if v < 2 * self.k:
            return f"xp{v - self.k + 1}"
        return f"xq{v - 2 * self.k + 1}"

    # -- algebra ---------------------------------------------------------------

    def __add__(self, other: "ExponentialSumPoly") -> "ExponentialSumPoly":
        if self.k != other.k or self.prefactor != other.prefactor:
            raise ValueError("can only add polynomials with matching k and prefactor")
        terms = dict(self.terms)
        for mono, c in other.terms.items():
            terms[mono] = terms.get(mono, 0) + c
        return ExponentialSumPoly(self.k, terms, self.prefactor)

    def diff_terms(self, other: "ExponentialSumPoly") -> dict:
        """Monomial -> (self coeff, other coeff) wherever they disagree."""
        out = {}
        for mono in set(self.terms) | set(other.terms):
            a, b = self.terms.get(mono, 0), other.terms.get(mono, 0)
            if a != b:
                out[mono] = (a, b)
        return out

    def rename(self) -> dict:
        return {mono: self.var_name for mono in self.terms}

    def pretty(self) -> str:
        bits = []
        for mono, c in sorted(self.terms.items()):
            names = []
            i = 0
            while i < len(mono):
                run = sum(1 for v in mono if v == mono[i])
                names.append(self.var_name(mono[i]) + (f"^{run}" if run > 1 else ""))
                i += run
            bits.append(f"{c} {' '.join(names)}" if names else str(c))
        return " + ".join(bits) if bits else "0"

    # -- substitution -----------------------------------------------------------

    def substitute(self, forms: dict) -> "ExponentialSumPoly":
        """Replace each variable v by an affine form ({var: coeff}, const).

        Variables absent from ``forms`` map to themselves.  Expansion is done
        over the integers and reduced mod 9 at the end, which is exact for the
        admissible monomial class.
        """
        out = {}
        for mono, coeff in self.terms.items():
            expanded = {(): coeff}
            for v in mono:
                lin, const = forms.get(v, ({v: 1}, 0))
                factor = dict(lin)
                acc = {}
                for emono, ecoeff in expanded.items():
                    for fvar, fcoeff in factor.items():
                        key = tuple(sorted(emono + (fvar,)))
                        acc[key] = acc.get(key, 0) + ecoeff * fcoeff
                    if const:
                        acc[emono] = acc.get(emono, 0) + ecoeff * const
                expanded = acc
            for emono, ecoeff in expanded.items():
                out[emono] = out.get(emono, 0) + ecoeff
        return ExponentialSumPoly(self.k, out, self.prefactor)

    # -- evaluation ---------------------------------------------------------------

    def _compiled(self):
        if not hasattr(self, "_groups"):
            groups = {}
            for mono, coeff in self.terms.items():
                groups.setdefault(len(mono), ([], []))
                groups[len(mono)][0].append(coeff)
                groups[len(mono)][1].append(mono)
            self._groups = {
                arity: (np.array(cs, dtype=np.int64), np.array(ms, dtype=np.int64).reshape(len(ms), arity))
                for arity, (cs, ms) in groups.items()
            }
        return self._groups

    def exponent(self, assign: np.ndarray) -> np.ndarray:
        """P evaluated mod 9 on assignment rows (..., 3k) of residues mod 3."""
        assign = np.asarray(assign, dtype=np.int64)
        out = np.zeros(assign.shape[:-1], dtype=np.int64)
        for arity, (coeffs, monos) in self._compiled().items():
            if arity == 0:
                out = out + coeffs.sum()
                continue
            vals = assign[..., monos]  # (..., nterms, arity)
            out = out + (vals.prod(axis=-1) * coeffs).sum(axis=-1)
        return out % 9

    def y_grid(self) -> np.ndarray:
        return np.array(list(product(range(3), repeat=self.k)), dtype=np.int64)

    def sum_exact(self, x) -> CyclotomicAmplitude:
        """prefactor * sum_y w9**P(y, x), exactly."""
        xvec = x.vector() if isinstance(x, PhasePoint) else np.asarray(x, dtype=np.int64)
        grid = self.y_grid()
        assign = np.concatenate([grid, np.broadcast_to(xvec, (len(grid), 2 * self.k))], axis=1)
        expo = self.exponent(assign)
        counts = np.bincount(expo, minlength=9)
        return CyclotomicAmplitude.from_power_counts(MOD9, counts, scale=-2 * self.prefactor)

    def sum_exact_many(self, X: np.ndarray, chunk: int = 2048) -> ExactArray:
        """Vectorized `sum_exact` over rows of X, returned as an exact array."""
        X = np.asarray(X, dtype=np.int64)
        grid = self.y_grid()
        ny = len(grid)
        counts = np.zeros((len(X), 9), dtype=np.int64)
        for lo in range(0, len(X), chunk):
            xs = X[lo : lo + chunk]
            expo = np.zeros((len(xs), ny), dtype=np.int64)
            for arity, (coeffs, monos) in self._compiled().items():
                if arity == 0:
                    expo += coeffs.sum()
                    continue
                for coeff, mono in zip(coeffs, monos):
                    yfac = np.ones(ny, dtype=np.int64)
                    xfac = np.ones(len(xs), dtype=np.int64)
                    for v in mono:
                        if v < self.k:
                            yfac = yfac * grid[:, v]
                        else:
                            xfac = xfac * xs[:, v - self.k]
                    expo += int(coeff) * xfac[:, None] * yfac[None, :]
            expo %= 9
            offs = np.arange(len(xs), dtype=np.int64)[:, None] * 9
            flat = np.bincount((offs + expo).ravel(), minlength=len(xs) * 9)
            counts[lo : lo + chunk] = flat.reshape(len(xs), 9)
        return ExactArray(MOD9, counts, scale=-2 * self.prefactor)


@dataclass(frozen=True)
class VariableClassification:
    """Partition of intermediate variables (1-based indices)."""

    cubic: tuple
    quadratic: tuple


def classify_variables(p: ExponentialSumPoly) -> VariableClassification:
    """Split y-variables into Gauss-summed (quadratic) and indexing (cubic) sets.

    The quadratic set is the largest subset Q of y-variables such that every
    monomial has joint degree <= 2 in Q and every monomial touching Q has
    coefficient divisible by 3 (so the residual sum over Q is a genuine
    quadratic Gauss sum mod 3 for any assignment of the rest).  Ties prefer
    higher variable indices, matching the published orderings.
    """
    k = p.k
    monos = [(mono, coeff) for mono, coeff in p.terms.items()]
    best = None
    for size in range(k, -1, -1):
        candidates = []
        for subset in combinations(range(k), size):
            qset = set(subset)
            ok = True
            for mono, coeff in monos:
                qdeg = sum(1 for v in mono if v in qset)
                if qdeg > 2 or (qdeg >= 1 and coeff % 3 != 0):
                    ok = False
                    break
            if ok:
                candidates.append(subset)
        if candidates:
            best = max(candidates)  # lexicographically largest index set
            break
    quadratic = tuple(i + 1 for i in best)
    cubic = tuple(i + 1 for i in range(k) if i + 1 not in quadratic)
    return VariableClassification(cubic=cubic, quadratic=quadratic)


def gauss_slice(p: ExponentialSumPoly, cubic_assignment, x,
                classification: VariableClassification | None = None) -> GaussSumSpec:
    """Residual quadratic Gauss sum over the quadratic variables.

    ``cubic_assignment`` lists values for the cubic variables in the order
    given by the classification.  Returns the (A, beta, c) data of
    sum over the quadratic variables, with A and beta mod 3 and the constant
    mod 9.
    """
    cls = classification or classify_variables(p)
    vals = list(cubic_assignment)
    if len(vals) != len(cls.cubic):
        raise ValueError(
            f"assignment covers {len(vals)} variables, need {len(cls.cubic)}"
        )
    fixed = {p.y(i): int(v) % 3 for i, v in zip(cls.cubic, vals)}
    xvec = x.vector() if isinstance(x, PhasePoint) else np.asarray(x, dtype=np.int64)
    for v in range(p.k, 3 * p.k):
        fixed[v] = int(xvec[v - p.k]) % 3
    qvars = [p.y(i) for i in cls.quadratic]
    qindex = {v: i for i, v in enumerate(qvars)}
    m = len(qvars)
    A = np.zeros((m, m), dtype=np.int64)
    beta = np.zeros(m, dtype=np.int64)
    const = 0
    inv2 = mod_inverse(2, 3)
    for mono, coeff in p.terms.items():
        qpart = [v for v in mono if v in qindex]
        scalar = coeff
        for v in mono:
            if v not in qindex:
                scalar *= fixed[v]
        if not qpart:
            const += scalar
        elif len(qpart) == 1:
            beta[qindex[qpart[0]]] += scalar // 3
        else:
            i, j = qindex[qpart[0]], qindex[qpart[1]]
            c3 = scalar // 3
            if i == j:
                A[i, i] += c3
            else:
                A[i, j] += c3 * inv2
                A[j, i] += c3 * inv2
        if len(qpart) >= 1 and scalar % 3 != 0:
            raise FixtureError("quadratic-variable term not divisible by 3")
    return GaussSumSpec(m, A % 3, beta % 3, const % 9, 3, 2)


# -- construction of the magic-state polynomials --------------------------------


def _parse_fixture(name: str) -> dict:
    """Parse a fixture data file into {record: (terms dict, denom)} with k inferred."""
    text = resources.files("wwmsim.data").joinpath(name).read_text()
    records = {}
    current = None
    kmax = 1
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if tok[0] == "record":
            denom = int(tok[tok.index("denom") + 1])
            current = tok[1]
            records[current] = ({}, denom)
            continue
        if current is None:
            raise FixtureError(f"term line before any record in {name}: {line!r}")
        coeff = int(tok[0])
        mono = []
        for t in tok[1:]:
            if "^" in t:
                var, power = t.split("^")
                power = int(power)
            else:
                var, power = t, 1
            kind = var[:2]
            idx = int(var[2:])
            kmax = max(kmax, idx)
            mono.append((kind, idx, power))
        records[current][0].setdefault(tuple(mono), 0)
        records[current][0][tuple(mono)] += coeff
    return records, kmax


def _record_to_terms(record, denom, k) -> dict:
    """Flatten a parsed record into mod-9 variable-id terms (x3 for denom 3)."""
    lift = 9 // denom
    out = {}
    for mono, coeff in record.items():
        ids = []
        for kind, idx, power in mono:
            base = {"yq": 0, "xp": k, "xq": 2 * k}[kind]
            ids.extend([base + idx - 1] * power)
        key = tuple(sorted(ids))
        out[key] = out.get(key, 0) + coeff * lift
    return out


def _poly_times_var(terms: dict, var: int) -> dict:
    return {tuple(sorted(mono + (var,))): c for mono, c in terms.items()}


@lru_cache(maxsize=None)
def _fixture_records(fname: str, k: int):
    records, _ = _parse_fixture(fname)
    return {name: _record_to_terms(rec, denom, k) for name, (rec, denom) in records.items()}


@lru_cache(maxsize=None)
def single_qutrit_poly() -> ExponentialSumPoly:
    """Recover P_1 by inverse-transforming the stored two-qudit reduced form.

    The stored form was produced from the tensor polynomial by the squared
    controlled-not substitution on both intermediate and final variables;
    undoing it must leave an additively separable polynomial (one copy per
    qudit), which is checked exactly, as is agreement with the dense Wigner
    oracle on all nine phase points.
    """
    recs = _fixture_records("fixture_a2.txt", 2)
    terms = dict(recs["outer"])
    for mono, c in recs["a2"].items():
        terms[mono] = terms.get(mono, 0) + c
    p2c = ExponentialSumPoly(2, terms, prefactor=-2)
    gate = cnot_map(1, 2, 2, 3, power=2)
    candidates = []
    for M in (gate.M, mat_inverse_mod(gate.M, 3)):
        L = M[2:, 2:]  # position block acts on the intermediate variables
        forms = {}
        for i in range(2):
            forms[i] = ({j: int(L[i, j]) for j in range(2) if L[i, j] % 3}, 0)
        for r in range(4):
            forms[2 + r] = ({2 + c: int(M[r, c]) for c in range(4) if M[r, c] % 3}, 0)
        candidates.append(p2c.substitute(forms))
    separable = []
    for cand in candidates:
        onsite = all(
            len({v % 2 for v in mono}) <= 1 for mono in cand.terms if mono
        )
        # variables of qudit 1 have ids {0, 2, 4}, qudit 2 {1, 3, 5}
        if onsite:
            separable.append(cand)
    if len(separable) != 1:
        raise FixtureError(
            f"expected exactly one separable inverse transform, got {len(separable)}"
        )
    p2 = separable[0]
    per_qudit = {0: {}, 1: {}}
    for mono, c in p2.terms.items():
        if not mono:
            raise FixtureError("unexpected constant term in tensor polynomial")
        qudit = mono[0] % 2
        local = tuple(sorted(v // 2 for v in mono))
        per_qudit[qudit][local] = per_qudit[qudit].get(local, 0) + c
    if per_qudit[0] != per_qudit[1]:
        raise FixtureError("two-qudit polynomial does not split into equal copies")
    # Per-qudit prefactor calibrated against the dense oracle: 3**-2, not the
    # 3**-1 suggested by the d**-1 expansion convention (see normalization
    # contract in phasespace).
    p1 = ExponentialSumPoly(1, per_qudit[0], prefactor=-2)
    oracle = single_qutrit_magic_wigner()
    for x in _all_points(1):
        if p1.sum_exact(x) != oracle.value(x):
            raise FixtureError("recovered single-qutrit polynomial fails the dense oracle")
    return p1


def _all_points(n: int):
    from .phasespace import all_phase_points

    return all_phase_points(n, 3)


def tensor_poly(k: int) -> ExponentialSumPoly:
    """Sum of k relabeled copies of the single-qutrit polynomial."""
    if k < 1:
        raise ValueError("k must be positive")
    p1 = single_qutrit_poly()
    terms = {}
    for i in range(k):
        offsets = {0: i, 1: k + i, 2: 2 * k + i}
        for mono, c in p1.terms.items():
            key = tuple(sorted(offsets[v] for v in mono))
            terms[key] = terms.get(key, 0) + c
    return ExponentialSumPoly(k, terms, prefactor=p1.prefactor * k)


def transform_poly(p: ExponentialSumPoly, y_map, x_map: AffineSymplectic) -> ExponentialSumPoly:
    """Substitute y -> L y + b_y and x -> M x + b_x into P.

    ``y_map`` may be a k x k matrix (offset zero) or an AffineSymplectic whose
    position block and position offset are used.  Both maps must be invertible
    mod 3 so the substitution permutes the summation domain.
    """
    k = p.k
    if isinstance(y_map, AffineSymplectic):
        L = y_map.position_block()
        by = y_map.v[y_map.n :]
    else:
        L = np.asarray(y_map, dtype=np.int64) % 3
        by = np.zeros(k, dtype=np.int64)
    M = x_map.M
    bx = x_map.v
    mat_inverse_mod(L, 3)
    mat_inverse_mod(M, 3)
    if L.shape != (k, k) or M.shape != (2 * k, 2 * k):
        raise ValueError("map shapes do not match the polynomial's variable count")
    forms = {}
    for i in range(k):
        forms[i] = ({j: int(L[i, j]) for j in range(k) if L[i, j] % 3}, int(by[i]))
    for r in range(2 * k):
        forms[k + r] = (
            {k + c: int(M[r, c]) for c in range(2 * k) if M[r, c] % 3},
            int(bx[r]),
        )
    return p.substitute(forms)

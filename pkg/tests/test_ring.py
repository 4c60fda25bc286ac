import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wwmsim.ring import (
    CyclotomicAmplitude,
    ExactArray,
    Modulus,
    RingError,
    cyclo_arith,
    cyclo_to_complex,
    legendre,
    logical_negation_delta,
    mod_inverse,
    reduce_power_vector,
)

M9 = Modulus(3, 2)
M3 = Modulus(3, 1)


def amp(vec, scale=0, mod=M9):
    v = np.zeros(mod.m, dtype=np.int64)
    for i, c in enumerate(vec):
        v[i] = c
    return CyclotomicAmplitude(mod, v, scale)


class TestModInverse:
    def test_examples(self):
        assert mod_inverse(2, 3) == 2
        assert mod_inverse(1, 9) == 1
        # scan oracle: unique b in 0..8 with 4b = 1 mod 9
        expected = [b for b in range(9) if (4 * b) % 9 == 1]
        assert expected == [7]
        assert mod_inverse(4, 9) == 7

    def test_exhaustive_small_moduli(self):
        for m in range(2, 82):
            for a in range(1, m):
                import math

                if math.gcd(a, m) == 1:
                    assert (mod_inverse(a, m) * a) % m == 1
                else:
                    with pytest.raises(RingError):
                        mod_inverse(a, m)


class TestLogicalNegationDelta:
    def test_examples(self):
        assert logical_negation_delta(0, 3) == 0
        assert logical_negation_delta(1, 3) == 1
        assert logical_negation_delta(2, 3) == 1

    @pytest.mark.parametrize("p", [3, 5, 7])
    def test_matches_nonzero_indicator(self, p):
        for alpha in range(p):
            assert logical_negation_delta(alpha, p) == (1 if alpha % p else 0)


class TestCyclotomic:
    def test_root_power_order(self):
        one = CyclotomicAmplitude.root_power(M9, 9)
        assert one == CyclotomicAmplitude.from_int(M9, 1)

    def test_omega6_reduction(self):
        # w^6 = -1 - w^3 after reduction by x^6 + x^3 + 1
        w6 = CyclotomicAmplitude.root_power(M9, 6)
        assert w6 == amp([-1, 0, 0, -1])

    def test_norm_example(self):
        a = amp([1, 0, 0, 2])  # 1 + 2 w^3, w^3 a primitive cube root
        assert a.abs_squared() == CyclotomicAmplitude.from_int(M9, 3)

    def test_to_complex(self):
        assert cyclo_to_complex(CyclotomicAmplitude.from_int(M9, 1)) == pytest.approx(1.0)
        w = CyclotomicAmplitude.root_power(M9, 1)
        assert cyclo_to_complex(w) == pytest.approx(
            np.cos(2 * np.pi / 9) + 1j * np.sin(2 * np.pi / 9), abs=1e-12
        )
        a = amp([1, 0, 0, 2])
        assert cyclo_to_complex(a) == pytest.approx(1j * np.sqrt(3), abs=1e-12)

    def test_scale_normalization(self):
        # 3 * 3^(-2/2) == 1
        a = CyclotomicAmplitude.from_int(M9, 3, scale=2)
        assert a == CyclotomicAmplitude.from_int(M9, 1)
        # sqrt-scale mismatch cannot be added
        with pytest.raises(RingError):
            CyclotomicAmplitude.from_int(M9, 1, scale=1) + CyclotomicAmplitude.from_int(M9, 1)

    def test_modulus_mismatch(self):
        with pytest.raises(RingError):
            cyclo_arith(CyclotomicAmplitude.from_int(M9, 1), CyclotomicAmplitude.from_int(M3, 1), "add")

    def test_arith_dispatch(self):
        a = CyclotomicAmplitude.root_power(M9, 2)
        b = CyclotomicAmplitude.root_power(M9, 7)
        assert cyclo_arith(a, b, "mul") == CyclotomicAmplitude.from_int(M9, 1)
        assert cyclo_arith(a, None, "conj") == b
        assert cyclo_arith(a, 2, "scale").scale == 2

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.integers(-20, 20), min_size=9, max_size=9))
    def test_reduction_idempotent(self, vec):
        mod = M9
        reduced = reduce_power_vector(np.array(vec), mod)
        lifted = np.zeros(mod.m, dtype=np.int64)
        lifted[: mod.phi] = reduced
        assert (reduce_power_vector(lifted, mod) == reduced).all()

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.integers(-9, 9), min_size=9, max_size=9))
    def test_abs_squared_real_nonneg(self, vec):
        a = CyclotomicAmplitude(M9, np.array(vec))
        sq = a.abs_squared()
        assert sq.is_real()
        val = sq.to_complex()
        assert abs(val.imag) < 1e-12
        assert val.real >= -1e-12

    @settings(max_examples=60, deadline=None)
    @given(
        st.lists(st.integers(-9, 9), min_size=9, max_size=9),
        st.lists(st.integers(-9, 9), min_size=9, max_size=9),
    )
    def test_mul_matches_complex(self, u, v):
        a, b = CyclotomicAmplitude(M9, np.array(u)), CyclotomicAmplitude(M9, np.array(v))
        got = (a * b).to_complex()
        want = a.to_complex() * b.to_complex()
        assert got == pytest.approx(want, abs=1e-9)


class TestLegendre:
    def test_small(self):
        assert [legendre(a, 3) for a in range(3)] == [0, 1, -1]
        squares5 = {(x * x) % 5 for x in range(1, 5)}
        for a in range(1, 5):
            assert legendre(a, 5) == (1 if a in squares5 else -1)


class TestExactArray:
    def test_matmul_matches_complex(self):
        rng = np.random.default_rng(0)
        a = ExactArray(M9, rng.integers(-3, 4, size=(4, 4, 9)))
        b = ExactArray(M9, rng.integers(-3, 4, size=(4, 4, 9)))
        got = (a @ b).to_complex()
        want = a.to_complex() @ b.to_complex()
        assert np.allclose(got, want, atol=1e-9)

    def test_kron_and_trace(self):
        rng = np.random.default_rng(1)
        a = ExactArray(M9, rng.integers(-2, 3, size=(2, 2, 9)))
        b = ExactArray(M9, rng.integers(-2, 3, size=(3, 3, 9)))
        got = a.kron(b).to_complex()
        want = np.kron(a.to_complex(), b.to_complex())
        assert np.allclose(got, want, atol=1e-9)
        tr = a.trace_product(a.dagger()).to_complex()
        want_tr = np.trace(a.to_complex() @ a.to_complex().conj().T)
        assert tr == pytest.approx(want_tr, abs=1e-9)

    def test_vector_ops(self):
        rng = np.random.default_rng(2)
        v = ExactArray(M9, rng.integers(-2, 3, size=(3, 9)), scale=1)
        rho = v.outer_conj()
        want = np.outer(v.to_complex(), v.to_complex().conj())
        assert np.allclose(rho.to_complex(), want, atol=1e-9)

from itertools import product

import numpy as np
import pytest

from wwmsim.phasespace import (
    DenseCapError,
    PhasePoint,
    WignerTable,
    all_phase_points,
    check_dense_cap,
    density,
    magic_state_vector,
    pauli_xz,
    point_index,
    reconstruct_from_symbol,
    single_qutrit_magic_wigner,
    tensor_magic_wigner_value,
    weyl_operator,
    weyl_symbol,
)
from wwmsim.ring import CyclotomicAmplitude, ExactArray, Modulus, mod_inverse

M9 = Modulus(3, 2)


def weyl_defining_sum(x: PhasePoint, n: int, d: int) -> np.ndarray:
    """Independent oracle: the Weyl operator built from its defining double sum."""
    X, Z = pauli_xz(d)
    Xp = [np.linalg.matrix_power(X, e) for e in range(d)]
    Zp = [np.linalg.matrix_power(Z, e) for e in range(d)]
    inv2 = mod_inverse(2, d)
    dim = d**n
    R = np.zeros((dim, dim), dtype=complex)
    for yp in product(range(d), repeat=n):
        for yq in product(range(d), repeat=n):
            phase = (
                np.dot(yq, x.xp) - np.dot(yp, x.xq) - inv2 * np.dot(yp, yq)
            ) % d
            op = np.eye(1)
            for i in range(n):
                op = np.kron(op, Zp[yp[i]] @ Xp[yq[i]])
            R = R + np.exp(2j * np.pi * phase / d) * op
    return R / dim


class TestPauli:
    def test_orders_and_commutation(self):
        X, Z = pauli_xz(3)
        assert np.allclose(np.linalg.matrix_power(X, 3), np.eye(3))
        assert np.allclose(np.linalg.matrix_power(Z, 3), np.eye(3))
        w = np.exp(2j * np.pi / 3)
        assert np.allclose(Z @ X, w * X @ Z)
        assert abs(np.trace(Z)) < 1e-12

    def test_exact_matches_float(self):
        Xe, Ze = pauli_xz(3, exact=True, mod=M9)
        X, Z = pauli_xz(3)
        assert np.allclose(Xe.to_complex(), X)
        assert np.allclose(Ze.to_complex(), Z)


class TestWeylOperator:
    @pytest.mark.parametrize("x", list(all_phase_points(1, 3)))
    def test_hermitian_self_inverse_unitary_trace(self, x):
        R = weyl_operator(x, 1, 3)
        assert np.allclose(R, R.conj().T)
        assert np.allclose(R @ R, np.eye(3))
        assert np.trace(R) == pytest.approx(1.0 + 0j, abs=1e-12)

    def test_matches_defining_sum(self):
        for x in all_phase_points(1, 3):
            assert np.allclose(weyl_operator(x, 1, 3), weyl_defining_sum(x, 1, 3))
        rng = np.random.default_rng(3)
        for _ in range(10):
            comps = rng.integers(0, 3, size=4)
            x = PhasePoint.from_vector(comps)
            assert np.allclose(weyl_operator(x, 2, 3), weyl_defining_sum(x, 2, 3))

    def test_defining_sum_d5(self):
        x = PhasePoint((2,), (4,))
        assert np.allclose(weyl_operator(x, 1, 5), weyl_defining_sum(x, 1, 5))

    def test_tensor_factorization(self):
        for a in all_phase_points(1, 3):
            for b in list(all_phase_points(1, 3))[::4]:
                joint = PhasePoint(a.xp + b.xp, a.xq + b.xq)
                R = weyl_operator(joint, 2, 3)
                assert np.allclose(R, np.kron(weyl_operator(a, 1, 3), weyl_operator(b, 1, 3)))

    def test_exact_mode(self):
        for x in all_phase_points(1, 3):
            Re = weyl_operator(x, 1, 3, exact=True, mod=M9)
            assert np.allclose(Re.to_complex(), weyl_operator(x, 1, 3))

    def test_cap(self):
        with pytest.raises(DenseCapError):
            check_dense_cap(7)
        with pytest.raises(DenseCapError):
            weyl_operator(PhasePoint((0,) * 7, (0,) * 7), 7, 3)


class TestWeylSymbol:
    def test_ground_state_table(self):
        rho = np.zeros((3, 3), dtype=complex)
        rho[0, 0] = 1
        table = weyl_symbol(rho, 1, 3)
        for x in all_phase_points(1, 3):
            want = 1 / 3 if x.xq == (0,) else 0.0
            assert table.value(x) == pytest.approx(want, abs=1e-12)

    def test_maximally_mixed(self):
        table = weyl_symbol(np.eye(3, dtype=complex) / 3, 1, 3)
        assert np.allclose(table.to_float(), 1 / 9)

    def test_density_normalization(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            v = rng.normal(size=9) + 1j * rng.normal(size=9)
            v /= np.linalg.norm(v)
            table = weyl_symbol(np.outer(v, v.conj()), 2, 3)
            assert table.total() == pytest.approx(1.0, abs=1e-10)

    def test_exact_magic_state_table(self):
        table = single_qutrit_magic_wigner()
        assert table.exact
        assert table.total() == CyclotomicAmplitude.from_int(M9, 1)
        floats = table.to_float()
        # at least one strictly negative entry for the magic state
        assert floats.min() < -1e-3
        # reality of every entry
        for x in all_phase_points(1, 3):
            assert table.value(x).is_real()
        # sanity against float pipeline
        vec = magic_state_vector(1, 3, exact=False)
        ftab = weyl_symbol(np.outer(vec, vec.conj()), 1, 3)
        assert np.allclose(floats, ftab.to_float(), atol=1e-12)

    def test_completeness_random_hermitian(self):
        rng = np.random.default_rng(5)
        for n in (1, 2):
            dim = 3**n
            for _ in range(25):
                b = ExactArray(M9, rng.integers(-2, 3, size=(dim, dim, 9)))
                a = b + b.dagger()
                table = weyl_symbol(a, n, 3)
                assert reconstruct_from_symbol(table) == a
                # reality of the symbol of a Hermitian operator, exactly
                for i in range(dim * dim):
                    assert table.values.entry(i).is_real()

    def test_marginal_property(self):
        rng = np.random.default_rng(6)
        for n in (1, 2):
            dim = 3**n
            for _ in range(10):
                v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
                v /= np.linalg.norm(v)
                rho = np.outer(v, v.conj())
                table = weyl_symbol(rho, n, 3)
                vals = table.to_float().reshape((3,) * (2 * n))
                marg = vals.sum(axis=tuple(range(n)))
                for q in product(range(3), repeat=n):
                    want = rho[np.ravel_multi_index(q, (3,) * n)][
                        np.ravel_multi_index(q, (3,) * n)
                    ].real
                    assert marg[q] == pytest.approx(want, abs=1e-10)


class TestMagicState:
    def test_single_amplitudes(self):
        v = magic_state_vector(1, 3, exact=True)
        amps = v.to_complex()
        w9 = np.exp(2j * np.pi / 9)
        want = np.array([1, w9, w9**-1]) / np.sqrt(3)
        assert np.allclose(amps, want, atol=1e-12)
        assert np.linalg.norm(amps) == pytest.approx(1.0, abs=1e-12)

    def test_tensor_structure(self):
        v1 = magic_state_vector(1, 3, exact=False)
        v2 = magic_state_vector(2, 3, exact=False)
        assert np.allclose(v2, np.kron(v1, v1), atol=1e-12)

    def test_unsupported_dimension(self):
        with pytest.raises(ValueError):
            magic_state_vector(1, 5)

    def test_tensor_wigner_value(self):
        base = single_qutrit_magic_wigner()
        rho3 = density(magic_state_vector(3, 3, exact=True))
        x = PhasePoint((1, 0, 2), (2, 1, 0))
        direct = weyl_symbol(rho3, 3, 3, points=[x]).value(x)
        assert tensor_magic_wigner_value(x, base) == direct


class TestCsv:
    def test_exact_roundtrip(self, tmp_path):
        table = single_qutrit_magic_wigner()
        path = tmp_path / "t.csv"
        table.write_csv(path)
        back = WignerTable.read_csv(path)
        assert back.exact
        for x in all_phase_points(1, 3):
            assert back.value(x) == table.value(x)

    def test_float_roundtrip(self, tmp_path):
        rng = np.random.default_rng(7)
        v = rng.normal(size=3) + 1j * rng.normal(size=3)
        v /= np.linalg.norm(v)
        table = weyl_symbol(np.outer(v, v.conj()), 1, 3)
        path = tmp_path / "t.csv"
        table.write_csv(path)
        back = WignerTable.read_csv(path)
        assert np.allclose(back.values, table.values, atol=0)


def test_point_index_roundtrip():
    pts = list(all_phase_points(2, 3))
    for i, x in enumerate(pts):
        assert point_index(x, 3) == i

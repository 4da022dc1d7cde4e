import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from toeplitz_ergodic import (DimensionError, conj_symbol, constant_symbol, cos_shift_symbol,
                              dump_matrix, flip_matrix, hankel, hankel_product,
                              hankel_product_stable, infinite_product_block, load_matrix,
                              mode_symbol, parse_symbol, projection, reflect_symbol, toeplitz,
                              vertiii_sq)
from toeplitz_ergodic.symbols import product_symbol


class TestToeplitz:
    def test_cos_tridiagonal(self, cos2):
        assert np.array_equal(toeplitz(cos2, 3), [[0, 1, 0], [1, 0, 1], [0, 1, 0]])

    def test_constant_identity(self):
        assert np.array_equal(toeplitz(constant_symbol(2.5), 4), 2.5 * np.eye(4))

    def test_shift_is_lower(self, shift):
        assert np.array_equal(toeplitz(shift, 3), np.eye(3, k=-1))

    def test_rectangular(self, zeta2):
        A = toeplitz(zeta2, 3, 5)
        assert A.shape == (3, 5)
        assert A[2, 0] == 0.25 and A[0, 4] == 0

    @pytest.mark.parametrize("n", [0, -1, 2.5])
    def test_bad_size(self, cos2, n):
        with pytest.raises(DimensionError):
            toeplitz(cos2, n)

    @pytest.mark.parametrize("spec", ["const:3", "mode:1", "cos2", "cos2shift:4", "zeta2"])
    def test_hermitian_transpose_exact(self, spec):
        f = parse_symbol(spec)
        for n in (1, 4, 17):
            assert np.array_equal(toeplitz(f, n).conj().T, toeplitz(conj_symbol(f), n))

    @given(st.integers(1, 24), st.floats(-5, 5))
    def test_real_symbol_gives_symmetric(self, n, a):
        A = toeplitz(cos_shift_symbol(a), n)
        assert np.array_equal(A, A.T)


class TestHankel:
    def test_cos(self, cos2):
        E = np.zeros((3, 3))
        E[0, 0] = 1
        assert np.array_equal(hankel(cos2, 3), E)

    def test_shift(self, shift):
        assert np.array_equal(hankel(shift, 2), [[1, 0], [0, 0]])

    def test_zeta2_indexing(self, zeta2):
        H = hankel(zeta2, 5)
        i, j = np.meshgrid(np.arange(1, 6), np.arange(1, 6), indexing="ij")
        assert np.allclose(H, 1.0 / (i + j - 1) ** 2, rtol=0, atol=0)

    def test_hs_norm_monotone_and_bounded(self, zeta2):
        bound = vertiii_sq(zeta2).upper
        hs = [np.sum(np.abs(hankel(zeta2, n)) ** 2) for n in (1, 2, 4, 8, 16, 64)]
        assert hs == sorted(hs)
        assert hs[-1] <= bound

    def test_reflect_kills_analytic_part(self, shift):
        assert not np.any(hankel(reflect_symbol(shift), 6))


class TestProjections:
    def test_flip_small(self):
        assert np.array_equal(flip_matrix(1), [[1]])
        assert np.array_equal(flip_matrix(2), [[0, 1], [1, 0]])

    def test_flip_involution(self):
        Q = flip_matrix(5)
        assert np.array_equal(Q @ Q, np.eye(5))

    def test_projection(self):
        P = projection(2, 4)
        assert np.array_equal(P, np.diag([1, 1, 0, 0]))


class TestProducts:
    def test_shift_adjoint_identity(self, shift):
        # S* S = I for the infinite shift
        blk = infinite_product_block(conj_symbol(shift), shift, 3)
        assert np.array_equal(blk.matrix, np.eye(3))
        assert blk.residual == 0.0

    def test_identity_constant(self):
        one = constant_symbol(1)
        assert np.array_equal(infinite_product_block(one, one, 4).matrix, np.eye(4))

    def test_cos_square_block(self, cos2):
        blk = infinite_product_block(cos2, cos2, 2).matrix
        assert blk[0, 0] == 1
        assert np.array_equal(blk, [[1, 0], [0, 2]])

    def test_finite_vs_infinite_shift(self, shift):
        # S S* = I - e1 e1^T in the infinite setting
        blk = infinite_product_block(shift, conj_symbol(shift), 4).matrix
        assert np.array_equal(blk, np.diag([0, 1, 1, 1]))

    def test_hankel_product_needs_inner_for_dense(self, zeta2):
        with pytest.raises(DimensionError):
            hankel_product(zeta2, zeta2, 3)

    def test_hankel_product_stable_converges(self, zeta2):
        blk = hankel_product_stable(zeta2, zeta2, 3)
        # (1,1) entry: sum_l l^-4 = pi^4 / 90
        assert blk.matrix[0, 0] == pytest.approx(np.pi**4 / 90, abs=1e-11)

    def test_infinite_block_zeta2(self, zeta2):
        # entry (1,1) of T(conj f) T(f) is sum_{l>=1} |f_l|^2 = zeta(4)
        blk = infinite_product_block(conj_symbol(zeta2), zeta2, 4).matrix
        assert blk[0, 0] == pytest.approx(np.pi**4 / 90, abs=1e-10)

    def test_product_identity_finite_banded(self, cos2):
        g = cos_shift_symbol(1.5)
        for n in range(1, 17):
            lhs = toeplitz(product_symbol(cos2, g), n) - toeplitz(cos2, n) @ toeplitz(g, n)
            Q = flip_matrix(n)
            rhs = (hankel_product(cos2, reflect_symbol(g), n)
                   + Q @ hankel_product(reflect_symbol(cos2), g, n) @ Q)
            assert np.linalg.norm(lhs - rhs) <= 1e-10

    def test_product_identity_infinite_modes(self):
        f, g = mode_symbol(-2), mode_symbol(3)
        N = 6
        lhs = toeplitz(product_symbol(f, g), N) - infinite_product_block(f, g, N).matrix
        rhs = hankel_product(f, reflect_symbol(g), N)
        assert np.array_equal(lhs, rhs)


class TestGolden:
    @pytest.mark.parametrize("fname,build", [
        ("toeplitz_cos2shift4_6.txt", lambda: toeplitz(parse_symbol("cos2shift:4"), 6)),
        ("toeplitz_zeta2_5.txt", lambda: toeplitz(parse_symbol("zeta2"), 5)),
        ("hankel_zeta2_4.txt", lambda: hankel(parse_symbol("zeta2"), 4)),
        ("toeplitz_mode1_4.txt", lambda: toeplitz(parse_symbol("mode:1"), 4)),
        ("infinite_block_cos2_3.txt",
         lambda: infinite_product_block(parse_symbol("cos2"), parse_symbol("cos2"), 3).matrix),
    ])
    def test_matches_frozen(self, golden_dir, fname, build):
        expect = load_matrix(golden_dir / fname)
        got = build()
        assert got.shape == expect.shape
        assert np.max(np.abs(got - expect)) <= 1e-15

    def test_dump_format(self):
        text = dump_matrix(np.array([[1 + 2j, 0.1]]))
        assert text == "1 2\n1,2 0.10000000000000001,0\n"

    @given(st.integers(1, 5), st.integers(1, 5), st.integers(0, 2**31))
    def test_roundtrip(self, r, c, seed):
        rng = np.random.default_rng(seed)
        A = rng.standard_normal((r, c)) + 1j * rng.standard_normal((r, c))
        assert np.array_equal(load_matrix(dump_matrix(A)), A)

    def test_roundtrip_file(self, tmp_path, zeta2):
        A = toeplitz(zeta2, 7)
        dump_matrix(A, tmp_path / "m.txt")
        assert np.array_equal(load_matrix(tmp_path / "m.txt"), A)

    def test_bad_dump(self):
        with pytest.raises(DimensionError):
            load_matrix("2 2\n1,0 0,0\n")

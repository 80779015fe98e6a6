import numpy as np
import pytest
from hypothesis import given, strategies as st

from tridispec.applications import advdiff_build
from tridispec.errors import LengthMismatch, OracleNonConvergence, SizeCap
from tridispec.kernel import BoundaryParams
from tridispec.oracle import (assemble_dense, dense_eigenvalues, dense_eigenvalues_of,
                              inverse_iteration_residual, match_spectra)
from tridispec.spectrum import solve_spectrum


def random_hessenberg(rng, m):
    M = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    return np.triu(M, -1)


def random_tridiagonal(rng, m):
    v = lambda k: rng.standard_normal(k) + 1j * rng.standard_normal(k)
    return np.diag(v(m)) + np.diag(v(m - 1), 1) + np.diag(v(m - 1), -1)


class TestAssemble:
    def test_free_n2(self):
        M = assemble_dense(BoundaryParams(n=2)).entries
        assert np.array_equal(M, [[0, 1, 0], [1, 0, 1], [0, 1, 0]])

    def test_placement(self):
        M = assemble_dense(BoundaryParams(b0=1, b1=0.5, c0=-1, cm1=2, n=2)).entries
        assert np.array_equal(M, [[-1, 0.5, 0], [1, 0, 1], [0, -1, 1]])

    def test_advdiff_mixed_last_row(self):
        K, n = 1.0, 3
        sys = advdiff_build(K, n, "mixed")
        A = assemble_dense(sys.B.boundary).entries
        assert A[-1, -2] == pytest.approx(2 / (1 - K / n))
        # the stencil's last row has sub-diagonal 2 before scaling
        assert sys.dense()[-1, -2] == pytest.approx(2 * n * n)

    def test_size_cap(self):
        with pytest.raises(SizeCap):
            assemble_dense(BoundaryParams(n=2000))
        with pytest.raises(SizeCap):
            dense_eigenvalues(np.eye(5), cap=4)

    def test_rejects_non_hessenberg(self):
        with pytest.raises(ValueError):
            dense_eigenvalues(np.ones((4, 4)))


class TestEigenvalues:
    def test_free_5x5(self):
        ev = dense_eigenvalues_of(BoundaryParams(n=4))
        assert match_spectra(ev, 2 * np.cos(np.pi * np.arange(1, 6) / 6))[0] < 1e-10

    @pytest.mark.parametrize("c", [0.0, 3.5, -1 + 2j])
    def test_scaled_identity(self, c):
        assert np.allclose(dense_eigenvalues(c * np.eye(6, dtype=complex)), c, atol=0)

    def test_trace_30(self):
        M = random_hessenberg(np.random.default_rng(3), 30)
        ev = dense_eigenvalues(M)
        assert abs(ev.sum() - np.trace(M)) < 1e-8 * np.abs(M).sum(axis=1).max()

    def test_matches_numpy(self):
        M = random_hessenberg(np.random.default_rng(4), 40)
        assert match_spectra(dense_eigenvalues(M), np.linalg.eigvals(M))[0] < 1e-9

    def test_mp_precision(self):
        p = BoundaryParams(-1.5, -1, 0, 0, n=20)
        ev = dense_eigenvalues_of(p, precision="mp", dps=40)
        j = np.argmin(np.abs(ev - 2.5))
        # y = 1/2 + 1.364e-13 at n = 20
        y = 0.500000000000136424205267501366
        assert abs(ev[j] - (y + 1 / y)) < 1e-15

    def test_nonconvergence_reports_partial(self):
        M = random_hessenberg(np.random.default_rng(5), 12)
        with pytest.raises(OracleNonConvergence) as exc:
            dense_eigenvalues(M, maxit=0)
        assert isinstance(exc.value.partial, np.ndarray)

    def test_backward_error(self):
        M = assemble_dense(BoundaryParams(0.3, 0.2 + 0.1j, -0.4, 0.7, n=60))
        ev = dense_eigenvalues(M)
        assert max(inverse_iteration_residual(M, lam) for lam in ev[::7]) < 1e-10

    @given(st.integers(0, 10_000), st.integers(2, 50))
    def test_transpose(self, seed, m):
        M = random_tridiagonal(np.random.default_rng(seed), m)
        a, b = dense_eigenvalues(M), dense_eigenvalues(M.T)
        assert match_spectra(a, b)[0] < 1e-9 * np.abs(M).sum(axis=1).max()

    @given(st.integers(0, 10_000), st.integers(2, 50))
    def test_trace_and_determinant(self, seed, m):
        M = random_tridiagonal(np.random.default_rng(seed), m)
        ev = dense_eigenvalues(M)
        tr = np.trace(M)
        assert abs(ev.sum() - tr) <= 1e-7 * max(1.0, abs(tr), np.abs(ev).sum())
        sign, logdet = np.linalg.slogdet(M)
        det = sign * np.exp(logdet)
        assert abs(np.prod(ev) - det) <= 1e-7 * max(abs(det), 1e-300)


class TestMatch:
    def test_identical(self):
        a = np.array([1, 2j, -3 + 1j])
        mx, mean, perm = match_spectra(a, a[::-1])
        assert mx == 0 and mean == 0
        assert np.array_equal(a[::-1][perm], a)

    def test_perturbed(self):
        a = np.random.default_rng(0).standard_normal(10)
        mx, _, _ = match_spectra(a, a + 1e-9)
        assert mx == pytest.approx(1e-9, rel=1e-3)

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            match_spectra([1, 2], [1])

    def test_solver_one_special(self):
        p = BoundaryParams(-1.5, -1, 0, 0, n=50)
        assert match_spectra(solve_spectrum(p).eigenvalues, dense_eigenvalues_of(p))[0] < 1e-8

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dgff import cholesky, jacobi_eigen, psd_sqrt, solve_spd
from dgff.errors import (
    ConvergenceError,
    NotPositiveDefiniteError,
    NotPositiveSemidefiniteError,
    NotSymmetricError,
)
from dgff.linalg import as_symmetric, cholesky_solve


def random_symmetric(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, n))
    return (a + a.T) / 2


def random_psd(n, seed):
    rng = np.random.default_rng(seed)
    b = rng.normal(size=(n, n))
    return b @ b.T


class TestJacobi:
    def test_identity(self):
        w, v = jacobi_eigen(np.eye(3))
        np.testing.assert_array_equal(w, [1.0, 1.0, 1.0])

    def test_two_by_two_hand_values(self):
        w, v = jacobi_eigen(np.array([[2.0, -1.0], [-1.0, 2.0]]))
        np.testing.assert_allclose(w, [1.0, 3.0], atol=1e-12)
        s = 1 / math.sqrt(2)
        # eigenvectors up to sign
        assert min(np.abs(v[:, 0] - [s, s]).max(), np.abs(v[:, 0] + [s, s]).max()) < 1e-12
        assert min(np.abs(v[:, 1] - [s, -s]).max(), np.abs(v[:, 1] + [s, -s]).max()) < 1e-12

    def test_diagonal_sorted_ascending(self):
        w, _ = jacobi_eigen(np.diag([5.0, 2.0, 9.0]))
        np.testing.assert_array_equal(w, [2.0, 5.0, 9.0])

    @pytest.mark.parametrize("n,seed", [(5, 0), (20, 1), (50, 2)])
    def test_reconstruction_and_orthonormality(self, n, seed):
        a = random_symmetric(n, seed)
        w, v = jacobi_eigen(a)
        scale = np.linalg.norm(a)
        assert np.linalg.norm(v @ np.diag(w) @ v.T - a) <= 1e-10 * scale
        assert np.abs(v.T @ v - np.eye(n)).max() <= 1e-12
        # residual per pair
        assert np.abs(a @ v - v * w[None, :]).max() <= 1e-12 * max(scale, 1.0)

    @pytest.mark.parametrize("n,seed", [(8, 3), (33, 4)])
    def test_matches_lapack_eigenvalues(self, n, seed):
        a = random_symmetric(n, seed)
        w, _ = jacobi_eigen(a)
        np.testing.assert_allclose(w, np.linalg.eigvalsh(a), atol=1e-10 * np.linalg.norm(a))

    def test_deterministic_bit_identical(self):
        a = random_symmetric(17, 9)
        w1, v1 = jacobi_eigen(a)
        w2, v2 = jacobi_eigen(a)
        np.testing.assert_array_equal(w1, w2)
        np.testing.assert_array_equal(v1, v2)

    def test_no_convergence_error(self):
        with pytest.raises(ConvergenceError):
            jacobi_eigen(random_symmetric(12, 5), max_sweeps=1)

    def test_rejects_asymmetric(self):
        with pytest.raises(NotSymmetricError):
            jacobi_eigen(np.array([[1.0, 2.0], [0.0, 1.0]]))


class TestPsdSqrt:
    def test_diagonal(self):
        np.testing.assert_allclose(psd_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]), atol=1e-14)

    def test_scalar_two_thirds(self):
        s = psd_sqrt(np.array([[2.0 / 3.0]]))
        assert s[0, 0] == pytest.approx(0.816496580927726, abs=1e-12)

    def test_rank_one(self):
        v = np.array([1.0, 1.0])
        s = psd_sqrt(np.outer(v, v))
        np.testing.assert_allclose(s, np.outer(v, v) / math.sqrt(2), atol=1e-12)

    @pytest.mark.parametrize("n,seed", [(5, 0), (25, 1), (50, 2)])
    def test_square_reproduces(self, n, seed):
        a = random_psd(n, seed)
        s = psd_sqrt(a)
        np.testing.assert_array_equal(s, s.T)
        assert np.linalg.norm(s @ s - a) <= 1e-10 * np.linalg.norm(a)
        assert jacobi_eigen(s)[0][0] >= -1e-12 * np.linalg.norm(s)

    def test_rejects_negative_eigenvalue(self):
        with pytest.raises(NotPositiveSemidefiniteError):
            psd_sqrt(np.array([[1.0, 0.0], [0.0, -1.0]]))

    def test_clamps_tiny_negative(self):
        a = np.array([[1.0, 0.0], [0.0, -1e-15]])
        s = psd_sqrt(a)
        assert s[1, 1] == 0.0


class TestCholesky:
    def test_identity(self):
        np.testing.assert_array_equal(cholesky(np.eye(4)), np.eye(4))

    def test_hand_factor(self):
        low = cholesky(np.array([[4.0, 2.0], [2.0, 5.0]]))
        np.testing.assert_allclose(low, [[2.0, 0.0], [1.0, 2.0]], atol=1e-14)

    def test_indefinite_rejected(self):
        with pytest.raises(NotPositiveDefiniteError):
            cholesky(np.array([[1.0, 2.0], [2.0, 1.0]]))

    @pytest.mark.parametrize("n,seed", [(10, 0), (40, 1)])
    def test_factor_reproduces(self, n, seed):
        a = random_psd(n, seed) + n * np.eye(n)
        low = cholesky(a)
        assert np.abs(low @ low.T - a).max() <= 1e-12 * np.abs(a).max()
        assert np.diag(low).min() > 0


class TestSolve:
    def test_identity_solve(self):
        b = np.array([3.0, -1.0, 0.5])
        np.testing.assert_array_equal(solve_spd(np.eye(3), b), b)

    def test_hand_solution(self):
        x = solve_spd(np.array([[2.0, -1.0], [-1.0, 2.0]]), np.array([1.0, 0.0]))
        np.testing.assert_allclose(x, [2.0 / 3.0, 1.0 / 3.0], atol=1e-14)

    def test_zero_rhs(self):
        x = solve_spd(np.array([[2.0, -1.0], [-1.0, 2.0]]), np.zeros(2))
        np.testing.assert_array_equal(x, 0.0)

    def test_matrix_rhs_residual(self):
        a = random_psd(20, 7) + 20 * np.eye(20)
        b = np.random.default_rng(8).normal(size=(20, 6))
        x = solve_spd(a, b)
        resid = np.linalg.norm(a @ x - b)
        assert resid <= 1e-10 * (np.linalg.norm(a) * np.linalg.norm(x) + np.linalg.norm(b))

    def test_not_pd_propagates(self):
        with pytest.raises(NotPositiveDefiniteError):
            solve_spd(np.array([[0.0, 0.0], [0.0, 1.0]]), np.ones(2))

    def test_cholesky_solve_roundtrip(self):
        a = random_psd(9, 2) + 9 * np.eye(9)
        low = cholesky(a)
        x = cholesky_solve(low, np.eye(9))
        assert np.abs(a @ x - np.eye(9)).max() < 1e-12


def test_as_symmetric_mirrors_exactly():
    a = np.array([[1.0, 2.0 + 1e-12], [2.0, 3.0]])
    b = as_symmetric(a)
    np.testing.assert_array_equal(b, b.T)


@settings(deadline=None, max_examples=40)
@given(st.integers(1, 8), st.integers(0, 2 ** 31))
def test_psd_sqrt_property(n, seed):
    a = random_psd(n, seed)
    s = psd_sqrt(a)
    assert np.linalg.norm(s @ s - a) <= 1e-10 * max(np.linalg.norm(a), 1e-30)


@settings(deadline=None, max_examples=40)
@given(st.integers(2, 10), st.integers(0, 2 ** 31))
def test_jacobi_reconstruction_property(n, seed):
    a = random_symmetric(n, seed)
    w, v = jacobi_eigen(a)
    assert np.linalg.norm(v @ np.diag(w) @ v.T - a) <= 1e-10 * max(np.linalg.norm(a), 1e-30)
    assert np.all(np.diff(w) >= 0)

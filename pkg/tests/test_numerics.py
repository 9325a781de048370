"""
Testes para a álgebra Hermitiana (EVD, Cholesky, atualização de posto um)
"""

import pytest
import numpy as np
from pathlib import Path

import sys
# Adiciona o diretório raiz ao path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.analysis.loading import kantorovich_bound
from src.analysis.numerics import (
    cholesky_solve,
    hermitian_evd,
    rank_one_update,
    symmetrize,
    trace,
)
from src.core.errors import DimensionMismatchError, EigenDecompositionError, NotPositiveDefiniteError


def random_hermitian(rng, order):
    A = rng.standard_normal((order, order)) + 1j * rng.standard_normal((order, order))
    return symmetrize(A + A.conj().T)


def random_hpd(rng, order, ridge=0.1):
    A = rng.standard_normal((order, order)) + 1j * rng.standard_normal((order, order))
    return symmetrize(A @ A.conj().T + ridge * np.eye(order))


def characteristic_roots(A):
    """Raízes do polinômio característico via Faddeev-LeVerrier (só produtos e traços)."""
    n = A.shape[0]
    coefficients = [1.0 + 0j]
    M = np.zeros_like(A)
    for k in range(1, n + 1):
        M = A @ M + coefficients[-1] * np.eye(n)
        coefficients.append(-np.trace(A @ M) / k)
    return np.sort(np.real(np.roots(coefficients)))


class TestHermitianEvd:
    """Testes para hermitian_evd (LAPACK e Jacobi)."""

    @pytest.fixture
    def rng(self):
        return np.random.default_rng(1234)

    @pytest.mark.parametrize("method", ["lapack", "jacobi"])
    def test_two_by_two(self, method):
        """[[2,1],[1,2]] tem autovalores {1, 3}."""
        result = hermitian_evd(np.array([[2.0, 1.0], [1.0, 2.0]]), method=method)

        assert result.eigenvalues == pytest.approx([1.0, 3.0], abs=1e-12)
        assert result.lambda_min == pytest.approx(1.0)
        assert result.lambda_max == pytest.approx(3.0)
        assert result.condition_number == pytest.approx(3.0)

    @pytest.mark.parametrize("method", ["lapack", "jacobi"])
    def test_matches_characteristic_polynomial(self, rng, method):
        """Ordem <= 4: autovalores batem com as raízes do polinômio característico."""
        for _ in range(500):
            order = int(rng.integers(1, 5))
            A = random_hermitian(rng, order)
            expected = characteristic_roots(A)
            result = hermitian_evd(A, method=method)
            scale = max(1.0, float(np.max(np.abs(expected))))
            assert np.max(np.abs(result.eigenvalues - expected)) <= 1e-9 * scale

    @pytest.mark.parametrize("order", [8, 16, 32, 64])
    @pytest.mark.parametrize("method", ["lapack", "jacobi"])
    def test_reconstruction_residual(self, rng, method, order):
        """V diag(lambda) V^H reconstrói R e V é unitária."""
        R = random_hermitian(rng, order)
        result = hermitian_evd(R, method=method)

        residual = np.linalg.norm(result.reconstruct() - R, "fro") / np.linalg.norm(R, "fro")
        assert residual <= 1e-10
        V = result.eigenvectors
        assert np.max(np.abs(V.conj().T @ V - np.eye(order))) <= 1e-10
        assert np.all(np.diff(result.eigenvalues) >= 0)

    def test_jacobi_matches_lapack(self, rng):
        """Os dois motores concordam."""
        R = random_hpd(rng, 15)
        assert hermitian_evd(R, method="jacobi").eigenvalues == pytest.approx(
            hermitian_evd(R, method="lapack").eigenvalues, abs=1e-10)

    @pytest.mark.parametrize("method", ["lapack", "jacobi"])
    def test_shift_moves_every_eigenvalue(self, rng, method):
        """eig(R + mu I) = eig(R) + mu."""
        R = random_hermitian(rng, 15)
        base = hermitian_evd(R, method=method).eigenvalues
        scale = float(np.linalg.norm(R, "fro"))
        for mu in (0.1, 10.0, 1e3):
            shifted = hermitian_evd(R + mu * np.eye(15), method=method).eigenvalues
            assert np.max(np.abs(shifted - (base + mu))) <= 1e-10 * (scale + mu)

    def test_jacobi_sweep_cap(self, rng):
        """Sem sweeps disponíveis a falha carrega o resíduo."""
        with pytest.raises(EigenDecompositionError) as info:
            hermitian_evd(random_hermitian(rng, 6), method="jacobi", max_sweeps=0)

        assert info.value.residual > 0
        assert info.value.sweeps == 0

    def test_diagonal_input_needs_no_sweeps(self):
        """Matriz já diagonal sai direto, ordenada."""
        result = hermitian_evd(np.diag([3.0, 1.0, 2.0]), method="jacobi", max_sweeps=0)
        assert result.eigenvalues == pytest.approx([1.0, 2.0, 3.0])

    def test_non_square_rejected(self):
        with pytest.raises(DimensionMismatchError):
            hermitian_evd(np.ones((2, 3)))

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            hermitian_evd(np.array([[1.0, np.nan], [np.nan, 1.0]]))

    def test_unknown_engine(self):
        with pytest.raises(ValueError):
            hermitian_evd(np.eye(2), method="qr")


class TestCholeskySolve:
    """Testes para cholesky_solve."""

    @pytest.fixture
    def rng(self):
        return np.random.default_rng(99)

    def test_residual(self, rng):
        """R x = b verificado por multiplicação."""
        R = random_hpd(rng, 5)
        b = rng.standard_normal(5) + 1j * rng.standard_normal(5)
        x = cholesky_solve(R, b)

        assert np.linalg.norm(R @ x - b) <= 1e-10 * np.linalg.norm(b)

    def test_matrix_right_hand_side(self, rng):
        R = random_hpd(rng, 4)
        B = rng.standard_normal((4, 3)) + 0j
        assert np.allclose(R @ cholesky_solve(R, B), B, atol=1e-10)

    def test_indefinite_raises(self):
        """Pivô negativo vira NotPositiveDefiniteError."""
        with pytest.raises(NotPositiveDefiniteError):
            cholesky_solve(np.array([[1.0, 2.0], [2.0, 1.0]]), np.ones(2))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            cholesky_solve(np.eye(3), np.ones(2))


class TestRankOneUpdate:
    """Testes para rank_one_update e trace."""

    @pytest.fixture
    def rng(self):
        return np.random.default_rng(7)

    def test_sequential_equals_batch(self, rng):
        """L atualizações de 1/L igualam (1/L) sum y y^H."""
        order, window = 6, 9
        Y = rng.standard_normal((window, order)) + 1j * rng.standard_normal((window, order))
        R = np.zeros((order, order), dtype=complex)
        for y in Y:
            R = rank_one_update(R, y, 1.0 / window)
        batch = Y.T @ Y.conj() / window

        assert np.linalg.norm(R - batch) <= 1e-10 * np.linalg.norm(batch)

    def test_result_is_hermitian_and_input_untouched(self, rng):
        R = np.eye(3, dtype=complex)
        out = rank_one_update(R, np.array([1.0, 1j, -1.0]), 0.5)

        assert np.array_equal(R, np.eye(3))
        assert np.array_equal(out, out.conj().T)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            rank_one_update(np.eye(3), np.ones(4), 1.0)

    def test_trace_is_sum_of_eigenvalues(self, rng):
        R = random_hermitian(rng, 10)
        assert trace(R) == pytest.approx(float(np.sum(hermitian_evd(R).eigenvalues)), abs=1e-10)


class TestKantorovich:
    """Desigualdade de Kantorovich em pares (R, x) aleatórios."""

    def test_inequality_holds(self):
        rng = np.random.default_rng(2024)
        for _ in range(1000):
            order = int(rng.integers(2, 9))
            R = random_hpd(rng, order)
            x = rng.standard_normal(order) + 1j * rng.standard_normal(order)

            eigenvalues = np.linalg.eigvalsh(R)
            kappa = eigenvalues[-1] / eigenvalues[0]
            energy = float(np.real(np.vdot(x, x)))
            ratio = energy ** 2 / (float(np.real(np.vdot(x, R @ x))) *
                                   float(np.real(np.vdot(x, cholesky_solve(R, x)))))

            assert ratio >= kantorovich_bound(kappa) * (1.0 - 1e-12)
            assert ratio <= 1.0 + 1e-12


if __name__ == "__main__":
    pytest.main([__file__, "-v"])

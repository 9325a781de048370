"""
NUMERICS - Álgebra Hermitiana
EVD (LAPACK ou Jacobi cíclico complexo), solução por Cholesky e atualização de posto um
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from src.core.errors import (
    DimensionMismatchError,
    EigenDecompositionError,
    NotPositiveDefiniteError,
)

logger = logging.getLogger(__name__)

# Aliases de documentação: tudo é np.ndarray complexo por baixo
ComplexVector = np.ndarray
HermitianMatrix = np.ndarray

JACOBI_MAX_SWEEPS = 100
JACOBI_TOLERANCE = 1e-12


@dataclass(frozen=True)
class EigenDecomposition:
    """Autovalores ascendentes e autovetores (colunas de uma matriz unitária)."""
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def lambda_min(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def lambda_max(self) -> float:
        return float(self.eigenvalues[-1])

    @property
    def condition_number(self) -> float:
        """lambda_max / lambda_min; infinito se lambda_min <= 0."""
        if self.lambda_min <= 0:
            return math.inf
        return self.lambda_max / self.lambda_min

    def reconstruct(self) -> HermitianMatrix:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


@dataclass(frozen=True)
class SpectralBounds:
    """Limites [lower, upper] do espectro de uma matriz PSD."""
    lower: float
    upper: float

    def __post_init__(self):
        if not (0.0 <= self.lower <= self.upper):
            raise ValueError(f"Limites espectrais inválidos: lower={self.lower}, upper={self.upper}")


def as_vector(y, length: int = None) -> ComplexVector:
    """Converte para vetor complexo 1-D finito (opcionalmente com tamanho fixo)."""
    vec = np.asarray(y, dtype=complex)
    if vec.ndim != 1 or vec.size == 0:
        raise DimensionMismatchError(f"Esperado vetor 1-D não vazio, recebido shape {vec.shape}")
    if length is not None and vec.size != length:
        raise DimensionMismatchError(f"Vetor de tamanho {vec.size}, esperado {length}")
    if not np.all(np.isfinite(vec)):
        raise ValueError("Vetor com entradas não finitas")
    return vec


def as_square(R) -> HermitianMatrix:
    """Converte para matriz complexa quadrada (sem simetrizar)."""
    mat = np.asarray(R, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise DimensionMismatchError(f"Esperada matriz quadrada, recebido shape {mat.shape}")
    return mat


def symmetrize(R: HermitianMatrix) -> HermitianMatrix:
    """R <- (R + R^H)/2, diagonal estritamente real."""
    out = 0.5 * (R + R.conj().T)
    idx = np.diag_indices_from(out)
    out[idx] = out[idx].real
    return out


def frobenius_norm(R: HermitianMatrix) -> float:
    return float(np.linalg.norm(R, "fro"))


def trace(R: HermitianMatrix) -> float:
    """Soma (real) da diagonal."""
    return float(np.real(np.trace(as_square(R))))


def rank_one_update(R: HermitianMatrix, y: ComplexVector, scale: float) -> HermitianMatrix:
    """
    Retorna R + scale * y y^H, re-simetrizada.

    Args:
        R: Matriz Hermitiana M x M
        y: Snapshot de tamanho M
        scale: Peso real (+1/L para inserir, -1/L para remover)

    Returns:
        Nova matriz (R não é modificada)
    """
    R = as_square(R)
    y = np.asarray(y, dtype=complex)
    if y.ndim != 1 or y.size != R.shape[0]:
        raise DimensionMismatchError(f"Snapshot de tamanho {y.size} para matriz de ordem {R.shape[0]}")
    return symmetrize(R + scale * np.outer(y, y.conj()))


def cholesky_solve(R: HermitianMatrix, b: ComplexVector) -> ComplexVector:
    """
    Resolve R x = b com R Hermitiana positiva definida, sem inversão explícita.

    Raises:
        NotPositiveDefiniteError: pivô não positivo na fatoração
    """
    R = as_square(R)
    b = np.asarray(b, dtype=complex)
    if b.shape[0] != R.shape[0]:
        raise DimensionMismatchError(f"Lado direito de tamanho {b.shape[0]} para matriz de ordem {R.shape[0]}")
    if R.shape[0] == 0:
        return b.copy()
    try:
        factor = scipy.linalg.cho_factor(R, lower=True, check_finite=True)
    except np.linalg.LinAlgError as e:
        raise NotPositiveDefiniteError(f"Matriz não é positiva definida: {e}") from e
    return scipy.linalg.cho_solve(factor, b, check_finite=False)


def hermitian_evd(R: HermitianMatrix, method: str = "lapack",
                  max_sweeps: int = JACOBI_MAX_SWEEPS,
                  tolerance: float = JACOBI_TOLERANCE) -> EigenDecomposition:
    """
    Decomposição espectral completa de uma matriz Hermitiana.

    Args:
        R: Matriz Hermitiana
        method: "lapack" (numpy.linalg.eigh) ou "jacobi" (Jacobi cíclico complexo)
        max_sweeps: Limite de sweeps do Jacobi
        tolerance: Convergência quando ||off(A)||_F < tolerance * ||R||_F

    Returns:
        EigenDecomposition com autovalores ascendentes

    Raises:
        EigenDecompositionError: não convergiu (carrega o resíduo)
    """
    R = as_square(R)
    if not np.all(np.isfinite(R)):
        raise ValueError("Matriz com entradas não finitas")

    if method == "jacobi":
        return _jacobi_evd(R, max_sweeps, tolerance)
    if method != "lapack":
        raise ValueError(f"Método de EVD desconhecido: {method}")

    try:
        eigenvalues, eigenvectors = np.linalg.eigh(symmetrize(R))
    except np.linalg.LinAlgError as e:
        raise EigenDecompositionError(f"eigh não convergiu: {e}", residual=math.nan, sweeps=0) from e
    return EigenDecomposition(eigenvalues=eigenvalues, eigenvectors=eigenvectors)


def _off_diagonal_norm(A: np.ndarray) -> float:
    off = A - np.diag(np.diagonal(A))
    return float(np.linalg.norm(off, "fro"))


def _jacobi_evd(R: np.ndarray, max_sweeps: int, tolerance: float) -> EigenDecomposition:
    """Jacobi cíclico: cada rotação complexa zera A[p, q] (fase + rotação real)."""
    n = R.shape[0]
    A = symmetrize(R.copy())
    V = np.eye(n, dtype=complex)
    norm = frobenius_norm(A)

    if norm == 0.0 or n < 2:
        return EigenDecomposition(eigenvalues=np.real(np.diagonal(A)).copy(), eigenvectors=V)

    skip_below = 1e-18 * norm
    sweeps = 0
    off = _off_diagonal_norm(A)

    while off >= tolerance * norm:
        if sweeps >= max_sweeps:
            raise EigenDecompositionError("Jacobi não convergiu", residual=off / norm, sweeps=sweeps)

        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                magnitude = abs(apq)
                if magnitude <= skip_below:
                    continue
                phase = apq / magnitude
                theta = (A[q, q].real - A[p, p].real) / (2.0 * magnitude)
                t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c

                # A <- A J (colunas p, q)
                col_p = A[:, p].copy()
                col_q = A[:, q].copy()
                A[:, p] = c * col_p - s * np.conj(phase) * col_q
                A[:, q] = s * col_p + c * np.conj(phase) * col_q

                # A <- J^H A (linhas p, q)
                row_p = A[p, :].copy()
                row_q = A[q, :].copy()
                A[p, :] = c * row_p - s * phase * row_q
                A[q, :] = s * row_p + c * phase * row_q

                A[p, q] = 0.0
                A[q, p] = 0.0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real

                vec_p = V[:, p].copy()
                vec_q = V[:, q].copy()
                V[:, p] = c * vec_p - s * np.conj(phase) * vec_q
                V[:, q] = s * vec_p + c * np.conj(phase) * vec_q

        sweeps += 1
        off = _off_diagonal_norm(A)

    logger.debug(f"Jacobi convergiu em {sweeps} sweeps (ordem {n})")

    eigenvalues = np.real(np.diagonal(A))
    order = np.argsort(eigenvalues, kind="stable")
    return EigenDecomposition(eigenvalues=eigenvalues[order].copy(), eigenvectors=V[:, order])

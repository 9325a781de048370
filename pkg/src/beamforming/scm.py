"""
SCM - Rastreamento da Matriz de Correlação Espacial
Janela deslizante retangular (inserção/remoção de posto um) e os componentes da GSC (p_q, r_qn, R_n)
"""

import logging
import math

import numpy as np

from src.analysis.numerics import ComplexVector, HermitianMatrix, rank_one_update, symmetrize
from src.core.errors import DimensionMismatchError

logger = logging.getLogger(__name__)

ORTHONORMALITY_TOLERANCE = 1e-10


class _SnapshotRing:
    """Buffer circular de capacidade fixa L; slots ainda vazios valem zero."""

    def __init__(self, capacity: int, order: int):
        if capacity < 1:
            raise ValueError(f"Janela inválida: L={capacity}")
        self.capacity = capacity
        self.buffer = np.zeros((capacity, order), dtype=complex)
        self.count = 0
        self._head = 0

    def push(self, y: ComplexVector):
        """Insere y e retorna o snapshot removido (None enquanto não encheu)."""
        evicted = self.buffer[self._head].copy() if self.count >= self.capacity else None
        self.buffer[self._head] = y
        self._head = (self._head + 1) % self.capacity
        self.count += 1
        return evicted

    def window(self) -> np.ndarray:
        """Snapshots ativos, do mais antigo ao mais recente."""
        if self.count < self.capacity:
            return self.buffer[:self.count].copy()
        return np.roll(self.buffer, -self._head, axis=0)


class ScmTracker:
    """
    SCM por janela deslizante: R[i] = (1/L) sum_{l<L} y[i-l] y[i-l]^H.

    Antes de L snapshots a soma é dividida por L (janela com zeros), o que mantém
    o carregamento alto no início.
    """

    def __init__(self, window_length: int, order: int):
        """
        Inicializa o tracker.

        Args:
            window_length: L (snapshots)
            order: M (elementos)
        """
        self.window_length = window_length
        self.order = order
        self._ring = _SnapshotRing(window_length, order)
        self.current_scm: HermitianMatrix = np.zeros((order, order), dtype=complex)

    @property
    def pushes(self) -> int:
        return self._ring.count

    @property
    def warmup(self) -> bool:
        """True enquanto a janela ainda não está cheia."""
        return self._ring.count < self.window_length

    def push(self, y: ComplexVector) -> "ScmTracker":
        """Insere um snapshot (+1/L) e remove o mais antigo (-1/L) quando cheio."""
        y = np.asarray(y, dtype=complex)
        if y.shape != (self.order,):
            raise DimensionMismatchError(f"Snapshot de shape {y.shape}, esperado ({self.order},)")

        evicted = self._ring.push(y)
        scale = 1.0 / self.window_length
        self.current_scm = rank_one_update(self.current_scm, y, scale)
        if evicted is not None:
            self.current_scm = rank_one_update(self.current_scm, evicted, -scale)
        return self

    def batch_scm(self) -> HermitianMatrix:
        """Recalcula a SCM da janela atual do zero (oráculo de teste)."""
        window = self._ring.window()
        return symmetrize(window.T @ window.conj() / self.window_length)


class GscTracker:
    """
    Componentes da GSC rastreados a partir de z = T^H y = [sqrt(M) w_q^H y ; B^H y]:

        p_q  = w_q^H R w_q
        r_qn = B^H R w_q
        R_n  = B^H R B

    sem reconstruir a SCM completa. Mesma semântica de janela do ScmTracker.
    """

    def __init__(self, window_length: int, quiescent: ComplexVector, blocking: np.ndarray):
        """
        Inicializa o tracker.

        Args:
            window_length: L (snapshots)
            quiescent: w_q = d/M
            blocking: B, M x (M-1), com B^H d = 0 e B^H B = I

        Raises:
            ValueError: B não ortonormal
        """
        self.quiescent = np.asarray(quiescent, dtype=complex)
        self.blocking = np.asarray(blocking, dtype=complex)
        self.order = self.quiescent.size
        self.window_length = window_length

        if self.blocking.shape != (self.order, self.order - 1):
            raise DimensionMismatchError(
                f"Blocking matrix de shape {self.blocking.shape}, esperado ({self.order}, {self.order - 1})")
        gram = self.blocking.conj().T @ self.blocking
        if gram.size and np.max(np.abs(gram - np.eye(self.order - 1))) > ORTHONORMALITY_TOLERANCE:
            raise ValueError("Blocking matrix não é ortonormal (B^H B != I)")

        self._ring = _SnapshotRing(window_length, self.order)
        self.quiescent_power = 0.0
        self.cross_vector: ComplexVector = np.zeros(self.order - 1, dtype=complex)
        self.noise_matrix: HermitianMatrix = np.zeros((self.order - 1, self.order - 1), dtype=complex)

    @property
    def warmup(self) -> bool:
        return self._ring.count < self.window_length

    def transform(self, y: ComplexVector) -> ComplexVector:
        """z = [sqrt(M) w_q^H y ; B^H y]."""
        head = math.sqrt(self.order) * np.vdot(self.quiescent, y)
        return np.concatenate(([head], self.blocking.conj().T @ y))

    def push(self, y: ComplexVector) -> "GscTracker":
        y = np.asarray(y, dtype=complex)
        if y.shape != (self.order,):
            raise DimensionMismatchError(f"Snapshot de shape {y.shape}, esperado ({self.order},)")

        z = self.transform(y)
        evicted = self._ring.push(z)
        scale = 1.0 / self.window_length
        self._accumulate(z, scale)
        if evicted is not None:
            self._accumulate(evicted, -scale)
        return self

    def _accumulate(self, z: ComplexVector, scale: float) -> None:
        sqrt_m = math.sqrt(self.order)
        head = z[0] / sqrt_m          # w_q^H y
        blocked = z[1:]               # B^H y
        self.quiescent_power += scale * float(abs(head) ** 2)
        self.cross_vector = self.cross_vector + scale * blocked * np.conj(head)
        self.noise_matrix = rank_one_update(self.noise_matrix, blocked, scale)

    def assemble_partitioned(self) -> HermitianMatrix:
        """
        R~ = [[M p_q, sqrt(M) r_qn^H], [sqrt(M) r_qn, R_n]] = T^H R T.
        Mesmo espectro da SCM (T unitária).
        """
        m = self.order
        sqrt_m = math.sqrt(m)
        partitioned = np.empty((m, m), dtype=complex)
        partitioned[0, 0] = m * self.quiescent_power
        partitioned[0, 1:] = sqrt_m * self.cross_vector.conj()
        partitioned[1:, 0] = sqrt_m * self.cross_vector
        partitioned[1:, 1:] = self.noise_matrix
        return partitioned

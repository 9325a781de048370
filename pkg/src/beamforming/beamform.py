"""
BEAMFORM - Cálculo dos Pesos
MPDR carregado (forma direta), GSC carregada (forma particionada), escalonamento de Cox,
Capon onisciente e o delay-and-sum quiescente
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from src.analysis.numerics import ComplexVector, HermitianMatrix, as_vector, cholesky_solve
from src.beamforming.scm import GscTracker
from src.core.errors import InfeasibleConstraintError

logger = logging.getLogger(__name__)

STEERING_NORM_TOLERANCE = 1e-9
# Carregamento numérico do SMI/Cox: só garante a inversa sob deficiência de posto
SMI_NUMERICAL_FLOOR = 1e-10


def wng(w: ComplexVector, d: ComplexVector) -> float:
    """
    White Noise Gain |w^H d|^2 / ||w||^2 (linear).

    Raises:
        ValueError: vetor de pesos nulo
    """
    w = np.asarray(w, dtype=complex)
    energy = float(np.real(np.vdot(w, w)))
    if energy == 0.0:
        raise ValueError("WNG indefinido para vetor de pesos nulo")
    return float(abs(np.vdot(w, d)) ** 2) / energy


@dataclass(frozen=True)
class BeamformerWeights:
    """Vetor de pesos e seu WNG em relação ao steering vector alvo."""
    w: ComplexVector
    wng: float

    @classmethod
    def from_vector(cls, w: ComplexVector, d: ComplexVector) -> "BeamformerWeights":
        return cls(w=w, wng=wng(w, d))

    @property
    def wng_db(self) -> float:
        return 10.0 * math.log10(self.wng)

    def response(self, d: ComplexVector) -> complex:
        """w^H d."""
        return complex(np.vdot(self.w, d))

    def output(self, y: ComplexVector) -> complex:
        """w^H y."""
        return complex(np.vdot(self.w, y))


@dataclass(frozen=True)
class BlockingMatrix:
    """B (M x (M-1)) ortonormal ao steering vector, e o w_q = d/M que o acompanha."""
    B: np.ndarray
    quiescent: ComplexVector = field(repr=False)

    @property
    def unitary_transform(self) -> np.ndarray:
        """T = [sqrt(M) w_q, B]."""
        m = self.quiescent.size
        return np.column_stack([math.sqrt(m) * self.quiescent, self.B])


def _check_steering(d: ComplexVector) -> ComplexVector:
    d = as_vector(d)
    norm_sq = float(np.real(np.vdot(d, d)))
    if abs(norm_sq - d.size) > STEERING_NORM_TOLERANCE * d.size:
        raise ValueError(f"Steering vector com ||d||^2={norm_sq:.12g}, esperado M={d.size}")
    return d


def quiescent_weights(d: ComplexVector) -> BeamformerWeights:
    """Delay-and-sum w_q = d/M (WNG = M)."""
    d = _check_steering(d)
    return BeamformerWeights.from_vector(d / d.size, d)


def mpdr_weights(Q: HermitianMatrix, d: ComplexVector) -> BeamformerWeights:
    """
    MPDR: w = Q^{-1} d / (d^H Q^{-1} d), via Cholesky.

    Args:
        Q: Matriz positiva definida (SCM já carregada)
        d: Steering vector com ||d||^2 = M

    Raises:
        NotPositiveDefiniteError: Q singular / indefinida
    """
    d = _check_steering(d)
    x = cholesky_solve(Q, d)
    w = x / np.vdot(d, x)
    return BeamformerWeights.from_vector(w, d)


def blocking_matrix(d: ComplexVector) -> BlockingMatrix:
    """
    Blocking matrix por reflexão de Householder que leva d/sqrt(M) a e_1;
    as colunas 2..M do refletor formam B.
    """
    d = _check_steering(d)
    m = d.size
    u = d / math.sqrt(m)

    if m == 1:
        return BlockingMatrix(B=np.zeros((1, 0), dtype=complex), quiescent=d / m)

    # v = u + e^{i arg u_0} e_1 evita cancelamento
    phase = u[0] / abs(u[0]) if abs(u[0]) > 0 else 1.0
    v = u.copy()
    v[0] += phase
    reflector = np.eye(m, dtype=complex) - 2.0 * np.outer(v, v.conj()) / np.real(np.vdot(v, v))
    return BlockingMatrix(B=reflector[:, 1:], quiescent=d / m)


def gsc_weights(tracker: GscTracker, mu: float, w_q: ComplexVector, B: BlockingMatrix) -> BeamformerWeights:
    """
    GSC carregada: w_a = (R_n + mu I)^{-1} r_qn, w = w_q - B w_a.
    O carregamento entra só na matriz de ruído.
    """
    w_q = np.asarray(w_q, dtype=complex)
    d = w_q * w_q.size
    noise = tracker.noise_matrix + mu * np.eye(tracker.noise_matrix.shape[0])
    adaptive = cholesky_solve(noise, tracker.cross_vector)
    w = w_q - B.B @ adaptive
    return BeamformerWeights.from_vector(w, d)


def cox_scaled_weights(w_unloaded: BeamformerWeights, d: ComplexVector, wng_min: float) -> BeamformerWeights:
    """
    Escalonamento pós-inversão: w = w_q + w_perp; se ||w||^2 > 1/wng_min, encolhe
    w_perp por beta até ||w||^2 = 1/wng_min exatamente.

    Raises:
        InfeasibleConstraintError: wng_min > M
    """
    d = _check_steering(d)
    m = d.size
    if wng_min > m * (1.0 + 1e-12):
        raise InfeasibleConstraintError(f"Piso de WNG {wng_min:.6g} > M={m}")

    w = np.asarray(w_unloaded.w, dtype=complex)
    norm_limit = 1.0 / wng_min
    if float(np.real(np.vdot(w, w))) <= norm_limit:
        return w_unloaded

    w_q = d / m
    w_perp = w - d * (np.vdot(d, w) / m)
    perp_energy = float(np.real(np.vdot(w_perp, w_perp)))
    if perp_energy == 0.0:
        return BeamformerWeights.from_vector(w_q, d)
    beta = math.sqrt(max(0.0, norm_limit - 1.0 / m) / perp_energy)
    # w_q aqui assume w^H d = 1 (pesos sem distorção)
    return BeamformerWeights.from_vector(w_q + beta * w_perp, d)


def omniscient_capon(R_true: HermitianMatrix, d: ComplexVector) -> BeamformerWeights:
    """MPDR com a ECM verdadeira, sem carregamento (a ECM já inclui sigma_v^2 I)."""
    return mpdr_weights(R_true, d)


def smi_floor(R: HermitianMatrix) -> float:
    """mu numérico do SMI/Cox: 1e-10 * tr(R)/M."""
    m = R.shape[0]
    mean_power = float(np.real(np.trace(R))) / m
    return SMI_NUMERICAL_FLOOR * mean_power if mean_power > 0 else SMI_NUMERICAL_FLOOR ** 2

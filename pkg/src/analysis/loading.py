"""
LOADING - Carregamento Diagonal Adaptativo
Piso de WNG -> kappa_max (Kantorovich) e o mu mínimo por frame em três modos de estimativa
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Any

import numpy as np

from src.analysis.numerics import (
    HermitianMatrix,
    SpectralBounds,
    as_square,
    hermitian_evd,
)
from src.core.errors import DimensionMismatchError, InfeasibleConstraintError, InvalidPsdError

logger = logging.getLogger(__name__)

# Piso absoluto de mu para a janela toda nula (abaixo de qualquer potência física)
ABSOLUTE_LOADING_FLOOR = 1e-12
PSD_DIAGONAL_TOLERANCE = 1e-12
# Folga (dB) acima de 10log10(M) ainda tratada como o próprio teto
WNG_CEILING_TOLERANCE_DB = 1e-9


class LoadingMode(Enum):
    """Modos de estimativa dos extremos do espectro."""
    TRACE = "trace"            # O(M)
    GERSHGORIN = "gershgorin"  # O(M^2)
    EXACT_EVD = "evd"          # O(M^3)


def db_to_linear(value_db: float) -> float:
    return 10.0 ** (value_db / 10.0)


def linear_to_db(value: float) -> float:
    return 10.0 * math.log10(value)


def kantorovich_bound(kappa: float) -> float:
    """Lado direito da desigualdade de Kantorovich: 4k/(k+1)^2."""
    return 4.0 * kappa / (kappa + 1.0) ** 2


def kappa_max_from_wng(wng_min: float, array_size: int) -> float:
    """
    Maior número de condição que ainda garante WNG >= wng_min.

    Args:
        wng_min: Piso de WNG (linear), em [1, M]
        array_size: Número de elementos M

    Returns:
        kappa_max = (2A - 1) + 2 sqrt(A(A - 1)), com A = M / wng_min

    Raises:
        InfeasibleConstraintError: wng_min fora de [1, M]
    """
    if array_size < 1:
        raise InfeasibleConstraintError(f"Array inválido: M={array_size}")
    if not (1.0 <= wng_min <= array_size):
        raise InfeasibleConstraintError(
            f"Piso de WNG {wng_min:.6g} fora de [1, {array_size}] (M={array_size})")

    gain_limit = array_size / wng_min
    return (2.0 * gain_limit - 1.0) + 2.0 * math.sqrt(gain_limit * (gain_limit - 1.0))


@dataclass(frozen=True)
class WngConstraint:
    """Piso de WNG (linear) e o kappa_max derivado."""
    wng_min: float
    array_size: int
    kappa_max: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kappa_max", kappa_max_from_wng(self.wng_min, self.array_size))

    @classmethod
    def from_db(cls, wng_min_db: float, array_size: int) -> "WngConstraint":
        wng_min = db_to_linear(wng_min_db)
        # teto 10log10(M) com a mesma folga aceita pela configuração
        if abs(wng_min_db - linear_to_db(array_size)) <= WNG_CEILING_TOLERANCE_DB:
            wng_min = float(array_size)
        return cls(wng_min=wng_min, array_size=array_size)

    @property
    def wng_min_db(self) -> float:
        return linear_to_db(self.wng_min)

    @property
    def gain_limit(self) -> float:
        return self.array_size / self.wng_min


@dataclass(frozen=True)
class LoadingDecision:
    """Registro por frame do carregamento aplicado."""
    mode: LoadingMode
    bounds: SpectralBounds
    kappa_unloaded: float
    mu: float
    kappa_loaded_bound: float


def required_loading(bounds: SpectralBounds, kappa_max: float) -> float:
    """
    mu mínimo tal que (upper + mu)/(lower + mu) <= kappa_max.

    Raises:
        InfeasibleConstraintError: kappa_max = 1 com espectro espalhado (mu infinito)
    """
    if kappa_max < 1.0:
        raise InfeasibleConstraintError(f"kappa_max={kappa_max} < 1")
    if kappa_max == 1.0:
        if bounds.upper > bounds.lower:
            raise InfeasibleConstraintError(
                "kappa_max = 1 exige carregamento infinito; relaxe wng_min ou use o beamformer quiescente")
        return 0.0
    return max(0.0, (bounds.upper - kappa_max * bounds.lower) / (kappa_max - 1.0))


def bounds_trace(R: HermitianMatrix) -> SpectralBounds:
    """
    Limite O(M): lambda_max <= Tr(R), lambda_min assumido 0 (pior caso de deficiência).
    Lê apenas a diagonal.

    Raises:
        InvalidPsdError: diagonal negativa além da tolerância
    """
    diagonal = np.real(np.diagonal(R))
    scale = float(np.sum(np.abs(diagonal)))
    if diagonal.size and float(np.min(diagonal)) < -PSD_DIAGONAL_TOLERANCE * max(scale, 1.0):
        raise InvalidPsdError(f"Diagonal negativa em matriz PSD: min={np.min(diagonal):.3e}")
    return SpectralBounds(lower=0.0, upper=max(0.0, float(np.sum(diagonal))))


def bounds_gershgorin(R: HermitianMatrix) -> SpectralBounds:
    """Limites O(M^2) pelos discos de Gershgorin (raio = soma |off-diagonal| da linha)."""
    R = as_square(R)
    diagonal = np.real(np.diagonal(R))
    radii = np.sum(np.abs(R), axis=1) - np.abs(np.diagonal(R))
    upper = float(np.max(diagonal + radii))
    lower = max(0.0, float(np.min(diagonal - radii)))
    return SpectralBounds(lower=lower, upper=max(upper, lower))


def bounds_evd(R: HermitianMatrix) -> SpectralBounds:
    """Extremos exatos O(M^3); lambda_min negativo (arredondamento) vira 0."""
    decomposition = hermitian_evd(R)
    lower = max(0.0, decomposition.lambda_min)
    return SpectralBounds(lower=lower, upper=max(decomposition.lambda_max, lower))


_BOUND_ESTIMATORS = {
    LoadingMode.TRACE: bounds_trace,
    LoadingMode.GERSHGORIN: bounds_gershgorin,
    LoadingMode.EXACT_EVD: bounds_evd,
}


def estimate_bounds(R: HermitianMatrix, mode: LoadingMode) -> SpectralBounds:
    return _BOUND_ESTIMATORS[mode](R)


def compute_loading(R: HermitianMatrix, mode: LoadingMode, constraint: WngConstraint) -> LoadingDecision:
    """
    Estima os extremos do espectro no modo pedido e calcula o mu mínimo.

    Args:
        R: SCM (ou R~ particionada) de ordem M
        mode: Modo de estimativa
        constraint: Piso de WNG já convertido em kappa_max

    Returns:
        LoadingDecision
    """
    R = as_square(R)
    if R.shape[0] != constraint.array_size:
        raise DimensionMismatchError(f"Matriz de ordem {R.shape[0]} para restrição com M={constraint.array_size}")

    bounds = estimate_bounds(R, mode)
    mu = required_loading(bounds, constraint.kappa_max)

    if bounds.lower + mu <= 0.0:
        # Janela nula: mantém a matriz carregada inversível
        trace_value = float(np.sum(np.real(np.diagonal(R))))
        mu = ABSOLUTE_LOADING_FLOOR * max(1.0, trace_value / constraint.array_size)
        logger.debug(f"Janela degenerada no modo {mode.value}; piso absoluto mu={mu:.3e}")

    kappa_unloaded = bounds.upper / bounds.lower if bounds.lower > 0 else math.inf
    kappa_loaded = (bounds.upper + mu) / (bounds.lower + mu)

    return LoadingDecision(
        mode=mode,
        bounds=bounds,
        kappa_unloaded=kappa_unloaded,
        mu=mu,
        kappa_loaded_bound=kappa_loaded,
    )


def loaded_condition_number(R: HermitianMatrix, mu: float) -> float:
    """kappa(R + mu I) pelos autovalores exatos (diagnóstico, fora do cálculo de mu)."""
    decomposition = hermitian_evd(R)
    lower = decomposition.lambda_min + mu
    if lower <= 0:
        return math.inf
    return (decomposition.lambda_max + mu) / lower


class LoadingEstimator:
    """
    Aplica o carregamento de um modo fixo sob um piso de WNG configurado.
    """

    def __init__(self, config: Dict[str, Any], mode: LoadingMode):
        """
        Inicializa o estimador.

        Args:
            config: Seção resolvida ({"wng_min_db": ..., "array_size": ...})
            mode: Modo de estimativa
        """
        self.mode = mode
        self.constraint = WngConstraint.from_db(config["wng_min_db"], config["array_size"])
        logger.debug(f"LoadingEstimator[{mode.value}]: W_min={self.constraint.wng_min_db:.2f} dB, "
                     f"kappa_max={self.constraint.kappa_max:.4f}")

    def decide(self, R: HermitianMatrix) -> LoadingDecision:
        return compute_loading(R, self.mode, self.constraint)

    @staticmethod
    def loaded(R: HermitianMatrix, decision: LoadingDecision) -> HermitianMatrix:
        """Q = R + mu I."""
        return R + decision.mu * np.eye(R.shape[0])


"""
SCENARIO - Mundo Simulado
ULA, steering vectors, processo de nascimento/morte dos interferentes, ECM verdadeira e snapshots
"""

import logging
import math
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.analysis.numerics import ComplexVector, HermitianMatrix, cholesky_solve
from src.core.config import ScenarioConfig
from src.core.errors import ConfigError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class UlaGeometry:
    """Array linear uniforme; espaçamento em comprimentos de onda."""
    num_elements: int
    spacing: float = 0.5
    center_frequency_hz: float = 1000.0

    @classmethod
    def from_config(cls, config: ScenarioConfig) -> "UlaGeometry":
        return cls(num_elements=config.num_elements, spacing=config.element_spacing,
                   center_frequency_hz=config.center_frequency_hz)


@dataclass(frozen=True)
class InterfererState:
    """Interferente ativo: direção, potência e snapshots de vida restantes."""
    angle_deg: float
    power: float
    remaining_life: int


@dataclass(frozen=True)
class EnsembleCorrelation:
    """ECM verdadeira R = s_s d d^H + sum s_j d_j d_j^H + s_v I."""
    matrix: HermitianMatrix
    target_power: float
    noise_power: float
    interferer_angles: Tuple[float, ...]

    def interference_plus_noise(self, d: ComplexVector) -> HermitianMatrix:
        """R_in = R - s_s d d^H."""
        return self.matrix - self.target_power * np.outer(d, d.conj())


def steering_vector(geometry: UlaGeometry, angle_deg: float) -> ComplexVector:
    """
    d(theta)_m = exp(i 2 pi delta m cos(theta)), m = 0..M-1 (||d||^2 = M).

    Args:
        geometry: ULA
        angle_deg: Ângulo a partir do eixo do array, em graus

    Returns:
        Vetor complexo de tamanho M
    """
    phase = 2.0 * math.pi * geometry.spacing * math.cos(math.radians(angle_deg))
    return np.exp(1j * phase * np.arange(geometry.num_elements))


def steering_matrix(geometry: UlaGeometry, angles_deg: Sequence[float]) -> np.ndarray:
    """Steering vectors empilhados em colunas (M x len(angles))."""
    cosines = np.cos(np.radians(np.asarray(angles_deg, dtype=float)))
    phase = 2.0 * math.pi * geometry.spacing * np.outer(np.arange(geometry.num_elements), cosines)
    return np.exp(1j * phase)


def angle_grid(step_deg: float) -> np.ndarray:
    """Grade aberta (0, 180) com o passo pedido."""
    count = int(math.floor(180.0 / step_deg + 1e-9))
    grid = step_deg * np.arange(1, count + 1)
    return grid[grid < 180.0 - 1e-9]


def allowed_angles(geometry: UlaGeometry, target_angle_deg: float,
                   window_db: Tuple[float, float], grid_step_deg: float = 1.0) -> List[float]:
    """
    Direções em que a resposta do delay-and-sum apontado para o alvo fica dentro da
    janela [lo_db, hi_db] (lóbulo principal / primeiros lóbulos laterais).

    Raises:
        ConfigError: nenhuma direção da grade cai na janela
    """
    lo_db, hi_db = window_db
    grid = angle_grid(grid_step_deg)
    d_target = steering_vector(geometry, target_angle_deg)
    w_q = d_target / geometry.num_elements
    response = np.abs(w_q.conj() @ steering_matrix(geometry, grid))
    response_db = 20.0 * np.log10(np.maximum(response, 1e-300))

    mask = (response_db >= lo_db) & (response_db <= hi_db)
    angles = [float(a) for a in grid[mask]]
    if not angles:
        raise ConfigError(f"nenhuma direção com resposta em [{lo_db}, {hi_db}] dB",
                          field="scenario.beampattern_window_db")
    return angles


def trial_generators(seed: int) -> Tuple[np.random.Generator, np.random.Generator]:
    """
    Dois fluxos Philox independentes por trial: (agenda, sinais).
    A agenda de interferentes depende só da semente.
    """
    schedule_seq, signal_seq = np.random.SeedSequence(seed).spawn(2)
    return np.random.Generator(np.random.Philox(schedule_seq)), np.random.Generator(np.random.Philox(signal_seq))


def _geometric_lifetime(rng: np.random.Generator, mean_lifetime: float) -> int:
    """Vida geométrica em {1, 2, ...} com média mean_lifetime."""
    return int(rng.geometric(1.0 / mean_lifetime))


def step_birth_death(state: Sequence[InterfererState], config: ScenarioConfig,
                     rng: np.random.Generator,
                     allowed: Optional[Sequence[float]] = None) -> List[InterfererState]:
    """
    Avança o processo de um snapshot.

    Primeiro envelhece e remove os expirados; depois cada vaga livre (até max_interferers)
    nasce com probabilidade p, em direção sorteada entre as permitidas (evitando as ocupadas
    quando possível). Um recém-nascido já está presente no snapshot corrente.

    Args:
        state: Interferentes ativos
        config: Cenário
        rng: Fluxo da agenda
        allowed: Direções permitidas (calculadas do config se omitidas)

    Returns:
        Novo estado (a lista de entrada não é modificada)
    """
    if allowed is None:
        allowed = allowed_angles(UlaGeometry.from_config(config), config.target_angle_deg,
                                 config.beampattern_window_db, config.angle_grid_step_deg)

    survivors = [replace(s, remaining_life=s.remaining_life - 1) for s in state if s.remaining_life > 1]

    free_slots = config.max_interferers - len(survivors)
    for _ in range(free_slots):
        if rng.random() >= config.birth_probability:
            continue
        occupied = {s.angle_deg for s in survivors}
        candidates = [a for a in allowed if a not in occupied] or list(allowed)
        angle = candidates[int(rng.integers(len(candidates)))]
        lifetime = _geometric_lifetime(rng, config.mean_lifetime)
        survivors.append(InterfererState(angle_deg=angle, power=config.interferer_power, remaining_life=lifetime))
        logger.debug(f"Interferente nasceu em {angle:.1f} graus (vida {lifetime})")

    return survivors


def true_ecm(state: Sequence[InterfererState], config: ScenarioConfig,
             geometry: Optional[UlaGeometry] = None) -> EnsembleCorrelation:
    """ECM do estado corrente."""
    geometry = geometry or UlaGeometry.from_config(config)
    m = geometry.num_elements
    d = steering_vector(geometry, config.target_angle_deg)
    matrix = config.target_power * np.outer(d, d.conj()) + config.noise_power * np.eye(m, dtype=complex)
    for source in state:
        d_j = steering_vector(geometry, source.angle_deg)
        matrix = matrix + source.power * np.outer(d_j, d_j.conj())
    return EnsembleCorrelation(matrix=matrix, target_power=config.target_power, noise_power=config.noise_power,
                               interferer_angles=tuple(s.angle_deg for s in state))


def _circular_gaussian(rng: np.random.Generator, power: float, size: Optional[int] = None):
    """CN(0, power): partes real e imaginária com variância power/2."""
    scale = math.sqrt(power / 2.0)
    if size is None:
        re, im = rng.standard_normal(2)
        return scale * complex(re, im)
    draws = rng.standard_normal((2, size))
    return scale * (draws[0] + 1j * draws[1])


def draw_snapshot(state: Sequence[InterfererState], config: ScenarioConfig,
                  rng: np.random.Generator, geometry: Optional[UlaGeometry] = None) -> Tuple[ComplexVector, complex]:
    """
    y = s d + sum i_j d_j + v, amostras independentes por snapshot.

    Returns:
        (snapshot y, amostra do alvo s)
    """
    geometry = geometry or UlaGeometry.from_config(config)
    m = geometry.num_elements
    target = _circular_gaussian(rng, config.target_power)
    y = target * steering_vector(geometry, config.target_angle_deg)
    for source in state:
        y = y + _circular_gaussian(rng, source.power) * steering_vector(geometry, source.angle_deg)
    y = y + _circular_gaussian(rng, config.noise_power, size=m)
    return y, target


def capon_spectrum(R: HermitianMatrix, geometry: UlaGeometry, angles_deg: Sequence[float]) -> np.ndarray:
    """Potência de Capon 1/(d^H R^{-1} d) por direção."""
    steering = steering_matrix(geometry, angles_deg)
    solved = cholesky_solve(R, steering)
    denominator = np.real(np.sum(steering.conj() * solved, axis=0))
    return 1.0 / denominator


class ScenarioSimulator:
    """
    Gera o mundo de um trial: agenda de interferentes + snapshots.
    """

    def __init__(self, config: ScenarioConfig, seed: int):
        """
        Inicializa o simulador.

        Args:
            config: Cenário validado
            seed: Semente do trial (base + índice)
        """
        self.config = config
        self.seed = seed
        self.geometry = UlaGeometry.from_config(config)
        self.allowed = allowed_angles(self.geometry, config.target_angle_deg,
                                      config.beampattern_window_db, config.angle_grid_step_deg)
        self.target_steering = steering_vector(self.geometry, config.target_angle_deg)
        self._schedule_rng, self._signal_rng = trial_generators(seed)
        self.state: List[InterfererState] = []
        self.ecm = true_ecm(self.state, config, self.geometry)
        self.births = 0

    def advance_schedule(self) -> bool:
        """Avança só a agenda (e a ECM). Retorna True se o conjunto de fontes mudou."""
        survivors = sum(1 for s in self.state if s.remaining_life > 1)
        before = sorted(s.angle_deg for s in self.state)
        self.state = step_birth_death(self.state, self.config, self._schedule_rng, self.allowed)
        self.births += len(self.state) - survivors
        # morte + nascimento na mesma direção deixa a ECM igual
        changed = sorted(s.angle_deg for s in self.state) != before
        if changed:
            self.ecm = true_ecm(self.state, self.config, self.geometry)
        return changed

    def step(self) -> Tuple[ComplexVector, complex, bool]:
        """
        Próximo snapshot.

        Returns:
            (y, s, ecm_mudou)
        """
        changed = self.advance_schedule()
        y, target = draw_snapshot(self.state, self.config, self._signal_rng, self.geometry)
        return y, target, changed

"""
METRICS - Métricas por Frame e do Ensemble
WNG, SINR de saída pela ECM verdadeira, MSE instantâneo/cumulativo e agregação entre trials
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Sequence

import numpy as np

from src.analysis.numerics import ComplexVector
from src.beamforming.beamform import BeamformerWeights
from src.core.errors import ShapeMismatchError
from src.simulation.scenario import EnsembleCorrelation

logger = logging.getLogger(__name__)

DB_FLOOR = -100.0
TRACE_FIELDS = ("wng_db", "sinr_db", "mse_inst", "mu", "kappa_loaded", "lambda_lo", "lambda_hi")


def to_db(value: float) -> float:
    """10log10 com -inf para zero."""
    if value <= 0.0:
        return -math.inf
    return 10.0 * math.log10(value)


def clamp_db(values, floor: float = DB_FLOOR):
    """Piso de -100 dB (só para exportação)."""
    return np.maximum(np.asarray(values, dtype=float), floor)


def output_sinr_linear(w: BeamformerWeights, ecm: EnsembleCorrelation, d: ComplexVector) -> float:
    """
    s_s |w^H d|^2 / (w^H R_in w), com R_in = R_true - s_s d d^H.

    Raises:
        ValueError: denominador nulo (só possível sem ruído)
    """
    weights = w.w
    signal = ecm.target_power * abs(np.vdot(weights, d)) ** 2
    r_in = ecm.interference_plus_noise(d)
    denominator = float(np.real(np.vdot(weights, r_in @ weights)))
    if denominator <= 0.0:
        raise ValueError(f"Potência de interferência + ruído não positiva: {denominator:.3e}")
    return float(signal) / denominator


def output_sinr(w: BeamformerWeights, ecm: EnsembleCorrelation, d: ComplexVector) -> float:
    """SINR de saída em dB."""
    return to_db(output_sinr_linear(w, ecm, d))


def instantaneous_mse(output: complex, s_target: complex) -> float:
    """|w^H y - s|^2."""
    return float(abs(output - s_target) ** 2)


def cumulative_mean(values: np.ndarray) -> np.ndarray:
    """Média corrida a partir do frame 0."""
    values = np.asarray(values, dtype=float)
    return np.cumsum(values) / np.arange(1, values.size + 1)


@dataclass
class MethodFrame:
    """Valores de um método num frame; campos de carregamento são NaN quando não se aplicam."""
    wng_db: float
    sinr_db: float
    mse_inst: float
    mu: float = math.nan
    kappa_loaded: float = math.nan
    lambda_lo: float = math.nan
    lambda_hi: float = math.nan


@dataclass
class FrameRecord:
    """Um frame de um trial: valores por método."""
    frame: int
    warmup: bool
    methods: Dict[str, MethodFrame] = field(default_factory=dict)


@dataclass
class TrialRecord:
    """
    Séries temporais de um trial, um array de tamanho T por (método, campo).
    """
    trial: int
    seed: int
    warmup: np.ndarray
    traces: Dict[str, Dict[str, np.ndarray]]
    diagnostics: Dict[str, float] = field(default_factory=dict)

    @classmethod
    def allocate(cls, trial: int, seed: int, frames: int, labels: Sequence[str]) -> "TrialRecord":
        traces = {label: {name: np.full(frames, math.nan) for name in TRACE_FIELDS} for label in labels}
        return cls(trial=trial, seed=seed, warmup=np.zeros(frames, dtype=bool), traces=traces)

    @classmethod
    def from_frames(cls, frames: Sequence[FrameRecord], trial: int = 0, seed: int = 0) -> "TrialRecord":
        """Monta o trial a partir de FrameRecords (mesmo conjunto de métodos em todos)."""
        if not frames:
            raise ShapeMismatchError("Trial sem frames")
        labels = list(frames[0].methods)
        record = cls.allocate(trial, seed, len(frames), labels)
        for i, frame in enumerate(frames):
            if list(frame.methods) != labels:
                raise ShapeMismatchError(f"Frame {frame.frame} com métodos {list(frame.methods)}, esperado {labels}")
            record.store(i, frame)
        return record

    @property
    def labels(self) -> List[str]:
        return list(self.traces)

    @property
    def frames(self) -> int:
        return int(self.warmup.size)

    def store(self, index: int, frame: FrameRecord) -> None:
        self.warmup[index] = frame.warmup
        for label, values in frame.methods.items():
            trace = self.traces[label]
            for name in TRACE_FIELDS:
                trace[name][index] = getattr(values, name)

    def frame(self, index: int) -> FrameRecord:
        methods = {label: MethodFrame(**{name: float(trace[name][index]) for name in TRACE_FIELDS})
                   for label, trace in self.traces.items()}
        return FrameRecord(frame=index, warmup=bool(self.warmup[index]), methods=methods)

    def cumulative_mse(self, label: str) -> np.ndarray:
        return cumulative_mean(self.traces[label]["mse_inst"])

    def summary(self, label: str, include_warmup: bool = False) -> Dict[str, float]:
        """Estatísticas de um método (linha do trials.csv); pós-warmup por padrão."""
        trace = self.traces[label]
        steady = ~self.warmup
        if include_warmup or not np.any(steady):
            steady = np.ones_like(self.warmup)
        return {
            "mean_sinr_db": float(np.mean(trace["sinr_db"][steady])),
            "mean_wng_db": float(np.mean(trace["wng_db"][steady])),
            "min_wng_db": float(np.min(trace["wng_db"][steady])),
            "final_mse_cum": float(self.cumulative_mse(label)[-1]),
        }


@dataclass
class EnsembleSummary:
    """Médias por frame entre trials."""
    trials: int
    warmup: np.ndarray
    wng_db: Dict[str, np.ndarray]
    sinr_db: Dict[str, np.ndarray]
    mse_cum: Dict[str, np.ndarray]
    loading: Dict[str, Dict[str, np.ndarray]] = field(default_factory=dict)

    @property
    def labels(self) -> List[str]:
        return list(self.wng_db)

    @property
    def frames(self) -> int:
        return int(self.warmup.size)

    def final_sinr_db(self, label: str, include_warmup: bool = False) -> float:
        """SINR médio no tempo (pós-warmup por padrão) da curva do ensemble."""
        values = self.sinr_db[label]
        if not include_warmup and np.any(~self.warmup):
            values = values[~self.warmup]
        return float(np.mean(values))

    def final_mse(self, label: str) -> float:
        return float(self.mse_cum[label][-1])


def accumulate(trials: Sequence[TrialRecord]) -> EnsembleSummary:
    """
    Média aritmética entre trials, frame a frame. O MSE cumulativo é a média corrida
    dentro de cada trial, depois a média entre trials.

    Raises:
        ShapeMismatchError: trials com T ou métodos diferentes
    """
    if not trials:
        raise ShapeMismatchError("Nenhum trial para agregar")

    reference = trials[0]
    for record in trials[1:]:
        if record.frames != reference.frames:
            raise ShapeMismatchError(f"Trial {record.trial} com T={record.frames}, esperado {reference.frames}")
        if record.labels != reference.labels:
            raise ShapeMismatchError(f"Trial {record.trial} com métodos {record.labels}, esperado {reference.labels}")

    def mean_of(extract) -> np.ndarray:
        return np.mean(np.stack([extract(record) for record in trials]), axis=0)

    labels = reference.labels
    summary = EnsembleSummary(
        trials=len(trials),
        warmup=reference.warmup.copy(),
        wng_db={label: mean_of(lambda r, k=label: r.traces[k]["wng_db"]) for label in labels},
        sinr_db={label: mean_of(lambda r, k=label: r.traces[k]["sinr_db"]) for label in labels},
        mse_cum={label: mean_of(lambda r, k=label: r.cumulative_mse(k)) for label in labels},
    )
    for label in labels:
        if np.all(np.isnan(reference.traces[label]["mu"])):
            continue
        summary.loading[label] = {
            name: mean_of(lambda r, k=label, n=name: r.traces[k][n])
            for name in ("lambda_lo", "lambda_hi", "mu", "kappa_loaded")
        }

    logger.debug(f"Ensemble agregado: {len(trials)} trials, {reference.frames} frames, {len(labels)} métodos")
    return summary

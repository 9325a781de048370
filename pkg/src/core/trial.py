"""
TRIAL - Pipeline de um Trial
Cenário -> trackers (SCM e GSC) -> carregamento por modo -> pesos -> métricas, frame a frame
"""

import logging
import math
from typing import Dict, List, Optional, Tuple

import numpy as np

from src.analysis.loading import (
    LoadingDecision,
    LoadingEstimator,
    LoadingMode,
    kantorovich_bound,
    linear_to_db,
    loaded_condition_number,
)
from src.analysis.metrics import FrameRecord, MethodFrame, TrialRecord, instantaneous_mse, output_sinr, to_db
from src.beamforming.beamform import (
    BeamformerWeights,
    blocking_matrix,
    cox_scaled_weights,
    gsc_weights,
    mpdr_weights,
    omniscient_capon,
    quiescent_weights,
    smi_floor,
)
from src.beamforming.scm import GscTracker, ScmTracker
from src.core.config import LOADING_METHODS, ExperimentConfig
from src.simulation.scenario import ScenarioSimulator

logger = logging.getLogger(__name__)

# Divergência de mu entre arquiteturas (Gershgorin) conta a partir deste erro relativo
MU_MISMATCH_TOLERANCE = 1e-9
MU_ORDER_TOLERANCE = 1e-9


def method_labels(config: ExperimentConfig) -> List[str]:
    """Rótulos das colunas: {modo}_{arquitetura} para os modos de carregamento, nome puro para o resto."""
    labels = []
    for method in config.methods:
        if method in LOADING_METHODS:
            labels.extend(f"{method}_{arch}" for arch in config.architectures)
        else:
            labels.append(method)
    return labels


def _relative_deviation(a: np.ndarray, b: np.ndarray) -> float:
    scale = float(np.linalg.norm(a))
    return float(np.linalg.norm(a - b)) / scale if scale > 0 else float(np.linalg.norm(b))


class TrialRunner:
    """
    Executa um trial completo de forma sequencial e determinística.
    """

    def __init__(self, config: ExperimentConfig):
        """
        Inicializa o runner.

        Args:
            config: Experimento validado
        """
        self.config = config
        self.scenario = config.scenario
        self.labels = method_labels(config)
        self.modes = [LoadingMode(m) for m in config.methods if m in LOADING_METHODS]
        self.use_gsc = "gsc" in config.architectures and bool(self.modes)
        self.use_mpdr = "mpdr" in config.architectures

        section = {"wng_min_db": config.wng_min_db, "array_size": self.scenario.num_elements}
        self.estimators = {mode: LoadingEstimator(section, mode) for mode in self.modes}
        self.constraint = next(iter(self.estimators.values())).constraint if self.estimators else None
        self.wng_min = 10.0 ** (config.wng_min_db / 10.0)
        self.loading_feasible = self.constraint is None or self.constraint.kappa_max > 1.0

    def run(self, trial_index: int) -> TrialRecord:
        """
        Roda o trial trial_index (semente = base + índice).

        Returns:
            TrialRecord com as séries de todos os métodos e os diagnósticos do trial
        """
        seed = self.scenario.rng_seed + trial_index
        frames = self.scenario.total_snapshots
        window = self.scenario.window_length

        simulator = ScenarioSimulator(self.scenario, seed)
        d = simulator.target_steering
        quiescent = quiescent_weights(d)
        blocking = blocking_matrix(d)
        scm = ScmTracker(window, self.scenario.num_elements)
        gsc = GscTracker(window, blocking.quiescent, blocking.B) if self.use_gsc else None

        record = TrialRecord.allocate(trial_index, seed, frames, self.labels)
        diagnostics = _TrialDiagnostics()
        omniscient: Optional[BeamformerWeights] = None

        if not self.loading_feasible:
            logger.warning(f"[TRIAL {trial_index}] kappa_max = 1 (piso de WNG = M): "
                           f"modos de carregamento caem para o beamformer quiescente")

        for i in range(frames):
            y, target, changed = simulator.step()
            scm.push(y)
            if gsc is not None:
                gsc.push(y)
            warmup = i < window - 1

            weights: Dict[str, Tuple[BeamformerWeights, Optional[LoadingDecision]]] = {}
            self._loaded_weights(scm, gsc, blocking, quiescent, d, weights)

            if "cox" in self.config.methods or "smi" in self.config.methods:
                R = scm.current_scm
                unloaded = mpdr_weights(R + smi_floor(R) * np.eye(R.shape[0]), d)
                if "cox" in self.config.methods:
                    weights["cox"] = (cox_scaled_weights(unloaded, d, self.wng_min), None)
                if "smi" in self.config.methods:
                    weights["smi"] = (unloaded, None)
            if "omniscient" in self.config.methods:
                if omniscient is None or changed:
                    omniscient = omniscient_capon(simulator.ecm.matrix, d)
                weights["omniscient"] = (omniscient, None)
            if "quiescent" in self.config.methods:
                weights["quiescent"] = (quiescent, None)

            frame = FrameRecord(frame=i, warmup=warmup)
            for label in self.labels:
                w, decision = weights[label]
                frame.methods[label] = self._score(w, decision, simulator, d, y, target)
            record.store(i, frame)

            diagnostics.observe(frame, weights, scm, gsc, warmup)

        record.diagnostics = diagnostics.finish(simulator.births)
        logger.info(f"[TRIAL {trial_index}] seed={seed} frames={frames} nascimentos={simulator.births}")
        return record

    def _loaded_weights(self, scm: ScmTracker, gsc: Optional[GscTracker], blocking, quiescent,
                        d, weights: Dict) -> None:
        for mode, estimator in self.estimators.items():
            if not self.loading_feasible:
                for arch in self.config.architectures:
                    weights[f"{mode.value}_{arch}"] = (quiescent, None)
                continue
            if self.use_mpdr:
                decision = estimator.decide(scm.current_scm)
                w = mpdr_weights(estimator.loaded(scm.current_scm, decision), d)
                weights[f"{mode.value}_mpdr"] = (w, decision)
            if gsc is not None:
                decision = estimator.decide(gsc.assemble_partitioned())
                w = gsc_weights(gsc, decision.mu, blocking.quiescent, blocking)
                weights[f"{mode.value}_gsc"] = (w, decision)

    @staticmethod
    def _score(w: BeamformerWeights, decision: Optional[LoadingDecision], simulator: ScenarioSimulator,
               d, y, target) -> MethodFrame:
        values = MethodFrame(
            wng_db=to_db(w.wng),
            sinr_db=output_sinr(w, simulator.ecm, d),
            mse_inst=instantaneous_mse(w.output(y), target),
        )
        if decision is not None:
            values.mu = decision.mu
            values.kappa_loaded = decision.kappa_loaded_bound
            values.lambda_lo = decision.bounds.lower
            values.lambda_hi = decision.bounds.upper
        return values


class _TrialDiagnostics:
    """Verificações cruzadas acumuladas ao longo do trial (linha do trials.csv)."""

    def __init__(self):
        self.weight_deviation: Dict[str, float] = {}
        self.mu_mismatch_frames = 0
        self.mu_compared_frames = 0
        self.mu_order_violations = 0
        self.spectrum_deviation = 0.0
        self.checked_spectrum = False
        self.guaranteed_wng_db = math.inf

    def observe(self, frame: FrameRecord, weights: Dict, scm: ScmTracker,
                gsc: Optional[GscTracker], warmup: bool) -> None:
        for mode in ("trace", "gershgorin", "evd"):
            mpdr = weights.get(f"{mode}_mpdr")
            partitioned = weights.get(f"{mode}_gsc")
            if mpdr is None or partitioned is None:
                continue
            deviation = _relative_deviation(mpdr[0].w, partitioned[0].w)
            self.weight_deviation[mode] = max(self.weight_deviation.get(mode, 0.0), deviation)

            if mode == "gershgorin" and not warmup and mpdr[1] is not None and partitioned[1] is not None:
                mu_a, mu_b = mpdr[1].mu, partitioned[1].mu
                self.mu_compared_frames += 1
                if abs(mu_a - mu_b) > MU_MISMATCH_TOLERANCE * max(abs(mu_a), abs(mu_b), 1e-300):
                    self.mu_mismatch_frames += 1

        for mode in ("trace", "gershgorin", "evd"):
            mpdr = weights.get(f"{mode}_mpdr")
            if mpdr is not None and mpdr[1] is not None and not warmup:
                self._guarantee(scm, mpdr[1].mu)

        methods = frame.methods
        if all(f"{m}_mpdr" in methods for m in LOADING_METHODS):
            mu_evd = methods["evd_mpdr"].mu
            scale = float(np.real(np.trace(scm.current_scm)))
            for other in ("trace_mpdr", "gershgorin_mpdr"):
                mu_other = methods[other].mu
                if mu_evd > mu_other * (1.0 + MU_ORDER_TOLERANCE) + 1e-15 * scale:
                    self.mu_order_violations += 1

        if gsc is not None:
            self.checked_spectrum = True
            full = np.linalg.eigvalsh(scm.current_scm)
            partitioned = np.linalg.eigvalsh(gsc.assemble_partitioned())
            norm = max(float(np.linalg.norm(scm.current_scm, "fro")), 1e-300)
            self.spectrum_deviation = max(self.spectrum_deviation,
                                          float(np.max(np.abs(full - partitioned))) / norm)

    def _guarantee(self, scm: ScmTracker, mu: float) -> None:
        """Piso de WNG implicado por Kantorovich com o kappa exato de R + mu I."""
        kappa = loaded_condition_number(scm.current_scm, mu)
        if math.isfinite(kappa):
            bound = scm.order * kantorovich_bound(kappa)
            self.guaranteed_wng_db = min(self.guaranteed_wng_db, linear_to_db(bound))

    def finish(self, births: int) -> Dict[str, float]:
        result = {"births": float(births)}
        for mode in ("trace", "gershgorin", "evd"):
            result[f"{mode}_weight_deviation"] = self.weight_deviation.get(mode, math.nan)
        result["gershgorin_mu_mismatch_fraction"] = (
            self.mu_mismatch_frames / self.mu_compared_frames if self.mu_compared_frames else math.nan)
        result["mu_order_violations"] = float(self.mu_order_violations)
        result["spectrum_deviation"] = self.spectrum_deviation if self.checked_spectrum else math.nan
        result["min_guaranteed_wng_db"] = (
            self.guaranteed_wng_db if math.isfinite(self.guaranteed_wng_db) else math.nan)
        return result

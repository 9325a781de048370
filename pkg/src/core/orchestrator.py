"""
ORCHESTRATOR - Maestro do Experimento
Distribui os trials entre workers, agrega o ensemble e grava os resultados
"""

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from src.analysis.metrics import EnsembleSummary, TrialRecord, accumulate, to_db
from src.core.config import ExperimentConfig
from src.core.results_writer import ResultsWriter
from src.core.trial import TrialRunner
from src.simulation.scenario import ScenarioSimulator, angle_grid, capon_spectrum

logger = logging.getLogger(__name__)


def _run_trial(config: ExperimentConfig, trial_index: int) -> TrialRecord:
    """Ponto de entrada do worker (precisa ser picklável)."""
    return TrialRunner(config).run(trial_index)


@dataclass
class ExperimentResult:
    """Resultado de run_experiment: ensemble, trials e arquivos gravados."""
    summary: EnsembleSummary
    trials: List[TrialRecord]
    files: Dict[str, Path] = field(default_factory=dict)
    elapsed_seconds: float = 0.0


class ExperimentOrchestrator:
    """
    Coordena um experimento: trials independentes em paralelo, redução sequencial.
    """

    def __init__(self, config: ExperimentConfig):
        """
        Inicializa o orquestrador.

        Args:
            config: Experimento validado (com overrides da CLI já aplicados)
        """
        self.config = config
        self.writer = ResultsWriter(config.output_dir)

    def _run_trials(self) -> List[TrialRecord]:
        indices = list(range(self.config.trials))
        workers = min(self.config.workers, len(indices))

        if workers <= 1:
            return [_run_trial(self.config, i) for i in indices]

        logger.info(f"[ENSEMBLE] {len(indices)} trials em {workers} processos")
        # map preserva a ordem dos trials; o resultado não depende do escalonamento
        with ProcessPoolExecutor(max_workers=workers) as executor:
            return list(executor.map(_run_trial, [self.config] * len(indices), indices))

    def run_experiment(self) -> ExperimentResult:
        """
        Executa todos os trials e grava ensemble.csv, loading.csv, trials.csv e o eco da configuração.

        Returns:
            ExperimentResult
        """
        started = time.perf_counter()
        scenario = self.config.scenario
        logger.info(f"[ENSEMBLE] M={scenario.num_elements} L={scenario.window_length} "
                    f"T={scenario.total_snapshots} trials={self.config.trials} "
                    f"W_min={self.config.wng_min_db:.4f} dB seed={scenario.rng_seed}")

        files = {"config": self.writer.write_config_echo(self.config.to_dict())}
        trials = self._run_trials()
        summary = accumulate(trials)

        include_warmup = self.config.include_warmup
        files["ensemble"] = self.writer.write_ensemble(summary, include_warmup)
        files["loading"] = self.writer.write_loading(summary, include_warmup)
        files["trials"] = self.writer.write_trials(trials, include_warmup)

        elapsed = time.perf_counter() - started
        self._log_summary(summary, elapsed)
        return ExperimentResult(summary=summary, trials=trials, files=files, elapsed_seconds=elapsed)

    def _log_summary(self, summary: EnsembleSummary, elapsed: float) -> None:
        logger.info("=" * 60)
        logger.info(f"[ENSEMBLE] {summary.trials} trials concluídos em {elapsed:.1f}s")
        for label in summary.labels:
            sinr = summary.final_sinr_db(label, include_warmup=self.config.include_warmup)
            logger.info(f"  {label:<18} SINR médio {sinr:8.3f} dB | MSE cumulativo {summary.final_mse(label):.4g}")
        logger.info("=" * 60)

    def scan_spatial_spectrum(self, trial_index: int = 0) -> Path:
        """
        Espectro espacial "verdade" ao longo do tempo: Capon sobre a ECM verdadeira, numa grade
        angular, a cada scan_decimation frames. Usa a mesma agenda de interferentes do trial pedido.

        Returns:
            Caminho do CSV gravado
        """
        scenario = self.config.scenario
        simulator = ScenarioSimulator(scenario, scenario.rng_seed + trial_index)
        angles = angle_grid(self.config.scan_grid_step_deg)
        decimation = self.config.scan_decimation

        rows: List[np.ndarray] = []
        frames: List[int] = []
        spectrum: Optional[np.ndarray] = None
        scanned = None
        for i in range(scenario.total_snapshots):
            simulator.advance_schedule()
            if i % decimation:
                continue
            # a ECM só é substituída quando o conjunto de fontes muda
            if simulator.ecm is not scanned:
                power = capon_spectrum(simulator.ecm.matrix, simulator.geometry, angles)
                spectrum = np.array([to_db(p) for p in power])
                scanned = simulator.ecm
            frames.append(i)
            rows.append(spectrum)

        self.writer.write_config_echo(self.config.to_dict())
        path = self.writer.write_scan(frames, angles, np.vstack(rows))
        logger.info(f"[SCAN] {len(frames)} frames x {len(angles)} direções, nascimentos={simulator.births}")
        return path

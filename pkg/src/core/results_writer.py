"""
RESULTS WRITER - Exportação dos Resultados
CSVs do ensemble, do carregamento, dos trials e do scan espacial, mais o eco da configuração
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Sequence, Union

import numpy as np
import pandas as pd

from src.analysis.metrics import EnsembleSummary, TrialRecord, clamp_db

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.9g"
ENSEMBLE_FILE = "ensemble.csv"
LOADING_FILE = "loading.csv"
TRIALS_FILE = "trials.csv"
SCAN_FILE = "spatial_spectrum.csv"
BENCH_FILE = "bench.csv"
CONFIG_ECHO_FILE = "resolved_config.json"


class ResultsWriter:
    """
    Escreve os artefatos de um experimento num diretório.
    UTF-8, LF, cabeçalho obrigatório, floats com 9 dígitos significativos.
    """

    def __init__(self, output_dir: Union[str, Path]):
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)

    def _write_csv(self, frame: pd.DataFrame, name: str) -> Path:
        path = self.output_dir / name
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n", encoding="utf-8")
        logger.info(f"[WRITER] {path} ({len(frame)} linhas)")
        return path

    def write_config_echo(self, resolved: Dict[str, Any]) -> Path:
        """Eco da configuração resolvida (chaves ordenadas); reexecutável com `run`."""
        path = self.output_dir / CONFIG_ECHO_FILE
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            json.dump(resolved, f, indent=2, sort_keys=True)
            f.write("\n")
        logger.info(f"[WRITER] {path}")
        return path

    @staticmethod
    def _rows(summary: EnsembleSummary, include_warmup: bool) -> np.ndarray:
        """Frames exportados: sem os L-1 de warmup, salvo pedido explícito."""
        if include_warmup:
            return np.ones(summary.frames, dtype=bool)
        return ~summary.warmup

    def write_ensemble(self, summary: EnsembleSummary, include_warmup: bool = False) -> Path:
        """frame, depois {método}_{métrica} para cada método."""
        rows = self._rows(summary, include_warmup)
        columns: Dict[str, Any] = {"frame": np.arange(summary.frames)[rows]}
        for label in summary.labels:
            columns[f"{label}_wng_db"] = clamp_db(summary.wng_db[label][rows])
            columns[f"{label}_sinr_db"] = clamp_db(summary.sinr_db[label][rows])
            columns[f"{label}_mse_cum"] = summary.mse_cum[label][rows]
        return self._write_csv(pd.DataFrame(columns), ENSEMBLE_FILE)

    def write_loading(self, summary: EnsembleSummary, include_warmup: bool = False) -> Path:
        """Formato longo: frame, method, architecture, lambda_lo, lambda_hi, mu, kappa_loaded (médias do ensemble)."""
        rows = self._rows(summary, include_warmup)
        blocks: List[pd.DataFrame] = []
        for label, trace in summary.loading.items():
            method, _, architecture = label.partition("_")
            blocks.append(pd.DataFrame({
                "frame": np.arange(summary.frames)[rows],
                "method": method,
                "architecture": architecture,
                "lambda_lo": trace["lambda_lo"][rows],
                "lambda_hi": trace["lambda_hi"][rows],
                "mu": trace["mu"][rows],
                "kappa_loaded": trace["kappa_loaded"][rows],
            }))
        columns = ["frame", "method", "architecture", "lambda_lo", "lambda_hi", "mu", "kappa_loaded"]
        frame = pd.concat(blocks, ignore_index=True) if blocks else pd.DataFrame(columns=columns)
        if blocks:
            frame = frame.sort_values(["frame", "method", "architecture"], kind="stable").reset_index(drop=True)
        return self._write_csv(frame[columns], LOADING_FILE)

    def write_trials(self, trials: Sequence[TrialRecord], include_warmup: bool = False) -> Path:
        """Uma linha por trial: diagnósticos e estatísticas por método (pós-warmup por padrão)."""
        rows = []
        for record in trials:
            row: Dict[str, Any] = {"trial": record.trial, "seed": record.seed}
            row.update(record.diagnostics)
            for label in record.labels:
                for name, value in record.summary(label, include_warmup).items():
                    row[f"{label}_{name}"] = value
            rows.append(row)
        return self._write_csv(pd.DataFrame(rows), TRIALS_FILE)

    def write_scan(self, frames: Sequence[int], angles: Sequence[float], power_db: np.ndarray) -> Path:
        """Grade frame x ângulo (dB) do Capon sobre a ECM verdadeira."""
        columns = [f"{angle:g}" for angle in angles]
        frame = pd.DataFrame(clamp_db(power_db), columns=columns)
        frame.insert(0, "frame", np.asarray(frames, dtype=int))
        return self._write_csv(frame, SCAN_FILE)

    def write_bench(self, table: pd.DataFrame) -> Path:
        return self._write_csv(table, BENCH_FILE)

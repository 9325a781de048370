"""
BENCHMARK - Custo dos Estimadores de Limites
Mediana de tempo por ordem e inclinação log-log de cada modo de carregamento
"""

import logging
import timeit
from dataclasses import dataclass
from typing import Dict, Sequence

import numpy as np
import pandas as pd

from src.analysis.loading import LoadingMode, estimate_bounds

logger = logging.getLogger(__name__)

DEFAULT_ORDERS = (16, 32, 64, 128)
# Matrizes de teste: SCM de uma janela de 37 snapshots (posto deficiente acima disso)
BENCH_WINDOW = 37


@dataclass
class BenchmarkResult:
    """Tabela (mode, order, median_seconds) e a inclinação log-log por modo."""
    table: pd.DataFrame
    slopes: Dict[str, float]


def random_psd(order: int, rng: np.random.Generator, snapshots: int = BENCH_WINDOW) -> np.ndarray:
    """SCM aleatória (1/L) A A^H com L snapshots complexos (posto deficiente se L < M)."""
    A = rng.standard_normal((order, snapshots)) + 1j * rng.standard_normal((order, snapshots))
    return A @ A.conj().T / snapshots


def loglog_slope(orders: Sequence[int], seconds: Sequence[float]) -> float:
    """Inclinação da reta de mínimos quadrados em log(tempo) x log(ordem)."""
    slope, _ = np.polyfit(np.log(np.asarray(orders, dtype=float)), np.log(np.asarray(seconds, dtype=float)), 1)
    return float(slope)


def _median_call_seconds(function, repeats: int) -> float:
    timer = timeit.Timer(function)
    number, _ = timer.autorange()
    samples = [t / number for t in timer.repeat(repeat=repeats, number=number)]
    return float(np.median(samples))


def benchmark_bounds(orders: Sequence[int] = DEFAULT_ORDERS, modes: Sequence[LoadingMode] = tuple(LoadingMode),
                     repeats: int = 5, seed: int = 0) -> BenchmarkResult:
    """
    Mede estimate_bounds em cada modo e ordem.

    Args:
        orders: Ordens M
        modes: Modos a medir
        repeats: Repetições (mediana)
        seed: Semente das matrizes de teste

    Returns:
        BenchmarkResult
    """
    rng = np.random.default_rng(seed)
    matrices = {order: random_psd(order, rng) for order in orders}

    rows = []
    slopes = {}
    for mode in modes:
        timings = []
        for order in orders:
            R = matrices[order]
            seconds = _median_call_seconds(lambda: estimate_bounds(R, mode), repeats)
            timings.append(seconds)
            rows.append({"mode": mode.value, "order": order, "median_seconds": seconds})
        slopes[mode.value] = loglog_slope(orders, timings)
        logger.info(f"[BENCH] {mode.value:<10} inclinação log-log = {slopes[mode.value]:.2f}")

    return BenchmarkResult(table=pd.DataFrame(rows), slopes=slopes)

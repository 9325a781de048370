"""
Analysis Module - Álgebra Hermitiana, Carregamento e Métricas
"""

from .loading import LoadingEstimator, LoadingMode, compute_loading, kappa_max_from_wng
from .numerics import hermitian_evd

__all__ = ["LoadingEstimator", "LoadingMode", "compute_loading", "kappa_max_from_wng", "hermitian_evd"]

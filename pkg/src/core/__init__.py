"""
Core Module - Configuração, Trials e Orquestração do Experimento
"""

from .config import ExperimentConfig, LoadingConfig, ScenarioConfig, load_config
from .errors import AdaptiveLoadingError, ConfigError

__all__ = ["ExperimentConfig", "LoadingConfig", "ScenarioConfig", "load_config",
           "AdaptiveLoadingError", "ConfigError"]

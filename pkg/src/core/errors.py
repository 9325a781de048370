"""
ERRORS - Hierarquia de Exceções
Falhas explícitas da álgebra, do carregamento diagonal e da configuração
"""

from typing import Optional


class AdaptiveLoadingError(Exception):
    """Base de todas as falhas do ADAPTIVE LOADING."""


class DimensionMismatchError(AdaptiveLoadingError, ValueError):
    """Vetores/matrizes com dimensões incompatíveis."""


class NotPositiveDefiniteError(AdaptiveLoadingError, ValueError):
    """
    Fatoração de Cholesky encontrou pivô não positivo.
    Normalmente indica que nenhum (ou pouco) carregamento diagonal foi aplicado.
    """


class InvalidPsdError(AdaptiveLoadingError, ValueError):
    """Matriz marcada como PSD com diagonal negativa além da tolerância."""


class InfeasibleConstraintError(AdaptiveLoadingError, ValueError):
    """Piso de WNG impossível de garantir (fora de [1, M] ou kappa_max = 1)."""


class ShapeMismatchError(AdaptiveLoadingError, ValueError):
    """Trials com formatos diferentes na agregação do ensemble."""


class EigenDecompositionError(AdaptiveLoadingError, RuntimeError):
    """EVD não convergiu dentro do limite de sweeps."""

    def __init__(self, message: str, residual: float, sweeps: int):
        super().__init__(f"{message} (residual={residual:.3e}, sweeps={sweeps})")
        self.residual = residual
        self.sweeps = sweeps


class ConfigError(AdaptiveLoadingError, ValueError):
    """Configuração inválida; `field` traz o caminho do campo (ex: scenario.window_length)."""

    def __init__(self, message: str, field: Optional[str] = None):
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field
        self.reason = message

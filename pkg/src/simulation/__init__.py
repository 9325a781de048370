"""
Simulation Module - Cenário de Nascimento/Morte numa ULA
"""

from .scenario import ScenarioSimulator, steering_vector, true_ecm

__all__ = ["ScenarioSimulator", "steering_vector", "true_ecm"]

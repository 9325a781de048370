"""
ADAPTIVE LOADING - Carregamento Diagonal Adaptativo com Piso de WNG
"""

__version__ = "1.0.0"

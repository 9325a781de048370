"""
ADAPTIVE LOADING - Testes
"""

"""
LIM Benchmark v0
Simulador y optimizador para una estación base con antenas fluidas (FAS)
asistida por una metasuperficie líquida inteligente (LIM).
"""

__version__ = "0.1.0"

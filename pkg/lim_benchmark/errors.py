"""
Errores del benchmark.

Todos heredan de LimBenchmarkError para que la CLI pueda traducirlos a códigos
de salida sin capturar excepciones ajenas.
"""

from __future__ import annotations


class LimBenchmarkError(Exception):
    """Error base del paquete."""


class ConfigError(LimBenchmarkError, ValueError):
    """Configuración inválida. `field` nombra la clave culpable."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class GeometryError(LimBenchmarkError, ValueError):
    """Geometría degenerada (sitios coincidentes, usuarios fuera del disco)."""


class ModelError(LimBenchmarkError):
    """Matriz de correlación no semidefinida positiva."""


class SingularDirectionError(LimBenchmarkError):
    """Puntos coincidentes: el vector unitario de ∇R no está definido."""


class SylvesterError(LimBenchmarkError):
    """Sistema de Sylvester casi singular."""


class ProgramError(LimBenchmarkError, ValueError):
    """Programa cóncavo mal formado o punto inicial no estrictamente factible."""


class SubproblemError(LimBenchmarkError):
    """Fallo del solver dentro de un subproblema de optimización alternada."""

    def __init__(self, stage: str, status: str):
        super().__init__(f"subproblema '{stage}' terminó con estado '{status}'")
        self.stage = stage
        self.status = status


class ZeroForcingError(LimBenchmarkError):
    """Zero-forcing imposible: K > N o canal efectivo sin rango completo."""

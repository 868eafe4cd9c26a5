"""Vectores de apuntamiento de una apertura plana."""

from __future__ import annotations
import math

import numpy as np


def direction(azimuth: float, elevation: float) -> np.ndarray:
    """Vector de fase en el plano de la apertura: (sinφ cosϑ, sinφ sinϑ)."""
    s = math.sin(azimuth)
    return np.array([s * math.cos(elevation), s * math.sin(elevation)])


def steering_vector(
    positions: np.ndarray, azimuth: float, elevation: float, lambda_m: float
) -> np.ndarray:
    """
    Respuesta del array: [a]_n = exp(−j(2π/λ)(x_n sinφ cosϑ + y_n sinφ sinϑ)).

    Todas las entradas tienen módulo unidad.
    """
    positions = np.asarray(positions, dtype=float).reshape(-1, 2)
    phase = positions @ direction(azimuth, elevation)
    return np.exp(-1j * (2 * np.pi / lambda_m) * phase)


def steering_phase_rate(azimuth: float, elevation: float, lambda_m: float) -> np.ndarray:
    """∂[a]_n/∂(x_n, y_n) dividido por [a]_n: −j(2π/λ)·u."""
    return -1j * (2 * np.pi / lambda_m) * direction(azimuth, elevation)

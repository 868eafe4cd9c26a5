"""
Rejillas de posiciones dentro de una apertura plana.

Coordenadas locales: la apertura ocupa [0, ancho] x [0, alto] metros.
"""

from __future__ import annotations
import math

import numpy as np

# Margen relativo a cada lado para que la rejilla quede estrictamente dentro.
GRID_INSET = 1e-3


def grid_shape(count: int) -> tuple[int, int]:
    """(filas, columnas) de la rejilla para `count` puntos, orden fila-mayor."""
    cols = max(1, math.ceil(math.sqrt(count)))
    rows = max(1, math.ceil(count / cols))
    return rows, cols


def _axis(n: int, length: float) -> np.ndarray:
    if n == 1:
        return np.array([length / 2.0])
    inset = GRID_INSET * length
    return np.linspace(inset, length - inset, n)


def grid_spacing_sq(count: int, aperture: tuple[float, float]) -> float:
    """Distancia cuadrática mínima entre vecinos de `grid_positions`."""
    rows, cols = grid_shape(count)
    width, height = aperture
    steps = []
    if cols > 1:
        steps.append(width * (1 - 2 * GRID_INSET) / (cols - 1))
    if rows > 1:
        steps.append(height * (1 - 2 * GRID_INSET) / (rows - 1))
    if not steps:
        return math.inf
    return min(steps) ** 2


def grid_positions(count: int, aperture: tuple[float, float]) -> np.ndarray:
    """Rejilla rectangular uniforme que cubre la apertura. Devuelve (count, 2)."""
    rows, cols = grid_shape(count)
    xs = _axis(cols, aperture[0])
    ys = _axis(rows, aperture[1])
    points = [(x, y) for y in ys for x in xs]
    return np.array(points[:count], dtype=float)


def rigid_grid(count: int, aperture: tuple[float, float], spacing: float) -> np.ndarray:
    """
    Rejilla compacta centrada con paso fijo (array rígido convencional).

    Si no cabe en la apertura se usa `grid_positions`.
    """
    rows, cols = grid_shape(count)
    width, height = aperture
    usable_w = width * (1 - 2 * GRID_INSET)
    usable_h = height * (1 - 2 * GRID_INSET)
    if (cols - 1) * spacing > usable_w or (rows - 1) * spacing > usable_h:
        return grid_positions(count, aperture)
    xs = width / 2 + (np.arange(cols) - (cols - 1) / 2) * spacing
    ys = height / 2 + (np.arange(rows) - (rows - 1) / 2) * spacing
    points = [(x, y) for y in ys for x in xs]
    return np.array(points[:count], dtype=float)


def pairwise_sq_distances(points: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - points[None, :, :]
    return np.sum(diff * diff, axis=-1)


def min_spacing_sq(points: np.ndarray) -> float:
    if len(points) < 2:
        return math.inf
    d2 = pairwise_sq_distances(points)
    iu = np.triu_indices(len(points), k=1)
    return float(d2[iu].min())

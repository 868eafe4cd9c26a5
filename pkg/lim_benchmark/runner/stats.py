"""
Agregación por (punto de barrido, esquema).
"""

from __future__ import annotations
import math
from dataclasses import dataclass, field

import numpy as np


@dataclass
class SchemeStats:
    """Muestras de un esquema en un punto de barrido."""
    rates: list[float] = field(default_factory=list)
    iterations: list[int] = field(default_factory=list)
    millis: list[float] = field(default_factory=list)

    @property
    def drops(self) -> int:
        return len(self.rates)

    @property
    def mean_rate(self) -> float:
        return float(np.mean(self.rates)) if self.rates else math.nan

    @property
    def std_rate(self) -> float:
        """Desviación típica poblacional (>= 0)."""
        return float(np.std(self.rates)) if self.rates else math.nan

    @property
    def mean_iters(self) -> float:
        return float(np.mean(self.iterations)) if self.iterations else math.nan

    @property
    def mean_ms(self) -> float:
        return float(np.mean(self.millis)) if self.millis else math.nan


@dataclass(frozen=True)
class ResultRow:
    sweep: float
    scheme: str
    mean_rate_bps_hz: float
    std_rate: float
    drops: int
    mean_iters: float
    mean_ms: float

    def to_dict(self) -> dict:
        return {
            "sweep": self.sweep,
            "scheme": self.scheme,
            "mean_rate_bps_hz": self.mean_rate_bps_hz,
            "std_rate": self.std_rate,
            "drops": self.drops,
            "mean_iters": self.mean_iters,
            "mean_ms": self.mean_ms,
        }


class StatsTable:
    """
    Acumula muestras por (barrido, esquema). Las muestras se guardan con su
    índice de drop y se ordenan al agregar, de modo que el resultado no
    depende del orden de llegada.
    """

    def __init__(self, record_timing: bool = False):
        self.record_timing = record_timing
        self._samples: dict[tuple[float, str], list[tuple[int, float, int, float]]] = {}

    def record(self, sweep: float, scheme: str, drop: int, rate: float, iterations: int, ms: float) -> None:
        self._samples.setdefault((sweep, scheme), []).append((drop, rate, iterations, ms))

    def ensure(self, sweep: float, scheme: str) -> None:
        """Crea la fila aunque todos los drops del esquema fallen."""
        self._samples.setdefault((sweep, scheme), [])

    def get_stats(self, sweep: float, scheme: str) -> SchemeStats:
        stats = SchemeStats()
        for _, rate, iterations, ms in sorted(self._samples.get((sweep, scheme), [])):
            stats.rates.append(rate)
            stats.iterations.append(iterations)
            stats.millis.append(ms if self.record_timing else 0.0)
        return stats

    def rows(self, scheme_order: list[str] | None = None) -> list[ResultRow]:
        """Filas ordenadas por barrido y después por esquema."""
        order = {name: i for i, name in enumerate(scheme_order or [])}
        keys = sorted(self._samples, key=lambda k: (k[0], order.get(k[1], len(order)), k[1]))
        rows = []
        for sweep, scheme in keys:
            s = self.get_stats(sweep, scheme)
            rows.append(ResultRow(
                sweep=sweep,
                scheme=scheme,
                mean_rate_bps_hz=s.mean_rate,
                std_rate=s.std_rate,
                drops=s.drops,
                mean_iters=s.mean_iters,
                mean_ms=s.mean_ms,
            ))
        return rows

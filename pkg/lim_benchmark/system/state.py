"""
Estado de solución: los cuatro bloques de decisión (w, θ, p, r).
"""

from __future__ import annotations
import dataclasses
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from lim_benchmark.system.config import SystemConfig
from lim_benchmark.system.layout import grid_positions, min_spacing_sq

if TYPE_CHECKING:
    from lim_benchmark.channel.realization import ChannelRealization
    from lim_benchmark.system.geometry import LinkGeometry


@dataclass(frozen=True)
class FeasibilityReport:
    """Excesos sobre cada restricción; todo <= 0 significa factible."""
    power_excess: float
    spacing_deficit_fa: float
    spacing_deficit_lm: float
    aperture_excess: float
    unit_modulus_violation: float

    def worst(self) -> float:
        return max(self.power_excess, self.spacing_deficit_fa,
                   self.spacing_deficit_lm, self.aperture_excess)

    def ok(self, tol: float = 1e-8, phase_tol: float | None = None) -> bool:
        if self.worst() > tol:
            return False
        if phase_tol is not None and self.unit_modulus_violation > phase_tol:
            return False
        return True


@dataclass(frozen=True)
class SolutionState:
    """
    w: (K, N) complejo, fila k = beamformer del usuario k.
    theta: (M,) complejo.
    p: (N, 2) y r: (M, 2) en coordenadas locales de la apertura.
    """
    w: np.ndarray
    theta: np.ndarray
    p: np.ndarray
    r: np.ndarray

    def replace(self, **changes) -> SolutionState:
        return dataclasses.replace(self, **changes)

    def total_power(self) -> float:
        return float(np.sum(np.abs(self.w) ** 2))

    def min_spacing_sq(self) -> tuple[float, float]:
        return min_spacing_sq(self.p), min_spacing_sq(self.r)

    def unit_modulus_violation(self) -> float:
        if self.theta.size == 0:
            return 0.0
        return float(np.max(np.abs(np.abs(self.theta) - 1.0)))

    def project_unit_modulus(self) -> SolutionState:
        """θ_m / |θ_m|; los θ nulos pasan a 1."""
        mag = np.abs(self.theta)
        theta = np.where(mag > 0, self.theta / np.where(mag > 0, mag, 1.0), 1.0 + 0j)
        return self.replace(theta=theta)

    def feasibility_report(self, cfg: SystemConfig) -> FeasibilityReport:
        sp_fa, sp_lm = self.min_spacing_sq()
        return FeasibilityReport(
            power_excess=self.total_power() - cfg.pmax,
            spacing_deficit_fa=0.0 if math.isinf(sp_fa) else cfg.dth_fa - sp_fa,
            spacing_deficit_lm=0.0 if math.isinf(sp_lm) else cfg.dth_lm - sp_lm,
            aperture_excess=max(
                _aperture_excess(self.p, cfg.aperture_fa),
                _aperture_excess(self.r, cfg.aperture_lm),
            ),
            unit_modulus_violation=self.unit_modulus_violation(),
        )

    def to_dict(self) -> dict:
        return {
            "w": [[[z.real, z.imag] for z in row] for row in self.w],
            "theta": [[z.real, z.imag] for z in self.theta],
            "p": self.p.tolist(),
            "r": self.r.tolist(),
        }


def _aperture_excess(points: np.ndarray, aperture: tuple[float, float]) -> float:
    if len(points) == 0:
        return 0.0
    upper = np.asarray(aperture)
    return float(max(np.max(-points), np.max(points - upper)))


def initial_layout(cfg: SystemConfig) -> SolutionState:
    """Posiciones en rejilla, θ = 1 y beamformers nulos (antes de sortear el canal)."""
    return SolutionState(
        w=np.zeros((cfg.n_users, cfg.n_antennas), dtype=complex),
        theta=np.ones(cfg.n_elements, dtype=complex),
        p=grid_positions(cfg.n_antennas, cfg.aperture_fa),
        r=grid_positions(cfg.n_elements, cfg.aperture_lm),
    )


def matched_filter(h_eff: np.ndarray, power: float) -> np.ndarray:
    """Filtro adaptado con reparto igual de potencia: √(P/K)·(h_k^eff)^H/‖h_k^eff‖."""
    n_users, n_antennas = h_eff.shape
    w = np.conj(h_eff).astype(complex)
    norms = np.linalg.norm(w, axis=1)
    for k in range(n_users):
        if norms[k] > 0:
            w[k] /= norms[k]
        else:
            w[k] = 1.0 / math.sqrt(n_antennas)
    return math.sqrt(power / n_users) * w


def init_solution(
    cfg: SystemConfig, geo: LinkGeometry, chan: ChannelRealization
) -> SolutionState:
    """
    Solución inicial determinista: las posiciones del canal (rejilla), θ = 1 y
    filtro adaptado a potencia máxima.
    """
    from lim_benchmark.channel.realization import effective_channel_for

    theta = np.ones(cfg.n_elements, dtype=complex)
    h_eff = effective_channel_for(chan, theta)
    return SolutionState(
        w=matched_filter(h_eff, cfg.pmax),
        theta=theta,
        p=np.array(chan.p, dtype=float),
        r=np.array(chan.r, dtype=float),
    )

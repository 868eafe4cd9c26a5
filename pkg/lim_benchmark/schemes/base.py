"""
Base Scheme - Contrato común para todos los esquemas comparados.
"""

from __future__ import annotations
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field

import numpy as np

from lim_benchmark.channel.realization import (
    ChannelRealization,
    assemble_at,
    effective_channel_for,
    sum_rate,
)
from lim_benchmark.errors import ConfigError
from lim_benchmark.optim.alternating import AOBlocks, AOTrace, alternating_optimize
from lim_benchmark.system.config import SystemConfig
from lim_benchmark.system.geometry import LinkGeometry
from lim_benchmark.system.layout import rigid_grid
from lim_benchmark.system.state import SolutionState, init_solution, matched_filter

SCHEME_KINDS = (
    "proposed",
    "wo_bf",
    "wo_theta",
    "wo_fa",
    "wo_lim",
    "rigid_bs_ris",
    "lim_bs",
    "ris_fas",
    "partial_fa",
    "partial_lm",
    "partial_both",
    "zf",
    "ga",
    "random",
)


@dataclass(frozen=True)
class BaselineSpec:
    """Esquema a ejecutar y sus parámetros de configurabilidad parcial."""
    kind: str
    rho_fa: float = 1.0
    rho_lm: float = 1.0
    ga_budget: int = 256

    def __post_init__(self):
        if self.kind not in SCHEME_KINDS:
            raise ConfigError("kind", f"esquema desconocido '{self.kind}'. Opciones: {list(SCHEME_KINDS)}")
        for name in ("rho_fa", "rho_lm"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(name, "debe estar en [0, 1]")
        if self.ga_budget < 0:
            raise ConfigError("ga_budget", "no puede ser negativo")


@dataclass
class SchemeOutcome:
    """Resultado de un esquema sobre un drop."""
    scheme: str
    sol: SolutionState
    sum_rate: float
    iterations: int = 0
    trace: AOTrace | None = None
    flags: set[str] = field(default_factory=set)


class BaseScheme(ABC):
    """
    Clase base abstracta para todos los esquemas.

    Un esquema recibe la realización de canal de un drop (en las posiciones
    de rejilla) y devuelve una solución factible con su tasa suma.
    """

    def __init__(self, spec: BaselineSpec):
        self.spec = spec

    @abstractmethod
    def run(
        self,
        cfg: SystemConfig,
        geo: LinkGeometry,
        chan: ChannelRealization,
        rng: np.random.Generator,
    ) -> SchemeOutcome:
        """
        Ejecuta el esquema.

        Args:
            chan: canal del drop en las posiciones iniciales; su sorteo de
                pequeña escala se reutiliza si el esquema mueve posiciones.
            rng: flujo propio del esquema para sus decisiones aleatorias.
        """
        pass

    @property
    def name(self) -> str:
        return self.spec.kind


def rigid_spacing(cfg: SystemConfig, dth: float) -> float:
    """Paso del array rígido: λ/2, ampliado si no respeta la separación mínima."""
    return max(cfg.lambda_m / 2.0, math.sqrt(dth) * (1.0 + 1e-3))


def rigid_positions(cfg: SystemConfig) -> tuple[np.ndarray, np.ndarray]:
    p = rigid_grid(cfg.n_antennas, cfg.aperture_fa, rigid_spacing(cfg, cfg.dth_fa))
    r = rigid_grid(cfg.n_elements, cfg.aperture_lm, rigid_spacing(cfg, cfg.dth_lm))
    return p, r


def random_unit_phases(rng: np.random.Generator, m: int) -> np.ndarray:
    return np.exp(1j * 2 * np.pi * rng.random(m))


def random_beamformers(rng: np.random.Generator, k: int, n: int, power: float) -> np.ndarray:
    """Gaussianos complejos escalados a potencia total `power`."""
    w = (rng.standard_normal((k, n)) + 1j * rng.standard_normal((k, n))) / math.sqrt(2.0)
    return w * math.sqrt(power / float(np.sum(np.abs(w) ** 2)))


def start_state(
    cfg: SystemConfig,
    geo: LinkGeometry,
    chan: ChannelRealization,
    p: np.ndarray | None = None,
    r: np.ndarray | None = None,
    theta: np.ndarray | None = None,
) -> tuple[SolutionState, ChannelRealization]:
    """Estado inicial con filtro adaptado para las posiciones y fases dadas."""
    if p is None and r is None and theta is None:
        return init_solution(cfg, geo, chan), chan
    p = chan.p if p is None else p
    r = chan.r if r is None else r
    theta = np.ones(cfg.n_elements, dtype=complex) if theta is None else theta
    moved = assemble_at(cfg, geo, p, r, chan.draw)
    w = matched_filter(effective_channel_for(moved, theta), cfg.pmax)
    return SolutionState(w=w, theta=theta, p=moved.p.copy(), r=moved.r.copy()), moved


class AOScheme(BaseScheme):
    """
    Esquema basado en la optimización alternada. Las variantes solo cambian
    el punto de partida y los bloques congelados.
    """

    def initial_state(self, cfg, geo, chan, rng) -> tuple[SolutionState, ChannelRealization]:
        return start_state(cfg, geo, chan)

    def blocks(self, cfg: SystemConfig) -> AOBlocks:
        return AOBlocks()

    def run(self, cfg, geo, chan, rng) -> SchemeOutcome:
        sol0, chan0 = self.initial_state(cfg, geo, chan, rng)
        sol, trace = alternating_optimize(cfg, geo, chan0, sol0, self.blocks(cfg))
        final_chan = assemble_at(cfg, geo, sol.p, sol.r, chan.draw)
        return SchemeOutcome(
            scheme=self.name,
            sol=sol,
            sum_rate=sum_rate(final_chan, sol),
            iterations=trace.iterations,
            trace=trace,
            flags={"failed"} if trace.failed else set(),
        )


class ProposedScheme(AOScheme):
    """Optimización conjunta de w, θ, p y r."""

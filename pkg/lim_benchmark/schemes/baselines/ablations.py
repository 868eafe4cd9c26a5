"""
Ablaciones: el mismo bucle alternado con algún bloque aleatorio o congelado.
"""

from __future__ import annotations
import math

import numpy as np

from lim_benchmark.channel.realization import sum_rate
from lim_benchmark.optim.alternating import AOBlocks
from lim_benchmark.schemes.base import (
    AOScheme,
    BaseScheme,
    SchemeOutcome,
    random_beamformers,
    random_unit_phases,
    rigid_positions,
    start_state,
)
from lim_benchmark.system.state import SolutionState


class WithoutBeamforming(AOScheme):
    """w gaussiano aleatorio a potencia máxima, congelado."""

    def initial_state(self, cfg, geo, chan, rng):
        sol, chan0 = start_state(cfg, geo, chan)
        w = random_beamformers(rng, cfg.n_users, cfg.n_antennas, cfg.pmax)
        return sol.replace(w=w), chan0

    def blocks(self, cfg):
        return AOBlocks(beamforming=False)


class WithoutPhaseShifts(AOScheme):
    """θ de módulo unidad y fase uniforme, congelado."""

    def initial_state(self, cfg, geo, chan, rng):
        return start_state(cfg, geo, chan, theta=random_unit_phases(rng, cfg.n_elements))

    def blocks(self, cfg):
        return AOBlocks(phases=False)


class WithoutFluidAntennas(AOScheme):
    """Antenas fijas en la rejilla inicial; la LIM sigue siendo líquida."""

    def blocks(self, cfg):
        return AOBlocks(movable_antennas=())


class WithoutLim(AOScheme):
    """Sin trayecto reflejado (θ = 0) y sin mover nada: solo beamforming."""

    def initial_state(self, cfg, geo, chan, rng):
        return start_state(cfg, geo, chan, theta=np.zeros(cfg.n_elements, dtype=complex))

    def blocks(self, cfg):
        return AOBlocks(phases=False, movable_antennas=(), movable_elements=())


class RigidArrays(AOScheme):
    """Array y superficie rígidos (RIS-BS): w y θ optimizados."""

    def initial_state(self, cfg, geo, chan, rng):
        p, r = rigid_positions(cfg)
        return start_state(cfg, geo, chan, p=p, r=r)

    def blocks(self, cfg):
        return AOBlocks(movable_antennas=(), movable_elements=())


class LiquidSurfaceRigidArray(AOScheme):
    """LIM-BS: superficie líquida con array rígido en la estación base."""

    def initial_state(self, cfg, geo, chan, rng):
        p, _ = rigid_positions(cfg)
        return start_state(cfg, geo, chan, p=p)

    def blocks(self, cfg):
        return AOBlocks(movable_antennas=())


class StaticSurfaceFluidArray(AOScheme):
    """RIS-FAS: superficie estática con antenas fluidas."""

    def initial_state(self, cfg, geo, chan, rng):
        _, r = rigid_positions(cfg)
        return start_state(cfg, geo, chan, r=r)

    def blocks(self, cfg):
        return AOBlocks(movable_elements=())


def movable_prefix(count: int, rho: float) -> tuple[int, ...]:
    """Los primeros ⌈ρ·count⌉ índices en orden fila-mayor."""
    return tuple(range(min(count, math.ceil(rho * count - 1e-12))))


class PartialConfigurability(AOScheme):
    """
    Solo una fracción de antenas / elementos es reconfigurable; el resto
    queda en la rejilla rígida desde la que parte todo.
    """

    def initial_state(self, cfg, geo, chan, rng):
        p, r = rigid_positions(cfg)
        return start_state(cfg, geo, chan, p=p, r=r)

    def blocks(self, cfg):
        return AOBlocks(
            movable_antennas=movable_prefix(cfg.n_antennas, self.spec.rho_fa),
            movable_elements=movable_prefix(cfg.n_elements, self.spec.rho_lm),
        )


class RandomScheme(BaseScheme):
    """
    Referencia mínima: w y θ aleatorios en la rejilla inicial, sin optimizar.
    """

    def run(self, cfg, geo, chan, rng) -> SchemeOutcome:
        sol = SolutionState(
            w=random_beamformers(rng, cfg.n_users, cfg.n_antennas, cfg.pmax),
            theta=random_unit_phases(rng, cfg.n_elements),
            p=chan.p.copy(),
            r=chan.r.copy(),
        )
        return SchemeOutcome(scheme=self.name, sol=sol, sum_rate=sum_rate(chan, sol))

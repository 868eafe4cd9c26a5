"""
Experiment Runner - Drops de Monte Carlo y barridos de parámetros.
"""

from __future__ import annotations
import dataclasses
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from lim_benchmark.channel.realization import assemble_channels, draw_small_scale
from lim_benchmark.errors import ConfigError
from lim_benchmark.optim.alternating import AOTrace
from lim_benchmark.schemes.base import SCHEME_KINDS, SchemeOutcome
from lim_benchmark.schemes.registry import run_scheme, spec_for
from lim_benchmark.system.config import SystemConfig
from lim_benchmark.system.geometry import derive_link_geometry, draw_user_positions
from lim_benchmark.system.state import initial_layout
from .guard import SchemeGuard
from .stats import ResultRow, StatsTable

logger = logging.getLogger(__name__)

EXPERIMENT_KINDS = ("convergence", "sweep_nm", "sweep_k", "sweep_power")

DEFAULT_SWEEPS = {
    "sweep_nm": (4.0, 8.0, 12.0, 16.0),
    "sweep_k": (2.0, 4.0, 6.0, 8.0),
    "sweep_power": (10.0, 20.0, 30.0, 40.0),
}


@dataclass(frozen=True)
class ExperimentPlan:
    """Qué se ejecuta: tipo de experimento, drops, valores de barrido y esquemas."""
    kind: str = "convergence"
    drops: int = 20
    sweep_values: tuple[float, ...] = ()
    schemes: tuple[str, ...] = ("proposed",)
    correlation: bool = True
    partial_fraction: float = 0.5
    ga_budget: int = 256
    record_timing: bool = False
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.kind not in EXPERIMENT_KINDS:
            raise ConfigError("experiment", f"experimento desconocido '{self.kind}'. Opciones: {list(EXPERIMENT_KINDS)}")
        if self.drops < 1:
            raise ConfigError("drops", "debe ser >= 1")
        if not self.schemes:
            raise ConfigError("schemes", "la lista de esquemas está vacía")
        for name in self.schemes:
            if name not in SCHEME_KINDS:
                raise ConfigError("schemes", f"esquema desconocido '{name}'. Opciones: {list(SCHEME_KINDS)}")
        if self.kind != "convergence" and not self.resolved_sweep():
            raise ConfigError("sweep", "sin valores de barrido")
        if not 0.0 <= self.partial_fraction <= 1.0:
            raise ConfigError("partial_fraction", "debe estar en [0, 1]")
        if self.workers < 1:
            raise ConfigError("workers", "debe ser >= 1")

    def resolved_sweep(self) -> tuple[float, ...]:
        if self.sweep_values:
            return tuple(float(v) for v in self.sweep_values)
        return DEFAULT_SWEEPS.get(self.kind, ())


def config_for_point(cfg: SystemConfig, kind: str, value: float) -> SystemConfig:
    """Configuración en un punto de barrido (valida de nuevo el empaquetado)."""
    if kind == "sweep_nm":
        return dataclasses.replace(cfg, n_antennas=int(value), n_elements=int(value))
    if kind == "sweep_k":
        return dataclasses.replace(cfg, n_users=int(value))
    if kind == "sweep_power":
        return dataclasses.replace(cfg, pmax_dbm=float(value))
    return cfg


@dataclass
class DropRecord:
    sweep: float
    drop: int
    scheme: str
    outcome: SchemeOutcome | None
    ms: float


@dataclass
class ExperimentResult:
    plan: ExperimentPlan
    rows: list[ResultRow]
    traces: dict[tuple[str, int], AOTrace] = field(default_factory=dict)
    failures: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "plan": dataclasses.asdict(self.plan),
            "rows": [r.to_dict() for r in self.rows],
            "traces": {
                f"{scheme}:{drop}": [rec.to_dict() for rec in trace.records]
                for (scheme, drop), trace in sorted(self.traces.items())
            },
            "failures": self.failures,
        }


class ExperimentRunner:
    """
    Ejecutor de experimentos por drops emparejados: en cada drop todos los
    esquemas ven exactamente el mismo canal.
    """

    def __init__(self, plan: ExperimentPlan):
        self.plan = plan
        self.guard = SchemeGuard()

    def drop_rng(self, drop: int) -> np.random.Generator:
        """Flujo del drop; compartido entre puntos de barrido."""
        return np.random.default_rng([self.plan.seed, drop])

    def scheme_rng(self, drop: int, scheme: str) -> np.random.Generator:
        return np.random.default_rng([self.plan.seed, drop, 1 + SCHEME_KINDS.index(scheme)])

    def run_drop(self, cfg: SystemConfig, sweep: float, drop: int) -> list[DropRecord]:
        """
        Ejecuta todos los esquemas en un drop.

        Returns:
            Un registro por esquema; `outcome` es None si el esquema falló.
        """
        rng = self.drop_rng(drop)
        users = draw_user_positions(cfg, rng)
        geo = derive_link_geometry(cfg, users)
        draw = draw_small_scale(cfg, rng)
        chan = assemble_channels(cfg, geo, initial_layout(cfg), draw)

        records = []
        for name in self.plan.schemes:
            spec = spec_for(name, self.plan.partial_fraction, self.plan.ga_budget)
            outcome, ok, ms = self.guard.timed_call(
                name, run_scheme, spec, cfg, geo, chan, self.scheme_rng(drop, name),
                drop=drop, sweep=sweep,
            )
            if ok and "failed" in outcome.flags:
                self.guard.record(name, drop, sweep, "flagged", outcome.trace.failure if outcome.trace else "")
            records.append(DropRecord(sweep, drop, name, outcome if ok else None, ms))
        return records

    def run(self, cfg: SystemConfig) -> ExperimentResult:
        """
        Ejecuta el plan completo.

        Raises:
            ConfigError: algún punto de barrido da una configuración inválida.
        """
        plan = self.plan
        cfg = dataclasses.replace(cfg, correlation=plan.correlation)
        if plan.kind == "convergence":
            points = [(float(cfg.n_antennas), cfg)]
        else:
            points = [(v, config_for_point(cfg, plan.kind, v)) for v in plan.resolved_sweep()]

        tasks = [(sweep, point_cfg, drop) for sweep, point_cfg in points for drop in range(plan.drops)]
        logger.info("experimento %s: %d puntos x %d drops x %d esquemas",
                    plan.kind, len(points), plan.drops, len(plan.schemes))

        if plan.workers > 1:
            with ThreadPoolExecutor(max_workers=plan.workers) as pool:
                batches = list(pool.map(lambda t: self.run_drop(t[1], t[0], t[2]), tasks))
        else:
            batches = [self.run_drop(point_cfg, sweep, drop) for sweep, point_cfg, drop in tasks]

        table = StatsTable(record_timing=plan.record_timing)
        traces: dict[tuple[str, int], AOTrace] = {}
        for batch in batches:
            for rec in batch:
                table.ensure(rec.sweep, rec.scheme)
                if rec.outcome is None:
                    continue
                table.record(rec.sweep, rec.scheme, rec.drop, rec.outcome.sum_rate, rec.outcome.iterations, rec.ms)
                if plan.kind == "convergence" and rec.outcome.trace is not None:
                    traces[(rec.scheme, rec.drop)] = rec.outcome.trace

        return ExperimentResult(
            plan=plan,
            rows=table.rows(list(plan.schemes)),
            traces=traces,
            failures=self.guard.to_dict(),
        )

    def save_results(self, result: ExperimentResult, path: str | Path) -> None:
        """Guarda el resultado completo en JSON."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as f:
            json.dump(result.to_dict(), f, indent=2)


def run_experiment(plan: ExperimentPlan, cfg: SystemConfig) -> ExperimentResult:
    return ExperimentRunner(plan).run(cfg)

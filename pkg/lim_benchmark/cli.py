"""
CLI - Interfaz de línea de comandos para el benchmark.
"""

from __future__ import annotations
import argparse
import dataclasses
import logging
import sys
from pathlib import Path

from lim_benchmark.errors import ConfigError, GeometryError
from lim_benchmark.exporter import emit_results
from lim_benchmark.runner.runner import ExperimentPlan, ExperimentRunner
from lim_benchmark.schemes.base import SCHEME_KINDS
from lim_benchmark.system.config import SystemConfig, desk_scale, load_config

logger = logging.getLogger(__name__)

EXPERIMENTS = {
    "convergence": "convergence",
    "sweep-nm": "sweep_nm",
    "sweep-k": "sweep_k",
    "sweep-power": "sweep_power",
}

RESULTS_JSON = "results.json"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def parse_list(text: str | None, cast=str) -> tuple:
    if not text:
        return ()
    try:
        return tuple(cast(item.strip()) for item in text.split(",") if item.strip())
    except ValueError as e:
        raise ConfigError("sweep", f"valor no numérico: {e}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lim-benchmark",
        description="Simulador y optimizador FAS + LIM: experimentos de tasa suma",
    )
    parser.add_argument("--config", "-c", help="Archivo TOML de escenario (por defecto: escala de escritorio)")
    parser.add_argument("--experiment", "-e", default="convergence", choices=list(EXPERIMENTS))
    parser.add_argument("--drops", "-d", type=int, default=20, help="Drops de Monte Carlo por punto")
    parser.add_argument("--seed", "-s", type=int, default=None, help="Semilla maestra (por defecto la del config)")
    parser.add_argument("--out", "-o", default="results", help="Directorio de salida")
    parser.add_argument("--schemes", default="proposed",
                        help=f"Esquemas separados por coma. Opciones: {','.join(SCHEME_KINDS)}")
    parser.add_argument("--correlation", choices=["on", "off"], default=None,
                        help="Correlación espacial de Jakes (por defecto la del config)")
    parser.add_argument("--workers", "-w", type=int, default=None, help="Drops en paralelo")
    parser.add_argument("--sweep", default=None, help="Valores de barrido separados por coma")
    parser.add_argument("--partial-fraction", dest="partial_fraction", type=float, default=0.5,
                        help="Fracción ρ de elementos móviles en los esquemas parciales")
    parser.add_argument("--ga-budget", dest="ga_budget", type=int, default=256,
                        help="Evaluaciones de la tasa suma para el esquema ga")
    parser.add_argument("--timing", action="store_true", help="Escribir tiempos reales en las columnas ms")
    parser.add_argument("--verbose", "-v", action="store_true")
    return parser


def plan_from_args(args: argparse.Namespace, cfg: SystemConfig) -> ExperimentPlan:
    correlation = cfg.correlation if args.correlation is None else args.correlation == "on"
    return ExperimentPlan(
        kind=EXPERIMENTS[args.experiment],
        drops=args.drops,
        sweep_values=parse_list(args.sweep, float),
        schemes=parse_list(args.schemes) or ("proposed",),
        correlation=correlation,
        partial_fraction=args.partial_fraction,
        ga_budget=args.ga_budget,
        record_timing=args.timing,
        seed=cfg.seed if args.seed is None else args.seed,
        workers=cfg.workers if args.workers is None else args.workers,
    )


def print_summary(plan: ExperimentPlan, result, paths) -> None:
    print(f"\n{'='*50}")
    print(f"EXPERIMENTO - {plan.kind.upper()}")
    print(f"{'='*50}")
    print(f"Drops: {plan.drops} | Seed: {plan.seed} | Correlación: {'on' if plan.correlation else 'off'}")
    print("-"*50)
    for row in result.rows:
        print(f"{row.sweep:>8g}  {row.scheme:<14} {row.mean_rate_bps_hz:10.4f} bps/Hz "
              f"(± {row.std_rate:.4f}, {row.drops} drops, {row.mean_iters:.1f} it)")
    failures = result.failures.get("failures", [])
    if failures:
        print(f"\nFallos registrados: {len(failures)}")
    print(f"\nResultados guardados en: {paths[0].parent}")


def run(args: argparse.Namespace) -> int:
    cfg = load_config(args.config) if args.config else desk_scale()
    plan = plan_from_args(args, cfg)
    if plan.seed != cfg.seed:
        cfg = dataclasses.replace(cfg, seed=plan.seed)

    runner = ExperimentRunner(plan)
    result = runner.run(cfg)
    paths = emit_results(result, args.out)
    json_path = Path(args.out) / RESULTS_JSON
    runner.save_results(result, json_path)
    paths.append(json_path)
    print_summary(plan, result, paths)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_CONFIG

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )

    try:
        return run(args)
    except (ConfigError, GeometryError) as e:
        print(f"Error de configuración: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as e:
        logger.exception("fallo durante el experimento")
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())

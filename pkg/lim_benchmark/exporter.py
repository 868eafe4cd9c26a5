"""
Módulo para exportar resultados de experimentos a CSV.
"""

from __future__ import annotations
import csv
import math
from pathlib import Path

from lim_benchmark.optim.alternating import AOTrace
from lim_benchmark.runner.runner import ExperimentResult
from lim_benchmark.runner.stats import ResultRow

RESULTS_HEADER = ["sweep", "scheme", "mean_rate_bps_hz", "std_rate", "drops", "mean_iters", "mean_ms"]
TRACE_HEADER = ["iter", "stage", "sum_rate", "penalty", "violation", "ms"]


def fmt(x: float) -> str:
    """6 cifras significativas."""
    return f"{x:.6g}"


def write_results_csv(rows: list[ResultRow], path: Path) -> Path:
    try:
        with open(path, "w", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(RESULTS_HEADER)
            for row in rows:
                writer.writerow([
                    fmt(row.sweep),
                    row.scheme,
                    fmt(row.mean_rate_bps_hz),
                    fmt(row.std_rate),
                    row.drops,
                    fmt(row.mean_iters),
                    fmt(row.mean_ms),
                ])
    except OSError as e:
        raise OSError(f"no se pudo escribir {path}: {e}") from e
    return path


def write_trace_csv(trace: AOTrace, path: Path, record_timing: bool = False) -> Path:
    try:
        with open(path, "w", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(TRACE_HEADER)
            for rec in trace.records:
                writer.writerow([
                    rec.iteration,
                    rec.stage,
                    fmt(rec.sum_rate),
                    fmt(rec.penalty),
                    fmt(rec.violation),
                    fmt(rec.ms if record_timing else 0.0),
                ])
    except OSError as e:
        raise OSError(f"no se pudo escribir {path}: {e}") from e
    return path


def emit_results(result: ExperimentResult, out_dir: str | Path) -> list[Path]:
    """
    Escribe results.csv y, para experimentos de convergencia, un
    trace_<esquema>_drop<d>.csv por ejecución.

    Returns:
        Rutas escritas, results.csv primero.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    paths = [write_results_csv(result.rows, out_dir / "results.csv")]
    for (scheme, drop), trace in sorted(result.traces.items()):
        paths.append(write_trace_csv(
            trace, out_dir / f"trace_{scheme}_drop{drop}.csv", result.plan.record_timing,
        ))
    return paths


def read_results(path: str | Path) -> list[ResultRow]:
    """Lee de vuelta un results.csv."""
    rows = []
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames != RESULTS_HEADER:
            raise ValueError(f"{path}: cabecera inesperada {reader.fieldnames}")
        for rec in reader:
            rows.append(ResultRow(
                sweep=float(rec["sweep"]),
                scheme=rec["scheme"],
                mean_rate_bps_hz=float(rec["mean_rate_bps_hz"]),
                std_rate=float(rec["std_rate"]),
                drops=int(rec["drops"]),
                mean_iters=float(rec["mean_iters"]),
                mean_ms=float(rec["mean_ms"]),
            ))
    return rows


def rows_match(a: list[ResultRow], b: list[ResultRow], rel: float = 1e-5) -> bool:
    """Compara filas hasta 6 cifras significativas (NaN == NaN)."""
    if len(a) != len(b):
        return False
    for x, y in zip(a, b):
        if (x.scheme, x.drops) != (y.scheme, y.drops):
            return False
        for u, v in (
            (x.sweep, y.sweep),
            (x.mean_rate_bps_hz, y.mean_rate_bps_hz),
            (x.std_rate, y.std_rate),
            (x.mean_iters, y.mean_iters),
            (x.mean_ms, y.mean_ms),
        ):
            if math.isnan(u) and math.isnan(v):
                continue
            if not math.isclose(u, v, rel_tol=rel, abs_tol=1e-12):
                return False
    return True

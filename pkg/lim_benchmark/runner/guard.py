"""
Guarda de ejecución.
Mide el tiempo de cada esquema y registra sus fallos sin abortar el experimento.
"""

from __future__ import annotations
import logging
import threading
import time
from dataclasses import dataclass
from typing import Any, Callable

logger = logging.getLogger(__name__)


@dataclass
class FailureRecord:
    """Registro de un esquema que falló en un drop."""
    scheme: str
    drop: int
    sweep: float
    failure_type: str  # "exception", "flagged"
    details: str = ""


class SchemeGuard:
    """
    Ejecuta esquemas capturando excepciones.

    Es seguro compartirla entre hilos.
    """

    def __init__(self):
        self.failures: list[FailureRecord] = []
        self.failure_count: dict[str, int] = {}
        self._lock = threading.Lock()

    def reset(self) -> None:
        """Reinicia el registro de fallos."""
        with self._lock:
            self.failures = []
            self.failure_count = {}

    def timed_call(
        self,
        scheme: str,
        func: Callable,
        *args,
        drop: int = 0,
        sweep: float = 0.0,
        **kwargs,
    ) -> tuple[Any, bool, float]:
        """
        Ejecuta una función midiendo su duración.

        Returns:
            (resultado, éxito, milisegundos). Si la función lanza, el
            resultado es None y el fallo queda registrado.
        """
        start = time.perf_counter()
        try:
            result = func(*args, **kwargs)
            return result, True, (time.perf_counter() - start) * 1000
        except Exception as e:
            elapsed_ms = (time.perf_counter() - start) * 1000
            logger.warning("esquema %s falló en el drop %d: %s", scheme, drop, e)
            self.record(scheme, drop, sweep, "exception", f"{type(e).__name__}: {e}")
            return None, False, elapsed_ms

    def record(self, scheme: str, drop: int, sweep: float, failure_type: str, details: str) -> None:
        with self._lock:
            self.failures.append(FailureRecord(scheme, drop, sweep, failure_type, details))
            self.failure_count[scheme] = self.failure_count.get(scheme, 0) + 1

    def get_failures(self, scheme: str | None = None) -> list[FailureRecord]:
        """Fallos, opcionalmente filtrados por esquema, en orden determinista."""
        items = sorted(self.failures, key=lambda f: (f.sweep, f.scheme, f.drop, f.failure_type))
        if scheme is None:
            return items
        return [f for f in items if f.scheme == scheme]

    def to_dict(self) -> dict:
        return {
            "failures": [
                {
                    "scheme": f.scheme,
                    "drop": f.drop,
                    "sweep": f.sweep,
                    "type": f.failure_type,
                    "details": f.details,
                }
                for f in self.get_failures()
            ],
            "failure_counts": dict(sorted(self.failure_count.items())),
        }

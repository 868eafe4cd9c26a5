"""
Forma canónica de los subproblemas cóncavos.

    maximizar   Σ κ_i log(1 + s_i x_{j_i}) + cᵀx
    sujeto a    a_lᵀ x <= b_l
                xᵀ Q_q x + q_qᵀ x <= c_q      (Q_q semidefinida)
                lower <= x <= upper

Los números complejos se suben a reales por bloques: z ∈ ℂⁿ ↔ (Re z; Im z).
"""

from __future__ import annotations
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from lim_benchmark.errors import ProgramError

PSD_TOL = 1e-10


@dataclass(frozen=True)
class LogTerm:
    """κ · log(1 + scale · x[index])."""
    coef: float
    index: int
    scale: float = 1.0


@dataclass(frozen=True)
class QuadConstraint:
    """xᵀQx + qᵀx <= c."""
    Q: np.ndarray
    q: np.ndarray
    c: float
    label: str = ""


def _clamp_psd(Q: np.ndarray) -> np.ndarray:
    Q = 0.5 * (Q + Q.T)
    lam, U = np.linalg.eigh(Q)
    if lam.min() < -PSD_TOL * max(1.0, abs(lam).max()):
        raise ProgramError(f"restricción cuadrática no convexa (autovalor {lam.min():.3e})")
    if lam.min() < 0:
        Q = (U * np.clip(lam, 0.0, None)) @ U.T
    return Q


@dataclass
class ConcaveProgram:
    n_vars: int
    log_terms: list[LogTerm]
    linear_objective: np.ndarray
    affine_A: np.ndarray  # (m_a, n)
    affine_b: np.ndarray  # (m_a,)
    quad_constraints: list[QuadConstraint]
    lower: np.ndarray  # -inf donde no hay cota
    upper: np.ndarray  # +inf donde no hay cota
    x0: np.ndarray
    affine_labels: list[str] = field(default_factory=list)

    def __post_init__(self):
        n = self.n_vars
        self.linear_objective = np.asarray(self.linear_objective, dtype=float)
        self.affine_A = np.asarray(self.affine_A, dtype=float).reshape(-1, n)
        self.affine_b = np.asarray(self.affine_b, dtype=float).reshape(-1)
        self.lower = np.asarray(self.lower, dtype=float)
        self.upper = np.asarray(self.upper, dtype=float)
        self.x0 = np.asarray(self.x0, dtype=float)
        for name in ("linear_objective", "lower", "upper", "x0"):
            if getattr(self, name).shape != (n,):
                raise ProgramError(f"{name}: se esperaba dimensión {n}")
        if self.affine_A.shape[0] != self.affine_b.shape[0]:
            raise ProgramError("affine_A y affine_b no cuadran")
        for term in self.log_terms:
            if term.coef <= 0 or term.scale <= 0 or not 0 <= term.index < n:
                raise ProgramError(f"término logarítmico no válido: {term}")
        quads = []
        for quad in self.quad_constraints:
            if quad.Q.shape != (n, n) or np.shape(quad.q) != (n,):
                raise ProgramError(f"restricción cuadrática '{quad.label}' con dimensión errónea")
            quads.append(QuadConstraint(_clamp_psd(np.asarray(quad.Q, dtype=float)),
                                        np.asarray(quad.q, dtype=float), float(quad.c), quad.label))
        self.quad_constraints = quads
        if not self.affine_labels:
            self.affine_labels = [""] * len(self.affine_b)

    @classmethod
    def from_rows(
        cls,
        n_vars: int,
        log_terms: list[LogTerm],
        linear_objective: np.ndarray,
        affine_constraints: list[tuple[np.ndarray, float]],
        quad_constraints: list[QuadConstraint],
        x0: np.ndarray,
        lower_bounds: np.ndarray | None = None,
        upper_bounds: np.ndarray | None = None,
    ) -> ConcaveProgram:
        """Construcción a partir de una lista de pares (a, b)."""
        A = np.array([a for a, _ in affine_constraints], dtype=float).reshape(-1, n_vars)
        b = np.array([b for _, b in affine_constraints], dtype=float)
        lower = np.full(n_vars, -np.inf) if lower_bounds is None else lower_bounds
        upper = np.full(n_vars, np.inf) if upper_bounds is None else upper_bounds
        return cls(n_vars, list(log_terms), linear_objective, A, b,
                   list(quad_constraints), lower, upper, x0)

    @property
    def affine_constraints(self) -> list[tuple[np.ndarray, float]]:
        return list(zip(self.affine_A, self.affine_b))

    @property
    def n_constraints(self) -> int:
        """Número de desigualdades que entran en la barrera."""
        return (len(self.affine_b) + len(self.quad_constraints)
                + int(np.isfinite(self.lower).sum()) + int(np.isfinite(self.upper).sum()))

    def objective(self, x: np.ndarray) -> float:
        value = float(self.linear_objective @ x)
        for term in self.log_terms:
            arg = 1.0 + term.scale * x[term.index]
            if arg <= 0:
                return -math.inf
            value += term.coef * math.log(arg)
        return value

    def constraint_values(self, x: np.ndarray) -> np.ndarray:
        """lhs − rhs de cada desigualdad, en el orden: afines, cuadráticas, inferiores, superiores."""
        if np.shape(x) != (self.n_vars,):
            raise ProgramError(f"x debe tener dimensión {self.n_vars}")
        parts = [self.affine_A @ x - self.affine_b]
        parts.append(np.array([x @ qc.Q @ x + qc.q @ x - qc.c for qc in self.quad_constraints]))
        lo = np.isfinite(self.lower)
        hi = np.isfinite(self.upper)
        parts.append(self.lower[lo] - x[lo])
        parts.append(x[hi] - self.upper[hi])
        return np.concatenate(parts)

    def constraint_labels(self) -> list[str]:
        labels = list(self.affine_labels)
        labels += [qc.label or f"quad[{i}]" for i, qc in enumerate(self.quad_constraints)]
        labels += [f"lower[{i}]" for i in np.flatnonzero(np.isfinite(self.lower))]
        labels += [f"upper[{i}]" for i in np.flatnonzero(np.isfinite(self.upper))]
        return labels

    def log_domain_ok(self, x: np.ndarray) -> bool:
        return all(1.0 + t.scale * x[t.index] > 0 for t in self.log_terms)


def check_feasible(prog: ConcaveProgram, x: np.ndarray) -> tuple[bool, float, int]:
    """
    (factible, peor violación, índice de la peor restricción).

    La violación es max(lhs − rhs); sin restricciones se devuelve (True, -inf, -1).
    """
    values = prog.constraint_values(np.asarray(x, dtype=float))
    if values.size == 0:
        return True, -math.inf, -1
    worst = int(np.argmax(values))
    return bool(values[worst] <= 0), float(values[worst]), worst


class ProgramBuilder:
    """
    Ensambla un `ConcaveProgram` por bloques de variables con nombre.

    Cada bloque lleva una escala diagonal x = d · x̃; las restricciones se
    escriben en unidades físicas y `build` las pasa a la variable escalada.
    `unscale` deshace el cambio sobre la solución.
    """

    def __init__(self):
        self._blocks: dict[str, slice] = {}
        self._scale: list[np.ndarray] = []
        self._x0: list[np.ndarray] = []
        self._lower: list[np.ndarray] = []
        self._upper: list[np.ndarray] = []
        self.n_vars = 0
        self._log_terms: list[LogTerm] = []
        self._linear: dict[int, float] = {}
        self._rows: list[np.ndarray] = []
        self._rhs: list[float] = []
        self._labels: list[str] = []
        self._quads: list[QuadConstraint] = []

    def add_block(
        self,
        name: str,
        x0: np.ndarray,
        scale: float | np.ndarray = 1.0,
        lower: float | np.ndarray = -np.inf,
        upper: float | np.ndarray = np.inf,
    ) -> slice:
        if name in self._blocks:
            raise ProgramError(f"bloque repetido: {name}")
        if self._rows or self._quads:
            raise ProgramError("los bloques se declaran antes que las restricciones")
        x0 = np.asarray(x0, dtype=float).reshape(-1)
        size = x0.size
        sl = slice(self.n_vars, self.n_vars + size)
        self._blocks[name] = sl
        scale_arr = np.broadcast_to(np.asarray(scale, dtype=float), (size,)).copy()
        if np.any(scale_arr <= 0):
            raise ProgramError(f"escala no positiva en el bloque {name}")
        self._scale.append(scale_arr)
        self._x0.append(x0)
        self._lower.append(np.broadcast_to(np.asarray(lower, dtype=float), (size,)).copy())
        self._upper.append(np.broadcast_to(np.asarray(upper, dtype=float), (size,)).copy())
        self.n_vars += size
        return sl

    def block(self, name: str) -> slice:
        return self._blocks[name]

    def set_bounds(self, name: str, lower: float | np.ndarray | None = None,
                   upper: float | np.ndarray | None = None) -> None:
        idx = list(self._blocks).index(name)
        size = self._x0[idx].size
        if lower is not None:
            self._lower[idx] = np.broadcast_to(np.asarray(lower, dtype=float), (size,)).copy()
        if upper is not None:
            self._upper[idx] = np.broadcast_to(np.asarray(upper, dtype=float), (size,)).copy()

    def row(self) -> np.ndarray:
        return np.zeros(self.n_vars)

    def add_log_term(self, coef: float, index: int, scale: float = 1.0) -> None:
        self._log_terms.append(LogTerm(coef, index, scale))

    def add_linear_objective(self, index: int, coef: float) -> None:
        self._linear[index] = self._linear.get(index, 0.0) + coef

    def add_affine(self, row: np.ndarray, rhs: float, label: str = "") -> None:
        self._rows.append(np.asarray(row, dtype=float))
        self._rhs.append(float(rhs))
        self._labels.append(label)

    def add_quad(self, Q: np.ndarray, q: np.ndarray, c: float, label: str = "") -> None:
        self._quads.append(QuadConstraint(np.asarray(Q, dtype=float), np.asarray(q, dtype=float), float(c), label))

    @property
    def scale(self) -> np.ndarray:
        return np.concatenate(self._scale) if self._scale else np.zeros(0)

    def unscale(self, x_scaled: np.ndarray) -> np.ndarray:
        return self.scale * x_scaled

    def split(self, x: np.ndarray) -> dict[str, np.ndarray]:
        """Vector físico -> bloques con nombre."""
        return {name: x[sl] for name, sl in self._blocks.items()}

    def build(self) -> ConcaveProgram:
        d = self.scale
        n = self.n_vars
        c = np.zeros(n)
        for index, coef in self._linear.items():
            c[index] = coef
        A = np.array(self._rows, dtype=float).reshape(-1, n) * d[None, :]
        quads = [
            QuadConstraint((qc.Q * d[:, None]) * d[None, :], qc.q * d, qc.c, qc.label)
            for qc in self._quads
        ]
        logs = [LogTerm(t.coef, t.index, t.scale * d[t.index]) for t in self._log_terms]
        return ConcaveProgram(
            n_vars=n,
            log_terms=logs,
            linear_objective=c * d,
            affine_A=A,
            affine_b=np.array(self._rhs, dtype=float),
            quad_constraints=quads,
            lower=np.concatenate(self._lower) / d,
            upper=np.concatenate(self._upper) / d,
            x0=np.concatenate(self._x0) / d,
            affine_labels=list(self._labels),
        )


def _finite_or_none(values: np.ndarray) -> list:
    return [float(v) if np.isfinite(v) else None for v in values]


def dump_program(prog: ConcaveProgram, path: str | Path) -> Path:
    """Vuelca la forma canónica a JSON para inspección fuera de línea."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = {
        "n_vars": prog.n_vars,
        "log_terms": [{"coef": t.coef, "index": t.index, "scale": t.scale} for t in prog.log_terms],
        "linear_objective": prog.linear_objective.tolist(),
        "affine": [
            {"a": a.tolist(), "b": float(b), "label": label}
            for (a, b), label in zip(prog.affine_constraints, prog.affine_labels)
        ],
        "quadratic": [
            {"Q": qc.Q.tolist(), "q": qc.q.tolist(), "c": qc.c, "label": qc.label}
            for qc in prog.quad_constraints
        ],
        "lower": _finite_or_none(prog.lower),
        "upper": _finite_or_none(prog.upper),
        "x0": prog.x0.tolist(),
    }
    with open(path, "w") as f:
        json.dump(data, f, indent=2)
    return path

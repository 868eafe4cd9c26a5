"""
Método de barrera logarítmica con pasos de Newton amortiguados.

Para t creciente (t <- μt) se minimiza

    φ_t(x) = −t·f(x) − Σ log(−g_i(x))

hasta que m/t <= tol_gap. Cada centrado usa Newton con búsqueda lineal
por retroceso (α, β) y termina cuando λ²/2 <= newton_tol.
"""

from __future__ import annotations
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from lim_benchmark.errors import ProgramError
from lim_benchmark.solver.program import ConcaveProgram, check_feasible
from lim_benchmark.system.config import SolverSettings

logger = logging.getLogger(__name__)

CONVERGED = "converged"
MAX_ITER = "max_iter"
NUMERICAL_FAILURE = "numerical_failure"

# Paso mínimo de la búsqueda lineal antes de dar el centrado por terminado.
MIN_STEP = 1e-20


@dataclass
class SolverResult:
    x_star: np.ndarray
    objective: float
    status: str
    newton_iters: int
    max_constraint_violation: float
    gap: float = math.inf

    @property
    def ok(self) -> bool:
        return self.status == CONVERGED


class _Barrier:
    """Evalúa φ_t, su gradiente y su Hessiana para un programa fijo."""

    def __init__(self, prog: ConcaveProgram):
        self.prog = prog
        self.lo_idx = np.flatnonzero(np.isfinite(prog.lower))
        self.hi_idx = np.flatnonzero(np.isfinite(prog.upper))
        self.log_idx = np.array([t.index for t in prog.log_terms], dtype=int)
        self.log_coef = np.array([t.coef for t in prog.log_terms], dtype=float)
        self.log_scale = np.array([t.scale for t in prog.log_terms], dtype=float)

    def slacks(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        p = self.prog
        s_aff = p.affine_b - p.affine_A @ x
        s_quad = np.array([qc.c - x @ qc.Q @ x - qc.q @ x for qc in p.quad_constraints])
        s_lo = x[self.lo_idx] - p.lower[self.lo_idx]
        s_hi = p.upper[self.hi_idx] - x[self.hi_idx]
        arg = 1.0 + self.log_scale * x[self.log_idx]
        return s_aff, s_quad, s_lo, s_hi, arg

    def inside(self, x: np.ndarray) -> bool:
        return all(np.all(s > 0) for s in self.slacks(x))

    def value(self, x: np.ndarray, t: float) -> float:
        s_aff, s_quad, s_lo, s_hi, arg = self.slacks(x)
        if any(np.any(s <= 0) for s in (s_aff, s_quad, s_lo, s_hi, arg)):
            return math.inf
        f = self.prog.linear_objective @ x + float(np.sum(self.log_coef * np.log(arg)))
        barrier = sum(float(np.sum(np.log(s))) for s in (s_aff, s_quad, s_lo, s_hi))
        return -t * f - barrier

    def derivatives(self, x: np.ndarray, t: float) -> tuple[np.ndarray, np.ndarray]:
        p = self.prog
        n = p.n_vars
        s_aff, s_quad, s_lo, s_hi, arg = self.slacks(x)

        grad = -t * p.linear_objective.copy()
        hess = np.zeros((n, n))

        # −t Σ κ log(1 + s x)
        d1 = self.log_coef * self.log_scale / arg
        d2 = self.log_coef * self.log_scale ** 2 / arg ** 2
        np.add.at(grad, self.log_idx, -t * d1)
        np.add.at(hess, (self.log_idx, self.log_idx), t * d2)

        # afines: g = aᵀx − b
        if s_aff.size:
            inv = 1.0 / s_aff
            grad += p.affine_A.T @ inv
            hess += (p.affine_A * (inv ** 2)[:, None]).T @ p.affine_A

        # cuadráticas: ∇g = 2Qx + q, ∇²g = 2Q
        for qc, s in zip(p.quad_constraints, s_quad):
            gq = 2.0 * qc.Q @ x + qc.q
            grad += gq / s
            hess += np.outer(gq, gq) / s ** 2 + 2.0 * qc.Q / s

        # cotas
        np.add.at(grad, self.lo_idx, -1.0 / s_lo)
        np.add.at(hess, (self.lo_idx, self.lo_idx), 1.0 / s_lo ** 2)
        np.add.at(grad, self.hi_idx, 1.0 / s_hi)
        np.add.at(hess, (self.hi_idx, self.hi_idx), 1.0 / s_hi ** 2)
        return grad, hess


def solve_concave_program(
    prog: ConcaveProgram, settings: SolverSettings | None = None
) -> SolverResult:
    """
    Resuelve el programa partiendo de `prog.x0`.

    Raises:
        ProgramError: x0 no es estrictamente factible (holgura <= feas_margin)
            o queda fuera del dominio de algún logaritmo.
    """
    settings = settings or SolverSettings()
    x = prog.x0.copy()
    _, worst, worst_idx = check_feasible(prog, x)
    if worst_idx >= 0 and worst >= -settings.feas_margin:
        label = prog.constraint_labels()[worst_idx]
        raise ProgramError(
            f"punto inicial no estrictamente factible: restricción {worst_idx} ({label}) "
            f"con violación {worst:.3e}"
        )
    if not prog.log_domain_ok(x):
        raise ProgramError("punto inicial fuera del dominio de log(1 + x)")

    barrier = _Barrier(prog)
    m = prog.n_constraints
    t = settings.t0
    iters = 0
    status = CONVERGED

    while True:
        # centrado
        while True:
            if iters >= settings.max_newton:
                status = MAX_ITER
                break
            grad, hess = barrier.derivatives(x, t)
            reg = settings.regularization * (1.0 + float(np.max(np.abs(np.diag(hess))))) if prog.n_vars else 0.0
            try:
                factor = linalg.cho_factor(hess + reg * np.eye(prog.n_vars), lower=True)
                step = -linalg.cho_solve(factor, grad)
            except (linalg.LinAlgError, ValueError):
                status = NUMERICAL_FAILURE
                break
            if not np.all(np.isfinite(step)):
                status = NUMERICAL_FAILURE
                break
            iters += 1
            decrement_sq = float(-grad @ step)
            if decrement_sq / 2.0 <= settings.newton_tol:
                break
            phi = barrier.value(x, t)
            slope = float(grad @ step)
            s = 1.0
            while s > MIN_STEP and not barrier.inside(x + s * step):
                s *= settings.beta
            while s > MIN_STEP and barrier.value(x + s * step, t) > phi + settings.alpha * s * slope:
                s *= settings.beta
            if s <= MIN_STEP:
                logger.debug("búsqueda lineal estancada (t=%.3g, λ²=%.3e)", t, decrement_sq)
                break
            x = x + s * step

        if status != CONVERGED:
            break
        if m == 0 or m / t <= settings.tol_gap:
            break
        t *= settings.mu

    values = prog.constraint_values(x)
    violation = float(values.max()) if values.size else -math.inf
    gap = m / t if m else 0.0
    logger.debug(
        "barrera: estado=%s newton=%d t=%.3g brecha=%.3e violación=%.3e",
        status, iters, t, gap, violation,
    )
    return SolverResult(
        x_star=x,
        objective=prog.objective(x),
        status=status,
        newton_iters=iters,
        max_constraint_violation=max(violation, 0.0) if values.size else 0.0,
        gap=gap,
    )

"""
Tests del solver de barrera y de la forma canónica.
"""

import json
import math

import numpy as np
import pytest

from lim_benchmark.errors import ProgramError
from lim_benchmark.solver.barrier import CONVERGED, MAX_ITER, solve_concave_program
from lim_benchmark.solver.program import (
    ConcaveProgram,
    LogTerm,
    ProgramBuilder,
    QuadConstraint,
    check_feasible,
    dump_program,
)
from lim_benchmark.system.config import SolverSettings


def water_filling(weights, budget):
    """Óptimo cerrado de max Σ κ_i log(1 + x_i), Σ x_i <= P, x >= 0."""
    weights = np.asarray(weights, dtype=float)
    active = np.ones(len(weights), dtype=bool)
    while True:
        nu = weights[active].sum() / (budget + active.sum())
        x = np.where(active, weights / nu - 1.0, 0.0)
        if np.all(x >= 0):
            return x
        active &= x > 0


def projected_gradient(grad_fn, project, x0, step=0.05, iters=20000):
    """Ascenso por gradiente proyectado, oráculo lento pero simple."""
    x = x0.copy()
    for _ in range(iters):
        x = project(x + step * grad_fn(x))
    return x


def rate_program(weights, budget, x0):
    n = len(weights)
    return ConcaveProgram.from_rows(
        n_vars=n,
        log_terms=[LogTerm(float(k), i) for i, k in enumerate(weights)],
        linear_objective=np.zeros(n),
        affine_constraints=[(np.ones(n), budget)],
        quad_constraints=[],
        x0=np.asarray(x0, dtype=float),
        lower_bounds=np.zeros(n),
    )


class TestBarrierSolver:
    """Método de barrera sobre problemas con óptimo conocido."""

    def test_scalar_stationary_point(self):
        """max log(1+x) − 0.1x en [0, 20]: x* = 9."""
        prog = ConcaveProgram.from_rows(
            1, [LogTerm(1.0, 0)], np.array([-0.1]), [], [], np.array([1.0]),
            lower_bounds=np.array([0.0]), upper_bounds=np.array([20.0]),
        )
        result = solve_concave_program(prog)

        assert result.status == CONVERGED
        assert result.x_star[0] == pytest.approx(9.0, abs=1e-4)

    def test_water_filling(self):
        """Reparto de potencia con pesos: coincide con la forma cerrada."""
        weights, budget = [1.0, 2.0, 3.0], 4.0
        result = solve_concave_program(rate_program(weights, budget, [0.5, 0.5, 0.5]))
        expected = water_filling(weights, budget)

        assert result.ok
        assert np.allclose(result.x_star, expected, atol=1e-3)
        optimum = sum(k * math.log1p(x) for k, x in zip(weights, expected))
        assert result.objective == pytest.approx(optimum, abs=1e-5)

    def test_water_filling_with_inactive_channel(self):
        """Un peso pequeño se queda sin potencia."""
        weights, budget = [0.05, 2.0, 3.0], 1.0
        result = solve_concave_program(rate_program(weights, budget, [0.1, 0.1, 0.1]))
        expected = water_filling(weights, budget)

        assert expected[0] == 0.0
        assert np.allclose(result.x_star, expected, atol=1e-3)

    def test_against_projected_gradient(self):
        """Mismo óptimo que el gradiente proyectado sobre la bola unidad."""
        c = np.array([0.3, -1.2, 0.5])
        weights = np.array([1.0, 0.5])

        def grad_fn(x):
            g = c.copy()
            g[:2] += weights / (1.0 + x[:2])
            return g

        def project(x):
            norm = np.linalg.norm(x)
            return x / norm if norm > 1.0 else x

        oracle = projected_gradient(grad_fn, project, np.zeros(3))
        prog = ConcaveProgram.from_rows(
            3, [LogTerm(1.0, 0), LogTerm(0.5, 1)], c, [],
            [QuadConstraint(np.eye(3), np.zeros(3), 1.0, "bola")],
            np.zeros(3),
        )
        result = solve_concave_program(prog)

        assert result.ok
        assert prog.objective(result.x_star) == pytest.approx(prog.objective(oracle), abs=1e-5)

    def test_linear_over_ball(self):
        """max cᵀx en ‖x‖ <= 1: x* = c/‖c‖."""
        c = np.array([3.0, -4.0])
        prog = ConcaveProgram.from_rows(
            2, [], c, [], [QuadConstraint(np.eye(2), np.zeros(2), 1.0)], np.zeros(2),
        )
        result = solve_concave_program(prog)

        assert result.objective == pytest.approx(5.0, abs=1e-5)
        assert np.allclose(result.x_star, c / 5.0, atol=1e-3)
        assert result.max_constraint_violation == 0.0

    def test_infeasible_start(self):
        """x0 sobre la frontera no es estrictamente factible."""
        prog = rate_program([1.0, 1.0], 1.0, [0.5, 0.5])
        with pytest.raises(ProgramError):
            solve_concave_program(prog)

    def test_feasibility_margin(self):
        """Con margen, una holgura pequeña tampoco basta."""
        prog = rate_program([1.0, 1.0], 1.0, [0.45, 0.45])
        with pytest.raises(ProgramError):
            solve_concave_program(prog, SolverSettings(feas_margin=0.2))

    def test_default_margin_rejects_tiny_slack(self):
        """Holgura 1e-12 < 1e-9: el punto inicial se rechaza con los valores por defecto."""
        assert SolverSettings().feas_margin == 1e-9
        prog = rate_program([1.0, 1.0], 1.0, [0.5, 0.5 - 1e-12])
        with pytest.raises(ProgramError):
            solve_concave_program(prog)

    def test_default_margin_accepts_small_slack(self):
        prog = rate_program([1.0, 1.0], 1.0, [0.5, 0.5 - 1e-6])
        result = solve_concave_program(prog)

        assert result.status == CONVERGED

    def test_newton_cap(self):
        """Sin pasos suficientes el estado es max_iter."""
        result = solve_concave_program(rate_program([1.0, 2.0], 3.0, [0.5, 0.5]),
                                       SolverSettings(max_newton=1))

        assert result.status == MAX_ITER
        assert result.newton_iters == 1

    def test_unconstrained_program(self):
        """Sin restricciones se centra una sola vez."""
        prog = ConcaveProgram.from_rows(1, [LogTerm(1.0, 0)], np.array([-0.5]), [], [], np.array([0.0]))
        result = solve_concave_program(prog)

        assert result.x_star[0] == pytest.approx(1.0, abs=1e-4)
        assert result.gap == 0.0


class TestProgram:
    """Forma canónica y constructor por bloques."""

    def test_check_feasible_reports_worst(self):
        prog = rate_program([1.0, 1.0], 1.0, [0.2, 0.2])
        ok, worst, idx = check_feasible(prog, np.array([1.2, -0.5]))

        assert not ok
        assert worst == pytest.approx(0.5)
        assert prog.constraint_labels()[idx] == "lower[1]"

    def test_no_constraints(self):
        prog = ConcaveProgram.from_rows(1, [], np.zeros(1), [], [], np.zeros(1))

        assert check_feasible(prog, np.zeros(1)) == (True, -math.inf, -1)

    def test_nonconvex_quadratic_rejected(self):
        with pytest.raises(ProgramError):
            ConcaveProgram.from_rows(
                2, [], np.zeros(2), [], [QuadConstraint(np.diag([1.0, -1.0]), np.zeros(2), 1.0)], np.zeros(2),
            )

    def test_bad_log_term_rejected(self):
        with pytest.raises(ProgramError):
            ConcaveProgram.from_rows(1, [LogTerm(-1.0, 0)], np.zeros(1), [], [], np.zeros(1))

    def test_dimension_mismatch(self):
        with pytest.raises(ProgramError):
            ConcaveProgram.from_rows(2, [], np.zeros(3), [], [], np.zeros(2))

    def test_scaling_does_not_change_solution(self):
        """Con escala por bloque, la solución física es la misma."""
        def solve(scale):
            b = ProgramBuilder()
            sl = b.add_block("x", np.array([0.5, 0.5]), scale=scale, lower=0.0)
            for i in range(2):
                b.add_log_term(float(i + 1), sl.start + i)
            row = b.row()
            row[sl] = 1.0
            b.add_affine(row, 3.0, "suma")
            res = solve_concave_program(b.build())
            return b.split(b.unscale(res.x_star))["x"]

        assert np.allclose(solve(1.0), solve(np.array([100.0, 0.01])), atol=1e-4)
        assert np.allclose(solve(1.0), water_filling([1.0, 2.0], 3.0), atol=1e-3)

    def test_builder_rejects_late_blocks(self):
        b = ProgramBuilder()
        sl = b.add_block("x", np.zeros(1))
        row = b.row()
        row[sl] = 1.0
        b.add_affine(row, 1.0)
        with pytest.raises(ProgramError):
            b.add_block("y", np.zeros(1))

    def test_set_bounds(self):
        b = ProgramBuilder()
        b.add_block("x", np.array([2.0, 3.0]))
        b.set_bounds("x", lower=1.0)
        prog = b.build()

        assert np.array_equal(prog.lower, [1.0, 1.0])
        assert np.all(np.isinf(prog.upper))

    def test_dump_program(self, tmp_path):
        """El volcado JSON sustituye los infinitos por null."""
        prog = rate_program([1.0, 2.0], 3.0, [0.5, 0.5])
        path = dump_program(prog, tmp_path / "sub" / "prog.json")
        data = json.loads(path.read_text())

        assert data["n_vars"] == 2
        assert data["upper"] == [None, None]
        assert data["affine"][0]["b"] == 3.0

"""
Tests de los gradientes respecto a posiciones contra diferencias finitas.
"""

import numpy as np
import pytest

from lim_benchmark.channel.correlation import jakes_correlation, psd_sqrt
from lim_benchmark.channel.gradients import (
    effective_channel_jacobian,
    finite_difference_gradient,
    g_kj_function,
    grad_correlation,
    grad_effective_channel,
    grad_g_kj,
    grad_steering,
    sylvester_kronecker,
    sylvester_sqrt_grad,
)
from lim_benchmark.channel.realization import assemble_at, draw_small_scale, effective_channel_for
from lim_benchmark.channel.steering import steering_vector
from lim_benchmark.errors import SingularDirectionError, SylvesterError
from lim_benchmark.system.config import SystemConfig
from lim_benchmark.system.geometry import derive_link_geometry, draw_user_positions
from lim_benchmark.system.layout import grid_positions
from lim_benchmark.system.state import SolutionState

STEP = 1e-7


def jittered_grid(count, rng, jitter=0.05):
    return grid_positions(count, (1.0, 1.0)) + rng.uniform(-jitter, jitter, (count, 2))


def instance(seed, n=4, m=4, k=2, correlation=True):
    cfg = SystemConfig(n_antennas=n, n_elements=m, n_users=k, correlation=correlation)
    rng = np.random.default_rng(seed)
    geo = derive_link_geometry(cfg, draw_user_positions(cfg, rng))
    draw = draw_small_scale(cfg, rng)
    p = jittered_grid(n, rng)
    r = jittered_grid(m, rng)
    w = rng.standard_normal((k, n)) + 1j * rng.standard_normal((k, n))
    theta = np.exp(1j * rng.uniform(0, 2 * np.pi, m))
    sol = SolutionState(w=w, theta=theta, p=p, r=r)
    return cfg, geo, draw, sol


def rel_err(a, b):
    return np.linalg.norm(a - b) / max(np.linalg.norm(b), 1e-300)


def random_psd(n, rng, floor=0.05):
    A = rng.standard_normal((n, n))
    return A @ A.T / n + floor * np.eye(n)


class TestElementaryDerivatives:
    """Derivadas de apuntamiento y de la correlación."""

    def test_steering_derivative(self):
        """∂[a]_n/∂p_n contra diferencias centrales."""
        p = grid_positions(4, (1.0, 1.0))
        az, el, lam = 0.7, -0.4, 0.1
        analytic = grad_steering(p, az, el, lam, 2)

        for axis in range(2):
            plus, minus = p.copy(), p.copy()
            plus[2, axis] += STEP
            minus[2, axis] -= STEP
            fd = (steering_vector(plus, az, el, lam)[2] - steering_vector(minus, az, el, lam)[2]) / (2 * STEP)
            assert abs(analytic[axis] - fd) <= 1e-5 * abs(fd)

    def test_correlation_derivative(self):
        """∂R/∂p_n es simétrica y coincide con diferencias centrales."""
        rng = np.random.default_rng(2)
        p = jittered_grid(5, rng)
        dRx, dRy = grad_correlation(p, 0.1, 3)

        for axis, dR in enumerate((dRx, dRy)):
            plus, minus = p.copy(), p.copy()
            plus[3, axis] += STEP
            minus[3, axis] -= STEP
            fd = (jakes_correlation(plus, 0.1) - jakes_correlation(minus, 0.1)) / (2 * STEP)
            assert np.allclose(dR, dR.T)
            assert rel_err(dR, fd) <= 1e-5

    def test_only_row_and_column_nonzero(self):
        p = grid_positions(4, (1.0, 1.0))
        dRx, _ = grad_correlation(p, 0.1, 1)
        mask = np.ones((4, 4), dtype=bool)
        mask[1, :] = False
        mask[:, 1] = False

        assert np.all(dRx[mask] == 0.0)
        assert dRx[1, 1] == 0.0

    def test_coincident_points(self):
        """Dos puntos coincidentes dejan la dirección indefinida."""
        p = np.array([[0.1, 0.1], [0.1, 0.1], [0.5, 0.5]])
        with pytest.raises(SingularDirectionError):
            grad_correlation(p, 0.1, 0)


class TestSylvester:
    """Derivada de la raíz cuadrada por la ecuación de Sylvester."""

    @pytest.mark.parametrize("n", [2, 5, 9, 16])
    def test_residual(self, n):
        """‖S X + X S − ∂R‖_F <= 1e-8 (1 + ‖∂R‖_F)."""
        rng = np.random.default_rng(n)
        R = random_psd(n, rng)
        dR = rng.standard_normal((n, n))
        dR = dR + dR.T
        solve = sylvester_sqrt_grad(psd_sqrt(R), dR)

        assert solve.residual <= 1e-8 * (1 + np.linalg.norm(dR))

    @pytest.mark.parametrize("n", [2, 4, 6])
    def test_kronecker_agrees(self, n):
        """La forma cerrada de Kronecker coincide con la base propia."""
        rng = np.random.default_rng(100 + n)
        S = psd_sqrt(random_psd(n, rng))
        dR = rng.standard_normal((n, n))
        dR = dR + dR.T

        X_eig = sylvester_sqrt_grad(S, dR).X
        X_kron = sylvester_kronecker(S, dR)

        assert np.max(np.abs(X_eig - X_kron)) <= 1e-10

    def test_matches_sqrt_finite_difference(self):
        """X es la derivada de R^{1/2} a lo largo de ∂R."""
        rng = np.random.default_rng(4)
        R = random_psd(4, rng)
        dR = rng.standard_normal((4, 4))
        dR = dR + dR.T
        eps = 1e-6
        fd = (psd_sqrt(R + eps * dR) - psd_sqrt(R - eps * dR)) / (2 * eps)

        assert rel_err(sylvester_sqrt_grad(psd_sqrt(R), dR).X, fd) <= 1e-6

    def test_singular_system(self):
        """R con dos autovalores nulos no tiene solución única."""
        R = np.diag([1.0, 0.0, 0.0])
        with pytest.raises(SylvesterError):
            sylvester_sqrt_grad(psd_sqrt(R), np.eye(3))


class TestChannelGradients:
    """Gradientes de h_eff y de g_kj contra el oráculo de diferencias finitas."""

    @pytest.mark.parametrize("seed", range(6))
    def test_gain_gradients(self, seed):
        """Todo g_kj: error relativo <= 1e-4."""
        cfg, geo, draw, sol = instance(seed, n=4, m=4, k=2)
        chan = assemble_at(cfg, geo, sol.p, sol.r, draw)

        for k in range(2):
            for j in range(2):
                analytic = grad_g_kj(chan, sol, k, j)
                fd = finite_difference_gradient(g_kj_function(cfg, geo, draw, k, j), sol, STEP)
                assert rel_err(analytic.flat(), fd.flat()) <= 1e-4

    def test_uncorrelated_variant(self):
        """Sin correlación solo cuentan las fases de apuntamiento."""
        cfg, geo, draw, sol = instance(11, n=4, m=4, k=2, correlation=False)
        chan = assemble_at(cfg, geo, sol.p, sol.r, draw)
        analytic = grad_g_kj(chan, sol, 0, 1)
        fd = finite_difference_gradient(g_kj_function(cfg, geo, draw, 0, 1), sol, STEP)

        assert rel_err(analytic.flat(), fd.flat()) <= 1e-4

    def test_effective_channel_derivative(self):
        """Una coordenada de la LIM: ∂h_k^eff contra diferencias."""
        cfg, geo, draw, sol = instance(21, n=4, m=4, k=2)
        chan = assemble_at(cfg, geo, sol.p, sol.r, draw)
        analytic = grad_effective_channel(chan, sol, 1, ("r", 2), 0)

        plus, minus = sol.r.copy(), sol.r.copy()
        plus[2, 0] += STEP
        minus[2, 0] -= STEP
        h_plus = effective_channel_for(assemble_at(cfg, geo, sol.p, plus, draw), sol.theta)[1]
        h_minus = effective_channel_for(assemble_at(cfg, geo, sol.p, minus, draw), sol.theta)[1]

        assert rel_err(analytic, (h_plus - h_minus) / (2 * STEP)) <= 1e-4

    def test_unknown_coordinate(self):
        cfg, geo, draw, sol = instance(0)
        chan = assemble_at(cfg, geo, sol.p, sol.r, draw)
        with pytest.raises(ValueError):
            grad_effective_channel(chan, sol, 0, ("q", 0), 0)

    def test_jacobian_shapes(self):
        cfg, geo, draw, sol = instance(1, n=4, m=9, k=3)
        chan = assemble_at(cfg, geo, sol.p, sol.r, draw)
        jac = effective_channel_jacobian(chan, sol.theta)

        assert jac.dp.shape == (3, 4, 2, 4)
        assert jac.dr.shape == (3, 9, 2, 4)

    def test_fd_step_must_be_positive(self):
        cfg, geo, draw, sol = instance(0)
        with pytest.raises(ValueError):
            finite_difference_gradient(g_kj_function(cfg, geo, draw, 0, 0), sol, 0.0)

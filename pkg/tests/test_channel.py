"""
Tests del modelo de canal: apuntamiento, correlación, ensamblado y SINR.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import jn_zeros

from lim_benchmark.channel.correlation import CorrelationSet, jakes_correlation, psd_eig, psd_sqrt
from lim_benchmark.channel.gradients import grad_correlation
from lim_benchmark.channel.realization import (
    SmallScaleDraw,
    assemble_at,
    decompose_effective_channel,
    draw_small_scale,
    effective_channel_for,
    phase_matrices,
    rician_weights,
    sinr_and_rate,
    sum_rate,
)
from lim_benchmark.channel.steering import direction, steering_vector
from lim_benchmark.errors import ModelError
from lim_benchmark.system.config import SystemConfig
from lim_benchmark.system.geometry import derive_link_geometry, draw_user_positions
from lim_benchmark.system.layout import grid_positions
from lim_benchmark.system.state import SolutionState, matched_filter

angles = st.floats(min_value=-math.pi, max_value=math.pi)
coords = st.floats(min_value=0.0, max_value=1.0)


def make_channel(seed=0, n=4, m=4, k=2, **overrides):
    cfg = SystemConfig(n_antennas=n, n_elements=m, n_users=k, **overrides)
    rng = np.random.default_rng(seed)
    geo = derive_link_geometry(cfg, draw_user_positions(cfg, rng))
    draw = draw_small_scale(cfg, rng)
    p = grid_positions(n, cfg.aperture_fa)
    r = grid_positions(m, cfg.aperture_lm)
    return cfg, assemble_at(cfg, geo, p, r, draw)


def random_state(chan, rng):
    K, N = chan.h.shape
    M = chan.g.shape[1]
    w = rng.standard_normal((K, N)) + 1j * rng.standard_normal((K, N))
    w *= math.sqrt(chan.cfg.pmax) / np.linalg.norm(w)
    theta = np.exp(1j * rng.uniform(0, 2 * np.pi, M))
    return SolutionState(w=w, theta=theta, p=chan.p, r=chan.r)


class TestSteering:
    """Vectores de apuntamiento."""

    @settings(max_examples=40, deadline=None)
    @given(az=angles, el=angles, xs=st.lists(st.tuples(coords, coords), min_size=1, max_size=8))
    def test_unit_modulus(self, az, el, xs):
        """|[a]_n| = 1 para cualquier posición y ángulo."""
        a = steering_vector(np.array(xs), az, el, 0.1)

        assert np.allclose(np.abs(a), 1.0)

    @settings(max_examples=40, deadline=None)
    @given(az=angles, el=angles, dx=coords, dy=coords)
    def test_translation_covariance(self, az, el, dx, dy):
        """Trasladar todas las posiciones multiplica a por una fase común."""
        p = grid_positions(4, (1.0, 1.0))
        shift = np.array([dx, dy])
        a = steering_vector(p, az, el, 0.1)
        b = steering_vector(p + shift, az, el, 0.1)
        common = np.exp(-1j * 2 * np.pi / 0.1 * direction(az, el) @ shift)

        assert np.allclose(b, a * common)

    def test_broadside_is_all_ones(self):
        """Con φ=0 todas las fases son nulas."""
        a = steering_vector(grid_positions(9, (1.0, 1.0)), 0.0, 0.3, 0.1)

        assert np.allclose(a, 1.0)


class TestCorrelation:
    """Correlación de Jakes."""

    def test_unit_diagonal_and_symmetry(self):
        R = jakes_correlation(grid_positions(9, (1.0, 1.0)), 0.1)

        assert np.allclose(np.diag(R), 1.0)
        assert np.allclose(R, R.T)

    def test_psd_sqrt_squares_back(self):
        """R^{1/2} R^{1/2} = R."""
        rng = np.random.default_rng(1)
        R = jakes_correlation(rng.uniform(0, 1, (6, 2)), 0.1)
        S = psd_sqrt(R)

        assert np.allclose(S @ S, R, atol=1e-9)
        assert np.allclose(S, S.T)

    def test_coincident_points_give_rank_deficient_psd(self):
        """Puntos coincidentes: R singular pero semidefinida."""
        R = jakes_correlation(np.array([[0.2, 0.2], [0.2, 0.2], [0.7, 0.4]]), 0.1)
        _, lam = psd_eig(R)

        assert lam.min() >= 0.0
        assert lam.min() < 1e-9

    def test_first_zero_of_j0_decorrelates(self):
        """2πd/λ en el primer cero de J0: correlación nula fuera de la diagonal."""
        lam = 0.1
        d = jn_zeros(0, 1)[0] * lam / (2 * np.pi)
        R = jakes_correlation(np.array([[0.0, 0.0], [d, 0.0]]), lam)

        assert abs(R[0, 1]) <= 1e-9
        assert np.allclose(np.diag(R), 1.0)

    def test_first_zero_of_j1_gives_zero_gradient(self):
        """2πd/λ en el primer cero de J1: ∂R/∂x nula en esa entrada."""
        lam = 0.1
        d = jn_zeros(1, 1)[0] * lam / (2 * np.pi)
        dx, dy = grad_correlation(np.array([[0.0, 0.0], [d, 0.0]]), lam, 0)

        assert abs(dx[0, 1]) <= 1e-9
        assert abs(dy[0, 1]) <= 1e-12

    def test_psd_sqrt_rank_one(self):
        """[[1,1],[1,1]]^{1/2} = (1/√2)·unos."""
        S = psd_sqrt(np.array([[1.0, 1.0], [1.0, 1.0]]))

        assert np.allclose(S, np.full((2, 2), 1.0 / math.sqrt(2.0)), atol=1e-9)

    def test_indefinite_matrix_rejected(self):
        with pytest.raises(ModelError):
            psd_eig(np.array([[1.0, 2.0], [2.0, 1.0]]))

    def test_identity_set(self):
        """Sin correlación todas las matrices son la identidad."""
        corr = CorrelationSet.identity(3, 5)

        assert np.array_equal(corr.R, np.eye(3))
        assert np.array_equal(corr.sqrt_R_t, np.eye(5))
        assert not corr.correlated


class TestSmallScale:
    """Fading de pequeña escala y reparto de energía de Rician."""

    def test_draws_are_standard_complex_gaussian(self):
        """Media nula y varianza unidad, repartida a partes iguales entre real e imaginaria."""
        cfg = SystemConfig(n_antennas=8, n_elements=8, n_users=4)
        rng = np.random.default_rng(0)
        samples = []
        for _ in range(200):
            draw = draw_small_scale(cfg, rng)
            samples.extend([draw.Hbar.ravel(), draw.hbar.ravel(), draw.gbar.ravel()])
        x = np.concatenate(samples)

        assert abs(np.mean(x)) < 0.02
        assert np.mean(np.abs(x) ** 2) == pytest.approx(1.0, rel=0.03)
        assert np.var(x.real) == pytest.approx(0.5, rel=0.03)
        assert np.var(x.imag) == pytest.approx(0.5, rel=0.03)

    @pytest.mark.parametrize("kappa", [0.0, 3.0])
    def test_rician_energy_split(self, kappa):
        """E‖H_NLoS‖²_F escala como 1/(κ+1) (10⁴ drops, tolerancia 5%)."""
        cfg = SystemConfig(n_antennas=2, n_elements=2, n_users=1, kappa=kappa)
        geo = derive_link_geometry(cfg, [(100.0, 0.0)])
        p = grid_positions(2, cfg.aperture_fa)
        r = grid_positions(2, cfg.aperture_lm)
        rng = np.random.default_rng(1)
        los, _ = rician_weights(kappa)
        energy = 0.0
        draws = 10_000
        for _ in range(draws):
            chan = assemble_at(cfg, geo, p, r, draw_small_scale(cfg, rng))
            nlos = chan.H / chan.scaling.beta1 - los * chan.H_los
            energy += float(np.sum(np.abs(nlos) ** 2))

        assert energy / (draws * 4) == pytest.approx(1.0 / (kappa + 1.0), rel=0.05)


class TestAssembly:
    """Ensamblado de los canales."""

    def test_shapes(self):
        cfg, chan = make_channel(n=4, m=9, k=3)

        assert chan.H.shape == (9, 4)
        assert chan.h.shape == (3, 4)
        assert chan.g.shape == (3, 9)

    def test_pure_los_without_fading(self):
        """Con κ→∞ el canal es la componente LoS: |H_nm| = β1."""
        cfg = SystemConfig(n_antennas=4, n_elements=4, n_users=1, kappa=1e12)
        geo = derive_link_geometry(cfg, [(100.0, 0.0)])
        chan = assemble_at(cfg, geo, grid_positions(4, (1, 1)), grid_positions(4, (1, 1)),
                           SmallScaleDraw.zeros(cfg))

        assert np.allclose(np.abs(chan.H), chan.scaling.beta1, rtol=1e-6)

    def test_rayleigh_has_no_los(self):
        """Con κ=0 y fading nulo el canal es nulo."""
        cfg = SystemConfig(n_antennas=4, n_elements=4, n_users=1, kappa=0.0)
        geo = derive_link_geometry(cfg, [(100.0, 0.0)])
        chan = assemble_at(cfg, geo, grid_positions(4, (1, 1)), grid_positions(4, (1, 1)),
                           SmallScaleDraw.zeros(cfg))

        assert np.allclose(chan.H, 0.0)
        assert np.allclose(chan.h, 0.0)

    def test_decomposition_matches(self):
        """La descomposición término a término reproduce h_eff."""
        cfg, chan = make_channel(seed=3, n=4, m=4, k=2)
        theta = np.exp(1j * np.linspace(0, 3, 4))

        direct = effective_channel_for(chan, theta)
        parts = decompose_effective_channel(chan, theta)

        assert np.allclose(parts, direct, rtol=1e-10, atol=1e-15)

    def test_phase_matrices(self):
        """h_eff = h^H + θᵀ D_k."""
        cfg, chan = make_channel(seed=4)
        theta = np.exp(1j * np.arange(4))
        D = phase_matrices(chan)
        rebuilt = np.conj(chan.h) + np.einsum("m,kmn->kn", theta, D)

        assert np.allclose(rebuilt, effective_channel_for(chan, theta))

    def test_theta_length_checked(self):
        cfg, chan = make_channel()
        with pytest.raises(ValueError):
            effective_channel_for(chan, np.ones(3))

    def test_correlation_toggle(self):
        """correlation=false usa identidades."""
        _, chan = make_channel(correlation=False)

        assert not chan.corr.correlated
        assert np.allclose(chan.h_nlos, chan.draw.hbar)

    def test_snapshot(self):
        _, chan = make_channel()
        snap = chan.to_dict()

        assert len(snap["H"]) == 4
        assert snap["correlated"] is True


class TestRate:
    """SINR y tasa suma."""

    def test_matches_direct_loop(self):
        """Comparación con un bucle directo sobre usuarios."""
        cfg, chan = make_channel(seed=7, n=4, m=4, k=2)
        sol = random_state(chan, np.random.default_rng(8))
        gamma, rates, total = sinr_and_rate(chan, sol, cfg.sigma2)

        expected = 0.0
        for k in range(2):
            hk = np.conj(chan.h[k]) + np.conj(chan.g[k]) @ np.diag(sol.theta) @ chan.H
            sig = abs(hk @ sol.w[k]) ** 2
            intf = sum(abs(hk @ sol.w[j]) ** 2 for j in range(2) if j != k)
            g_k = sig / (intf + cfg.sigma2)
            assert gamma[k] == pytest.approx(g_k, rel=1e-10)
            expected += math.log2(1 + g_k)

        assert total == pytest.approx(expected, rel=1e-10)
        assert sum_rate(chan, sol) == pytest.approx(total)

    def test_single_user_matched_filter_closed_form(self):
        """K=1: el filtro adaptado da log2(1 + P‖h_eff‖²/σ²)."""
        cfg, chan = make_channel(seed=9, k=1)
        theta = np.ones(4, dtype=complex)
        h_eff = effective_channel_for(chan, theta)
        w = matched_filter(h_eff, cfg.pmax)
        sol = SolutionState(w=w, theta=theta, p=chan.p, r=chan.r)

        closed = math.log2(1 + cfg.pmax * np.linalg.norm(h_eff) ** 2 / cfg.sigma2)
        assert sum_rate(chan, sol) == pytest.approx(closed, rel=1e-10)

    def test_zero_beamformers_give_zero_rate(self):
        cfg, chan = make_channel()
        sol = SolutionState(w=np.zeros((2, 4), dtype=complex), theta=np.ones(4, dtype=complex),
                            p=chan.p, r=chan.r)

        assert sum_rate(chan, sol) == 0.0

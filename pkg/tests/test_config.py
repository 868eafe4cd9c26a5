"""
Tests para la configuración del escenario.
"""

import math

import pytest
from hypothesis import given, settings, strategies as st

from lim_benchmark.errors import ConfigError
from lim_benchmark.system.config import (
    SystemConfig,
    desk_scale,
    dbm_to_watts,
    dump_config,
    linear_power,
    load_and_validate_config,
    load_config,
)


class TestDefaults:
    """Valores por defecto del escenario de referencia."""

    def test_empty_document_gives_reference_scenario(self):
        """Un documento vacío debe dar el escenario completo."""
        cfg = load_and_validate_config("")

        assert (cfg.n_antennas, cfg.n_elements, cfg.n_users) == (16, 16, 8)
        assert cfg.h0_db == -20.0
        assert cfg.alpha == 2.2
        assert cfg.kappa == 3.0
        assert cfg.lambda_m == 0.1
        assert cfg.sigma2_dbm == -95.0
        assert cfg.pmax_dbm == 30.0
        assert cfg.aperture_fa == (1.0, 1.0)
        assert cfg.aperture_lm == (1.0, 1.0)
        assert cfg.dth_fa == 0.1 and cfg.dth_lm == 0.1
        assert cfg.xi == 1e3
        assert cfg.i_outer == 20

    def test_linear_conversions(self):
        """Las magnitudes en dB se convierten al pedirlas."""
        cfg = SystemConfig()

        assert cfg.h0 == pytest.approx(0.01)
        assert cfg.pmax == pytest.approx(1.0)
        assert cfg.sigma2 == pytest.approx(10 ** (-12.5))
        assert linear_power(10.0) == pytest.approx(10.0)
        assert dbm_to_watts(40.0) == pytest.approx(10.0)

    def test_desk_scale(self):
        """La escala de escritorio reduce N, M y K."""
        cfg = desk_scale()

        assert (cfg.n_antennas, cfg.n_elements, cfg.n_users) == (8, 8, 4)
        assert cfg.kappa == SystemConfig().kappa


class TestValidation:
    """Errores de configuración con el campo culpable."""

    def test_zero_antennas_rejected(self):
        """N=0 debe ser un error de configuración."""
        with pytest.raises(ConfigError) as exc:
            load_and_validate_config("n_antennas = 0")
        assert exc.value.field == "n_antennas"

    def test_infeasible_packing(self):
        """16 puntos con d_th=0.1 no caben en un cuadrado de 5 cm."""
        with pytest.raises(ConfigError) as exc:
            load_and_validate_config("aperture_fa = [0.05, 0.05]\nn_antennas = 16\ndth_fa = 0.1")
        assert exc.value.field == "aperture_fa"

    def test_twenty_elements_do_not_pack(self):
        """Con la rejilla uniforme, 20 puntos no caben con d_th=0.1 en 1 m²."""
        with pytest.raises(ConfigError):
            SystemConfig(n_elements=20)

    def test_unknown_key_rejected(self):
        """Las claves desconocidas se rechazan."""
        with pytest.raises(ConfigError) as exc:
            load_and_validate_config("n_antenas = 4")
        assert exc.value.field == "n_antenas"

    def test_unknown_nested_key_rejected(self):
        """También dentro de las tablas anidadas."""
        with pytest.raises(ConfigError) as exc:
            load_and_validate_config("[solver]\nbogus = 1")
        assert exc.value.field == "solver.bogus"

    def test_malformed_document(self):
        """Un TOML mal formado es un error de configuración."""
        with pytest.raises(ConfigError):
            load_and_validate_config("n_antennas = = 3")

    def test_wrong_type(self):
        """Un entero no entero debe rechazarse."""
        with pytest.raises(ConfigError) as exc:
            load_and_validate_config("n_users = 2.5")
        assert exc.value.field == "n_users"

    def test_solver_settings_validated(self):
        """mu <= 1 no es una progresión válida del método de barrera."""
        with pytest.raises(ConfigError) as exc:
            load_and_validate_config("[solver]\nmu = 1.0")
        assert exc.value.field == "solver.mu"

    @pytest.mark.parametrize("text,field", [
        ("[ao]\npccp_growth = 0.5", "ao.pccp_growth"),
        ("[ao]\npccp_max_inner = 0", "ao.pccp_max_inner"),
        ("[ao]\npccp_xi_init = 0.0", "ao.pccp_xi_init"),
        ("[solver]\nfeas_margin = -1e-9", "solver.feas_margin"),
    ])
    def test_penalty_schedule_validated(self, text, field):
        with pytest.raises(ConfigError) as exc:
            load_and_validate_config(text)
        assert exc.value.field == field

    def test_missing_file(self, tmp_path):
        """Un archivo inexistente es un error de configuración."""
        with pytest.raises(ConfigError):
            load_config(tmp_path / "nope.toml")


class TestRoundTrip:
    """Serializar y volver a cargar debe dar la misma configuración."""

    def test_default_round_trip(self):
        cfg = load_and_validate_config("")
        assert load_and_validate_config(dump_config(cfg)) == cfg

    def test_nested_tables_round_trip(self):
        """Los ajustes del solver y del AO sobreviven al viaje."""
        cfg = load_and_validate_config("[solver]\nmu = 20.0\n[ao]\npatience = 3")
        again = load_and_validate_config(dump_config(cfg))

        assert again.solver.mu == 20.0
        assert again.ao.patience == 3
        assert again == cfg

    @settings(max_examples=30, deadline=None)
    @given(
        n=st.integers(min_value=1, max_value=9),
        k=st.integers(min_value=1, max_value=6),
        kappa=st.floats(min_value=0.0, max_value=20.0),
        pmax=st.floats(min_value=-10.0, max_value=50.0),
        correlation=st.booleans(),
    )
    def test_round_trip_property(self, n, k, kappa, pmax, correlation):
        """Para cualquier escenario válido, load(dump(cfg)) == cfg."""
        cfg = SystemConfig(
            n_antennas=n, n_elements=n, n_users=k, kappa=kappa,
            pmax_dbm=pmax, correlation=correlation,
        )
        assert load_and_validate_config(dump_config(cfg)) == cfg

    def test_shipped_configs_load(self):
        """Los archivos de configs/ deben ser válidos."""
        from pathlib import Path

        root = Path(__file__).resolve().parent.parent / "configs"
        default = load_config(root / "default.toml")
        desk = load_config(root / "desk.toml")

        assert default == SystemConfig()
        assert (desk.n_antennas, desk.n_users) == (8, 4)
        assert math.isfinite(desk.pmax)

"""
Configuración del escenario.

Un documento TOML plano cuyas claves son exactamente los campos de
`SystemConfig`, con dos tablas opcionales `[solver]` y `[ao]`.
Los valores en dB/dBm se guardan tal cual y se convierten al pedirlos.
"""

from __future__ import annotations
import dataclasses
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import tomli_w

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from lim_benchmark.errors import ConfigError
from lim_benchmark.system.layout import grid_spacing_sq


def linear_power(db: float) -> float:
    """dB -> escala lineal de potencia."""
    return 10.0 ** (db / 10.0)


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def _coerce(obj: Any) -> None:
    """Normaliza tipos tras leer TOML (listas -> tuplas, int -> float)."""
    for f in dataclasses.fields(obj):
        value = getattr(obj, f.name)
        kind = f.type
        try:
            if kind == "bool":
                if not isinstance(value, bool):
                    raise TypeError
            elif kind == "int":
                if isinstance(value, bool) or int(value) != value:
                    raise TypeError
                value = int(value)
            elif kind == "float":
                if isinstance(value, bool):
                    raise TypeError
                value = float(value)
            elif kind.startswith("tuple"):
                value = tuple(float(v) for v in value)
            else:
                continue
        except (TypeError, ValueError):
            raise ConfigError(f.name, f"valor no válido para tipo {kind}: {value!r}") from None
        object.__setattr__(obj, f.name, value)


@dataclass(frozen=True)
class SolverSettings:
    """Parámetros del método de barrera logarítmica."""
    t0: float = 1.0
    mu: float = 10.0
    tol_gap: float = 1e-6  # m/t final
    newton_tol: float = 1e-9  # decremento de Newton λ²/2
    alpha: float = 0.1
    beta: float = 0.5
    max_newton: int = 1000  # pasos de Newton en total
    regularization: float = 1e-12
    feas_margin: float = 1e-9  # holgura mínima exigida al punto inicial

    def __post_init__(self):
        _coerce(self)
        for name in ("t0", "tol_gap", "newton_tol", "regularization"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"solver.{name}", "debe ser positivo")
        if self.mu <= 1:
            raise ConfigError("solver.mu", "debe ser > 1")
        if not 0 < self.alpha < 0.5:
            raise ConfigError("solver.alpha", "debe estar en (0, 0.5)")
        if not 0 < self.beta < 1:
            raise ConfigError("solver.beta", "debe estar en (0, 1)")
        if self.max_newton < 1:
            raise ConfigError("solver.max_newton", "debe ser >= 1")
        if self.feas_margin < 0:
            raise ConfigError("solver.feas_margin", "no puede ser negativo")


@dataclass(frozen=True)
class AOSettings:
    """Control del bucle alternante. Las regiones de confianza van en longitudes de onda."""
    rel_tol: float = 1e-4
    patience: int = 2
    trust_region_init: float = 0.125
    trust_region_max: float = 0.25
    trust_region_growth: float = 1.5
    max_halvings: int = 6
    accept_tol: float = 1e-9
    phase_tol: float = 1e-3
    pccp_xi_init: float = 1e-2
    pccp_growth: float = 2.0
    pccp_max_inner: int = 40
    pccp_tol: float = 1e-4  # max|Δθ| entre pasos PCCP

    def __post_init__(self):
        _coerce(self)
        for name in ("rel_tol", "trust_region_init", "trust_region_max", "phase_tol", "pccp_xi_init", "pccp_tol"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"ao.{name}", "debe ser positivo")
        if self.trust_region_init > self.trust_region_max:
            raise ConfigError("ao.trust_region_init", "supera trust_region_max")
        if self.trust_region_growth < 1:
            raise ConfigError("ao.trust_region_growth", "debe ser >= 1")
        if self.patience < 1:
            raise ConfigError("ao.patience", "debe ser >= 1")
        if self.pccp_growth < 1:
            raise ConfigError("ao.pccp_growth", "debe ser >= 1")
        if self.pccp_max_inner < 1:
            raise ConfigError("ao.pccp_max_inner", "debe ser >= 1")
        if self.max_halvings < 0:
            raise ConfigError("ao.max_halvings", "no puede ser negativo")
        if self.accept_tol < 0:
            raise ConfigError("ao.accept_tol", "no puede ser negativo")


@dataclass(frozen=True)
class SystemConfig:
    """
    Constantes del escenario FAS-LIM.

    Los valores por defecto son los del escenario de referencia a escala completa
    (N=M=16, K=8). `desk_scale` da la versión reducida que usa el arnés.
    """
    n_antennas: int = 16
    n_elements: int = 16
    n_users: int = 8
    h0_db: float = -20.0
    alpha: float = 2.2
    kappa: float = 3.0
    lambda_m: float = 0.1
    sigma2_dbm: float = -95.0
    pmax_dbm: float = 30.0
    aperture_fa: tuple[float, float] = (1.0, 1.0)
    aperture_lm: tuple[float, float] = (1.0, 1.0)
    dth_fa: float = 0.1
    dth_lm: float = 0.1
    xi: float = 1e3
    i_outer: int = 20
    fas_center: tuple[float, ...] = (0.0, 0.0)
    lim_center: tuple[float, ...] = (50.0, 20.0)
    user_center: tuple[float, ...] = (100.0, 0.0)
    user_radius: float = 10.0
    seed: int = 0
    correlation: bool = True
    workers: int = 1
    solver: SolverSettings = field(default_factory=SolverSettings)
    ao: AOSettings = field(default_factory=AOSettings)

    def __post_init__(self):
        _coerce(self)
        for name in ("n_antennas", "n_elements", "n_users", "workers"):
            if getattr(self, name) < 1:
                raise ConfigError(name, "debe ser >= 1")
        for name in ("alpha", "lambda_m", "xi"):
            if getattr(self, name) <= 0:
                raise ConfigError(name, "debe ser positivo")
        for name in ("kappa", "dth_fa", "dth_lm", "user_radius"):
            if getattr(self, name) < 0:
                raise ConfigError(name, "no puede ser negativo")
        if self.i_outer < 0:
            raise ConfigError("i_outer", "no puede ser negativo")
        if self.seed < 0:
            raise ConfigError("seed", "debe ser un entero sin signo")
        for name in ("aperture_fa", "aperture_lm"):
            value = getattr(self, name)
            if len(value) != 2 or min(value) <= 0:
                raise ConfigError(name, "se esperan (ancho, alto) positivos")
        for name in ("fas_center", "lim_center", "user_center"):
            if len(getattr(self, name)) not in (2, 3):
                raise ConfigError(name, "se esperan coordenadas 2-D o 3-D")
        self._check_packing("aperture_fa", self.n_antennas, self.aperture_fa, self.dth_fa)
        self._check_packing("aperture_lm", self.n_elements, self.aperture_lm, self.dth_lm)

    @staticmethod
    def _check_packing(name: str, count: int, aperture: tuple[float, float], dth: float) -> None:
        spacing_sq = grid_spacing_sq(count, aperture)
        if spacing_sq < dth:
            raise ConfigError(
                name,
                f"no caben {count} puntos con separación² >= {dth} "
                f"(la rejilla da {spacing_sq:.4g})",
            )

    @property
    def h0(self) -> float:
        return linear_power(self.h0_db)

    @property
    def sigma2(self) -> float:
        return dbm_to_watts(self.sigma2_dbm)

    @property
    def pmax(self) -> float:
        return dbm_to_watts(self.pmax_dbm)

    def to_dict(self) -> dict:
        data = dataclasses.asdict(self)
        for key, value in data.items():
            if isinstance(value, tuple):
                data[key] = list(value)
        return data


_NESTED = {"solver": SolverSettings, "ao": AOSettings}


def _check_keys(data: dict, cls: type, prefix: str = "") -> None:
    known = {f.name for f in dataclasses.fields(cls)}
    for key in data:
        if key not in known:
            raise ConfigError(prefix + key, "clave desconocida")


def config_from_mapping(data: dict) -> SystemConfig:
    """Construye la configuración a partir de un diccionario ya parseado."""
    _check_keys(data, SystemConfig)
    kwargs = dict(data)
    for key, cls in _NESTED.items():
        if key in kwargs:
            table = kwargs[key]
            if not isinstance(table, dict):
                raise ConfigError(key, "se esperaba una tabla")
            _check_keys(table, cls, prefix=f"{key}.")
            kwargs[key] = cls(**table)
    return SystemConfig(**kwargs)


def load_and_validate_config(source: str) -> SystemConfig:
    """
    Parsea un documento TOML y valida el escenario.

    Raises:
        ConfigError: documento mal formado, clave desconocida, dimensión no
            positiva o empaquetado imposible. El error nombra el campo.
    """
    try:
        data = tomllib.loads(source)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError("<documento>", str(e)) from None
    return config_from_mapping(data)


def load_config(path: str | Path) -> SystemConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError("<archivo>", f"no se pudo leer {path}: {e}") from None
    return load_and_validate_config(text)


def dump_config(cfg: SystemConfig) -> str:
    """Serializa a TOML; `load_and_validate_config(dump_config(c)) == c`."""
    return tomli_w.dumps(cfg.to_dict())


def desk_scale(cfg: SystemConfig | None = None) -> SystemConfig:
    """Copia a escala de escritorio (N=M=8, K=4)."""
    cfg = cfg or SystemConfig()
    return dataclasses.replace(cfg, n_antennas=8, n_elements=8, n_users=4)

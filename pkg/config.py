# config.py
from dataclasses import dataclass, field
from typing import Dict, Any, Optional, Tuple

from constants import EPSILON_DEFECTO, TOLERANCIA_BISECCION, PUNTOS_VERIFICACION
from sdp import SolverConfig, SolverConfigError


class ConfigError(Exception):
    """Error en un archivo o valor de configuración"""
    def __init__(self, mensaje: str, linea: Optional[int] = None):
        self.linea = linea
        prefijo = f"Línea {linea}: " if linea is not None else ""
        super().__init__(prefijo + mensaje)


@dataclass
class ConfiguracionSistema:
    """Configuración global del sistema"""

    # Solver SDP
    solver: SolverConfig = field(default_factory=SolverConfig)

    # Búsqueda
    bisection_tol: float = TOLERANCIA_BISECCION
    epsilon: float = EPSILON_DEFECTO

    # Ejecución de tablas
    jobs: int = 1
    full: bool = False
    seed: int = 0
    spot_check_points: int = PUNTOS_VERIFICACION

    # Salida
    output: Optional[str] = None

    # Debug
    debug_mode: bool = False

    def to_dict(self) -> Dict[str, Any]:
        """Serializar configuración"""
        return {
            "margin_tol": self.solver.margin_tol,
            "duality_gap_tol": self.solver.duality_gap_tol,
            "max_iter": self.solver.max_iter,
            "solver": self.solver.solver,
            "bisection_tol": self.bisection_tol,
            "epsilon": self.epsilon,
            "jobs": self.jobs,
            "full": self.full,
            "seed": self.seed,
            "spot_check_points": self.spot_check_points,
            "output": self.output,
            "debug_mode": self.debug_mode,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ConfiguracionSistema':
        """Deserializar configuración"""
        config, _ = aplicar_claves(cls(), data)
        return config

    def snapshot(self) -> str:
        """Instantánea `clave=valor;...` para la columna params del CSV"""
        claves = ("margin_tol", "duality_gap_tol", "max_iter", "bisection_tol", "epsilon", "seed")
        datos = self.to_dict()
        return ";".join(f"{k}={datos[k]}" for k in claves)


# ──────────────────────────────────────────────────────────────
# ARCHIVO CLAVE = VALOR
# ──────────────────────────────────────────────────────────────

def cargar_clave_valor(ruta: str) -> Dict[str, str]:
    """
    Leer un archivo plano `clave = valor`.
    Las líneas en blanco y lo que sigue a `#` se ignoran.
    """
    resultado: Dict[str, str] = {}
    with open(ruta, "r", encoding="utf-8") as f:
        for numero, linea in enumerate(f, start=1):
            linea = linea.split("#", 1)[0].strip()
            if not linea:
                continue
            if "=" not in linea:
                raise ConfigError(f"se esperaba 'clave = valor', recibido {linea!r}", numero)
            clave, valor = (parte.strip() for parte in linea.split("=", 1))
            if not clave:
                raise ConfigError("clave vacía", numero)
            resultado[clave.replace("-", "_")] = valor
    return resultado


def _booleano(valor: Any) -> bool:
    if isinstance(valor, bool):
        return valor
    texto = str(valor).strip().lower()
    if texto in ("1", "true", "yes", "si", "sí", "on"):
        return True
    if texto in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"booleano inválido: {valor!r}")


_CLAVES_SOLVER = {
    "margin_tol": float,
    "duality_gap_tol": float,
    "max_iter": int,
    "solver": lambda v: str(v).strip().upper(),
}
_CLAVES_SISTEMA = {
    "bisection_tol": float,
    "epsilon": float,
    "jobs": int,
    "full": _booleano,
    "seed": int,
    "spot_check_points": int,
    "output": str,
    "debug_mode": _booleano,
}
# Alias con nombres de flag
_ALIAS = {"tol": "bisection_tol", "debug": "debug_mode"}


def aplicar_claves(config: ConfiguracionSistema,
                   claves: Dict[str, Any]) -> Tuple[ConfiguracionSistema, Dict[str, Any]]:
    """
    Aplicar un mapa de claves con conversión de tipos.
    Devuelve la configuración actualizada y las claves no reconocidas,
    que la CLI usa como valores por defecto de sus flags.
    """
    desconocidas: Dict[str, Any] = {}
    solver = config.solver.to_dict()
    valores: Dict[str, Any] = {}

    for clave, valor in claves.items():
        clave = _ALIAS.get(clave, clave)
        try:
            if clave in _CLAVES_SOLVER:
                solver[clave] = _CLAVES_SOLVER[clave](valor)
            elif clave in _CLAVES_SISTEMA:
                valores[clave] = None if valor is None else _CLAVES_SISTEMA[clave](valor)
            else:
                desconocidas[clave] = valor
        except (TypeError, ValueError) as e:
            raise ConfigError(f"valor inválido para '{clave}': {valor!r} ({e})")

    try:
        nuevo_solver = SolverConfig.configure(**solver)
    except SolverConfigError as e:
        raise ConfigError(str(e))

    nueva = ConfiguracionSistema(
        solver=nuevo_solver,
        bisection_tol=valores.get("bisection_tol", config.bisection_tol),
        epsilon=valores.get("epsilon", config.epsilon),
        jobs=valores.get("jobs", config.jobs),
        full=valores.get("full", config.full),
        seed=valores.get("seed", config.seed),
        spot_check_points=valores.get("spot_check_points", config.spot_check_points),
        output=valores.get("output", config.output),
        debug_mode=valores.get("debug_mode", config.debug_mode),
    )
    if nueva.bisection_tol <= 0 or nueva.epsilon <= 0:
        raise ConfigError("bisection_tol y epsilon deben ser positivos")
    if nueva.jobs < 1:
        raise ConfigError(f"jobs debe ser ≥ 1 (recibido {nueva.jobs})")
    return nueva, desconocidas


# Instancia global de configuración
config_global = ConfiguracionSistema()


def obtener_config() -> ConfiguracionSistema:
    """Obtener configuración global"""
    return config_global


def establecer_config(config: ConfiguracionSistema) -> None:
    """Establecer configuración global"""
    global config_global
    config_global = config

from enum import Enum, auto
from typing import Dict


class Verdict(Enum):
    """Veredicto de un problema de factibilidad SDP"""
    FEASIBLE = auto()      # Certificado encontrado y verificado
    INFEASIBLE = auto()    # Margen óptimo claramente negativo
    INCONCLUSIVE = auto()  # Ni una cosa ni la otra (cerca de c crítico)


class Direction(Enum):
    """Sentido de la cota sobre c*"""
    UPPER = "upper"
    LOWER = "lower"


class Method(Enum):
    """Formulaciones SOS disponibles"""
    SURFACE_UPPER = "surface-upper"
    VOLUME_UPPER = "volume-upper"
    VOLUME_LOWER = "volume-lower"
    AUTOCAT_UPPER = "autocat-upper"
    AUTOCAT_LOWER = "autocat-lower"

    @property
    def direction(self) -> Direction:
        if self in (Method.VOLUME_LOWER, Method.AUTOCAT_LOWER):
            return Direction.LOWER
        return Direction.UPPER

    @property
    def uses_lambda(self) -> bool:
        return self is not Method.SURFACE_UPPER


class ShootClassification(Enum):
    """Destino de la variedad inestable integrada"""
    CONNECTED = auto()     # Llega a la bola alrededor del equilibrio destino
    EXITED_FRONT = auto()  # Cruza la cara de salida (no hay onda)
    EXITED_OTHER = auto()  # Sale de la región por otra cara
    UNDETERMINED = auto()  # Sin veredicto (subdesbordamiento, tope de arco)


class ConstraintKind(Enum):
    """Restricciones escalares sobre variables de decisión"""
    EQ0 = "eq0"
    GE0 = "ge0"


class SpeedParameter(Enum):
    """Cómo entra la velocidad c en el campo vectorial"""
    LINEAR = auto()          # F = F0 + c·F1
    INVERSE_SQUARE = auto()  # F = F0 + F1/c²


# Claves de modelo aceptadas por la CLI y los archivos de configuración
MODEL_KEYS = ("fisher", "chemo", "autocat")

# Parámetros por defecto de los métodos
EPSILON_DEFECTO = 1e-4
LAMBDA_DEFECTO: Dict[Method, float] = {
    Method.VOLUME_UPPER: 3.0,
    Method.VOLUME_LOWER: 1e3,
    Method.AUTOCAT_UPPER: 0.5,
    Method.AUTOCAT_LOWER: 1e3,
}
# Grado de V o N cuando no se indica
GRADO_DEFECTO: Dict[Method, int] = {
    Method.SURFACE_UPPER: 8,
    Method.VOLUME_UPPER: 8,
    Method.VOLUME_LOWER: 8,
    Method.AUTOCAT_UPPER: 6,
    Method.AUTOCAT_LOWER: 6,
}
# Cotas inferiores de las tablas de grado 20 (Fisher y quimiotaxis)
LAMBDA_COTA_INFERIOR_TABLAS = 1e3

# Bisección
TOLERANCIA_BISECCION = 1e-4
SEMILLA_INFERIOR = 1e-3
FACTOR_EXPANSION_SEMILLA = 1.5
MAX_EXPANSIONES_SEMILLA = 8

# Verificación de certificados
TOL_RESIDUO = 1e-7
TOL_AUTOVALOR = -1e-8
PUNTOS_VERIFICACION = 500
TOL_VERIFICACION_PUNTUAL = -1e-6

# Disparo
DESPLAZAMIENTO_SEMILLA = 1e-7
RADIO_DESTINO = 1e-6
RTOL_DISPARO = 1e-10
ATOL_DISPARO = 1e-14
TOPE_ARCO = 1e4

# Esquema CSV de resultados
CSV_COLUMNAS = (
    "model", "params", "method", "degree", "lambda", "epsilon",
    "direction", "bound", "bracket_width", "inconclusive", "seconds",
)
CSV_COLUMNAS_ORACULO = (
    "model", "params", "estimate", "bracket_lo", "bracket_hi", "tol", "seconds",
)

"""
════════════════════════════════════════════════════════════════
COTAS DE VELOCIDAD MÍNIMA — ORÁCULO DE DISPARO
════════════════════════════════════════════════════════════════

Estimación numérica (no rigurosa) de c*: se integra la variedad
inestable del equilibrio fuente y se clasifica su destino.

La integración usa la parametrización por longitud de arco
(dx/ds = F/|F|), de modo que la llegada lenta a un equilibrio no
hiperbólico ocurre en s finito; el tiempo original ξ se lleva como
estado extra (dξ/ds = 1/|F|).
"""

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy.integrate import solve_ivp

from constants import (
    ShootClassification,
    DESPLAZAMIENTO_SEMILLA, RADIO_DESTINO, RTOL_DISPARO, ATOL_DISPARO, TOPE_ARCO,
    TOLERANCIA_BISECCION,
)
from models import TravellingWaveSystem
from polyalgebra import Polynomial
from utils import Logger


logger = Logger("oracle")

# Margen bajo w = 0 antes de declarar salida por esa cara
_MARGEN_W = 1e-8


# ══════════════════════════════════════════════════════════════
# EXCEPCIONES
# ══════════════════════════════════════════════════════════════

class OracleError(Exception):
    """Error base del oráculo"""
    pass


class SameClassificationError(OracleError):
    """Los extremos del intervalo tienen la misma clasificación"""
    def __init__(self, c_lo: float, c_hi: float, clasificacion: ShootClassification):
        self.c_lo = c_lo
        self.c_hi = c_hi
        self.clasificacion = clasificacion
        super().__init__(f"Misma clasificación {clasificacion.name} en c={c_lo:.6g} y c={c_hi:.6g}")


# ══════════════════════════════════════════════════════════════
# RESULTADOS
# ══════════════════════════════════════════════════════════════

@dataclass
class ShootOutcome:
    classification: ShootClassification
    exit_point: Optional[Tuple[float, ...]] = None
    arc_length: float = 0.0
    xi: float = 0.0
    n_evaluations: int = 0
    mensaje: str = ""


@dataclass
class ShootingEstimate:
    estimate: float
    bracket_lo: float
    bracket_hi: float
    tol: float
    history: List[Tuple[float, ShootClassification]] = field(default_factory=list)
    undetermined: bool = False


# ══════════════════════════════════════════════════════════════
# CAMPO NUMÉRICO
# ══════════════════════════════════════════════════════════════

def _compilar(campo: Tuple[Polynomial, ...]) -> Callable[[np.ndarray], np.ndarray]:
    terminos = [[(float(c), np.array(m.exponents)) for m, c in p.items()] for p in campo]

    def F(x: np.ndarray) -> np.ndarray:
        return np.array([sum(c * np.prod(x ** e) for c, e in t) for t in terminos])

    return F


def unstable_direction(system: TravellingWaveSystem, c: float) -> np.ndarray:
    """
    Autovector unitario del autovalor inestable en la fuente, con el
    signo que apunta hacia la región admisible.
    """
    J = system.jacobian(c, system.source)
    valores, vectores = np.linalg.eig(J)
    k = int(np.argmax(valores.real))
    if valores[k].real <= 0:
        raise OracleError(f"La fuente no tiene dirección inestable en c={c}")
    direccion = np.real(vectores[:, k])
    direccion /= np.linalg.norm(direccion)
    fuente = np.array([float(x) for x in system.source])
    for signo in (1.0, -1.0):
        if system.region.contains(fuente + signo * DESPLAZAMIENTO_SEMILLA * direccion, tol=1e-15):
            return signo * direccion
    logger.warning(f"Ningún signo del autovector entra en la región (c={c}); se usa el original")
    return direccion


# ══════════════════════════════════════════════════════════════
# DISPARO
# ══════════════════════════════════════════════════════════════

def _evento(funcion, direccion: int):
    funcion.terminal = True
    funcion.direction = direccion
    return funcion


def _integrar(system: TravellingWaveSystem, c: float, eventos, etiquetas) -> ShootOutcome:
    F = _compilar(system.field_at(c))
    n = system.dim
    inicio = np.array([float(x) for x in system.source]) + \
        DESPLAZAMIENTO_SEMILLA * unstable_direction(system, c)

    def rhs(s, y):
        f = F(y[:n])
        norma = np.linalg.norm(f)
        if norma == 0.0:
            return np.zeros(n + 1)
        return np.append(f / norma, 1.0 / norma)

    sol = solve_ivp(rhs, (0.0, TOPE_ARCO), np.append(inicio, 0.0), method="DOP853",
                    rtol=RTOL_DISPARO, atol=ATOL_DISPARO, events=eventos)
    if sol.status == -1:
        return ShootOutcome(ShootClassification.UNDETERMINED, n_evaluations=sol.nfev,
                            mensaje=f"Fallo del integrador: {sol.message}")
    for eventos_t, eventos_y, etiqueta in zip(sol.t_events, sol.y_events, etiquetas):
        if len(eventos_t):
            y = eventos_y[0]
            return ShootOutcome(etiqueta, exit_point=tuple(float(v) for v in y[:n]),
                                arc_length=float(eventos_t[0]), xi=float(y[n]),
                                n_evaluations=sol.nfev)
    return ShootOutcome(ShootClassification.UNDETERMINED,
                        exit_point=tuple(float(v) for v in sol.y[:n, -1]),
                        arc_length=float(sol.t[-1]), xi=float(sol.y[n, -1]),
                        n_evaluations=sol.nfev, mensaje="Tope de longitud de arco alcanzado")


def _bola_destino(system: TravellingWaveSystem):
    destino = np.array([float(x) for x in system.target])
    n = system.dim
    return _evento(lambda s, y: np.linalg.norm(y[:n] - destino) - RADIO_DESTINO, -1)


def shoot_scalar(system: TravellingWaveSystem, c: float) -> ShootOutcome:
    """
    Eventos: u = 0 (salida por el frente), v = 0 ascendente (salida por
    otra cara) y la bola alrededor de (0,0).
    """
    if system.dim != 2:
        raise OracleError(f"shoot_scalar requiere un sistema 2D ({system.name} tiene dimensión {system.dim})")
    eventos = [
        _bola_destino(system),
        _evento(lambda s, y: y[0], -1),
        _evento(lambda s, y: y[1], 1),
    ]
    etiquetas = [ShootClassification.CONNECTED, ShootClassification.EXITED_FRONT,
                 ShootClassification.EXITED_OTHER]
    return _integrar(system, c, eventos, etiquetas)


def shoot_autocat(system: TravellingWaveSystem, c: float) -> ShootOutcome:
    """Salida por v = 1 (D<1) o u = 1 (D>1); w < 0 cuenta como otra cara"""
    if system.family != "autocat":
        raise OracleError(f"shoot_autocat requiere el sistema de autocatálisis ({system.name})")
    indice = system.exit_index
    eventos = [
        _bola_destino(system),
        _evento(lambda s, y: 1.0 - y[indice], -1),
        _evento(lambda s, y: y[2] + _MARGEN_W, -1),
    ]
    etiquetas = [ShootClassification.CONNECTED, ShootClassification.EXITED_FRONT,
                 ShootClassification.EXITED_OTHER]
    return _integrar(system, c, eventos, etiquetas)


def shoot(system: TravellingWaveSystem, c: float) -> ShootOutcome:
    return shoot_autocat(system, c) if system.family == "autocat" else shoot_scalar(system, c)


# ══════════════════════════════════════════════════════════════
# ESTIMACIÓN DE c*
# ══════════════════════════════════════════════════════════════

def estimate_cstar_shooting(system: TravellingWaveSystem, bracket: Tuple[float, float],
                            tol: float = TOLERANCIA_BISECCION) -> ShootingEstimate:
    """
    Bisección sobre la frontera CONNECTED / salida. Un UNDETERMINED
    detiene la búsqueda y se devuelve el punto medio del intervalo vigente.
    """
    c_lo, c_hi = bracket
    if not 0 < c_lo < c_hi:
        raise OracleError(f"Intervalo inválido: {bracket}")
    historial: List[Tuple[float, ShootClassification]] = []

    def clasificar(c: float) -> ShootClassification:
        resultado = shoot(system, c).classification
        historial.append((c, resultado))
        logger.debug(f"disparo c={c:.8f} → {resultado.name}")
        return resultado

    k_lo, k_hi = clasificar(c_lo), clasificar(c_hi)
    conectado_lo = k_lo is ShootClassification.CONNECTED
    conectado_hi = k_hi is ShootClassification.CONNECTED
    if ShootClassification.UNDETERMINED in (k_lo, k_hi) or conectado_lo == conectado_hi:
        raise SameClassificationError(c_lo, c_hi, k_lo)
    # el extremo conectado hace de "hi" aunque el intervalo venga invertido
    sube = conectado_hi

    indeterminado = False
    while c_hi - c_lo > tol:
        medio = (c_lo + c_hi) / 2
        k = clasificar(medio)
        if k is ShootClassification.UNDETERMINED:
            logger.warning(f"{system.name}: disparo indeterminado en c={medio:.6g}; "
                           f"se detiene la bisección")
            indeterminado = True
            break
        if (k is ShootClassification.CONNECTED) == sube:
            c_hi = medio
        else:
            c_lo = medio
    return ShootingEstimate((c_lo + c_hi) / 2, c_lo, c_hi, tol, historial, indeterminado)

"""
════════════════════════════════════════════════════════════════
COTAS DE VELOCIDAD MÍNIMA — BÚSQUEDA EN c
════════════════════════════════════════════════════════════════

Bisección sobre un predicado de factibilidad c ↦ veredicto.

Regla de validez: una cota sólo se reporta en un c con veredicto
FEASIBLE verificado. INCONCLUSIVE cuenta como "no factible", de modo
que la cota queda del lado conservador.
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from constants import (
    Direction, Method, Verdict,
    TOLERANCIA_BISECCION, SEMILLA_INFERIOR,
    FACTOR_EXPANSION_SEMILLA, MAX_EXPANSIONES_SEMILLA,
)
from bounds import MethodConfig
from models import TravellingWaveSystem, analytic_bounds
from sdp import SolveOutcome
from utils import Logger


logger = Logger("search")

Predicado = Callable[[float], Union[SolveOutcome, Verdict]]


# ══════════════════════════════════════════════════════════════
# EXCEPCIONES
# ══════════════════════════════════════════════════════════════

class SearchError(Exception):
    """Error base de la búsqueda"""
    pass


class InvalidBracketError(SearchError):
    """Los extremos no tienen los veredictos requeridos"""
    def __init__(self, c_lo: float, v_lo: Optional[Verdict], c_hi: float, v_hi: Optional[Verdict]):
        self.c_lo, self.v_lo, self.c_hi, self.v_hi = c_lo, v_lo, c_hi, v_hi
        nombre = lambda v: v.name if v is not None else "—"
        super().__init__(f"Intervalo inválido: c={c_lo:.6g} → {nombre(v_lo)}, "
                         f"c={c_hi:.6g} → {nombre(v_hi)}")


class InconclusiveBracketError(InvalidBracketError):
    """El extremo que debe ser factible es INCONCLUSIVE"""
    pass


class SeedError(SearchError):
    """No se encontró un extremo factible al sembrar"""
    def __init__(self, ultimo_c: float, intentos: int):
        self.ultimo_c = ultimo_c
        self.intentos = intentos
        super().__init__(f"Sin veredicto factible tras {intentos} expansiones (último c={ultimo_c:.6g})")


# ══════════════════════════════════════════════════════════════
# RESULTADO
# ══════════════════════════════════════════════════════════════

@dataclass
class BisectionResult:
    """Cota sobre c* con su historial de veredictos"""
    bound: Optional[float]
    direction: Direction
    bracket_history: List[Tuple[float, Verdict]] = field(default_factory=list)
    inconclusive_count: int = 0
    config: Dict = field(default_factory=dict)
    bracket_width: Optional[float] = None
    termination: str = "tolerance"
    non_monotone: bool = False
    seconds: float = 0.0

    @property
    def exito(self) -> bool:
        return self.bound is not None and self.termination != "all_inconclusive"

    @property
    def mensaje(self) -> str:
        if self.bound is None:
            return "none certified"
        return f"{self.direction.value} = {self.bound:.6f} (ancho {self.bracket_width:.2e}, {self.termination})"


# ══════════════════════════════════════════════════════════════
# EVALUACIÓN MEMORIZADA
# ══════════════════════════════════════════════════════════════

def _veredicto(resultado: Union[SolveOutcome, Verdict]) -> Verdict:
    return resultado if isinstance(resultado, Verdict) else resultado.verdict


class Evaluador:
    """Predicado con memoria e historial de veredictos"""

    def __init__(self, predicate: Predicado):
        self.predicate = predicate
        self.cache: Dict[float, Verdict] = {}
        self.historial: List[Tuple[float, Verdict]] = []

    def __call__(self, c: float) -> Verdict:
        if c not in self.cache:
            veredicto = _veredicto(self.predicate(c))
            self.cache[c] = veredicto
            self.historial.append((c, veredicto))
            logger.debug(f"c={c:.8f} → {veredicto.name}")
        return self.cache[c]

    def inconclusos(self) -> int:
        return sum(1 for _, v in self.historial if v is Verdict.INCONCLUSIVE)


def _como_evaluador(predicate) -> Evaluador:
    return predicate if isinstance(predicate, Evaluador) else Evaluador(predicate)


def non_monotone(historial: Sequence[Tuple[float, Verdict]], direction: Direction) -> bool:
    """
    ¿Hay un par de veredictos que contradice la monotonía en c?
    Para cotas superiores: FEASIBLE en c₁ e INFEASIBLE en c₂ > c₁.
    """
    factibles = [c for c, v in historial if v is Verdict.FEASIBLE]
    infactibles = [c for c, v in historial if v is Verdict.INFEASIBLE]
    if not factibles or not infactibles:
        return False
    if direction is Direction.UPPER:
        return min(factibles) < max(infactibles)
    return max(factibles) > min(infactibles)


# ══════════════════════════════════════════════════════════════
# BISECCIÓN
# ══════════════════════════════════════════════════════════════

def _validar(c_lo: float, c_hi: float, tol: float) -> None:
    if not tol > 0:
        raise SearchError(f"La tolerancia debe ser positiva (recibido {tol})")
    if not c_lo < c_hi:
        raise InvalidBracketError(c_lo, None, c_hi, None)


def _bisectar(evaluar: Evaluador, c_lo: float, c_hi: float, tol: float,
              direction: Direction, config: Optional[Dict]) -> BisectionResult:
    previos = len(evaluar.historial)
    interiores: List[Verdict] = []
    while c_hi - c_lo > tol:
        medio = (c_lo + c_hi) / 2
        veredicto = evaluar(medio)
        interiores.append(veredicto)
        factible = veredicto is Verdict.FEASIBLE
        if direction is Direction.UPPER:
            c_lo, c_hi = (c_lo, medio) if factible else (medio, c_hi)
        else:
            c_lo, c_hi = (medio, c_hi) if factible else (c_lo, medio)

    todos_inconclusos = bool(interiores) and all(v is Verdict.INCONCLUSIVE for v in interiores)
    if todos_inconclusos:
        logger.warning(f"Todas las evaluaciones interiores fueron INCONCLUSIVE "
                       f"({len(interiores)}); la cota es la del extremo inicial")
    historial = list(evaluar.historial)
    resultado = BisectionResult(
        bound=c_hi if direction is Direction.UPPER else c_lo,
        direction=direction,
        bracket_history=historial,
        inconclusive_count=sum(1 for _, v in historial[previos:] if v is Verdict.INCONCLUSIVE),
        config=dict(config or {}),
        bracket_width=c_hi - c_lo,
        termination="all_inconclusive" if todos_inconclusos else "tolerance",
        non_monotone=non_monotone(historial, direction),
    )
    if resultado.non_monotone:
        logger.warning(f"Veredictos no monótonos en c durante la búsqueda {direction.value}")
    return resultado


def bisect_upper(predicate: Predicado, c_lo: float, c_hi: float,
                 tol: float = TOLERANCIA_BISECCION, config: Optional[Dict] = None) -> BisectionResult:
    """
    Menor c con veredicto FEASIBLE. Requiere FEASIBLE en c_hi y no
    FEASIBLE en c_lo; c_lo ≤ 0 se toma como no factible sin evaluar.
    """
    _validar(c_lo, c_hi, tol)
    evaluar = _como_evaluador(predicate)
    v_hi = evaluar(c_hi)
    v_lo = evaluar(c_lo) if c_lo > 0 else Verdict.INFEASIBLE
    if v_hi is Verdict.INCONCLUSIVE:
        raise InconclusiveBracketError(c_lo, v_lo, c_hi, v_hi)
    if v_hi is not Verdict.FEASIBLE or v_lo is Verdict.FEASIBLE:
        raise InvalidBracketError(c_lo, v_lo, c_hi, v_hi)
    return _bisectar(evaluar, c_lo, c_hi, tol, Direction.UPPER, config)


def bisect_lower(predicate: Predicado, c_lo: float, c_hi: float,
                 tol: float = TOLERANCIA_BISECCION, config: Optional[Dict] = None) -> BisectionResult:
    """Mayor c con veredicto FEASIBLE (inexistencia certificada)"""
    _validar(c_lo, c_hi, tol)
    evaluar = _como_evaluador(predicate)
    v_lo = evaluar(c_lo)
    v_hi = evaluar(c_hi)
    if v_lo is Verdict.INCONCLUSIVE:
        raise InconclusiveBracketError(c_lo, v_lo, c_hi, v_hi)
    if v_lo is not Verdict.FEASIBLE or v_hi is Verdict.FEASIBLE:
        raise InvalidBracketError(c_lo, v_lo, c_hi, v_hi)
    return _bisectar(evaluar, c_lo, c_hi, tol, Direction.LOWER, config)


# ══════════════════════════════════════════════════════════════
# SIEMBRA DE INTERVALOS
# ══════════════════════════════════════════════════════════════

def seed_upper(evaluar: Evaluador, system: TravellingWaveSystem,
               inicio: Optional[float] = None) -> Tuple[float, float]:
    """
    Extremo factible: cota analítica × 1.01, expandida ×1.5 hasta
    8 veces. Extremo infactible: 0 (escalares) o la mitad de la cota
    analítica inferior (autocatálisis).
    """
    inferior, superior = analytic_bounds(system)
    c_hi = inicio if inicio is not None else (superior * 1.01 if superior else 1.0)
    for _ in range(MAX_EXPANSIONES_SEMILLA + 1):
        if evaluar(c_hi) is Verdict.FEASIBLE:
            break
        c_hi *= FACTOR_EXPANSION_SEMILLA
    else:
        raise SeedError(c_hi / FACTOR_EXPANSION_SEMILLA, MAX_EXPANSIONES_SEMILLA)
    c_lo = 0.5 * inferior if (system.family == "autocat" and inferior) else 0.0
    return c_lo, c_hi


def seed_lower(system: TravellingWaveSystem) -> float:
    """Extremo factible de la búsqueda inferior"""
    inferior, _ = analytic_bounds(system)
    if system.family == "autocat" and inferior:
        return 0.5 * inferior
    return SEMILLA_INFERIOR


def search_bound(predicate: Predicado, system: TravellingWaveSystem, direction: Direction,
                 tol: float = TOLERANCIA_BISECCION, upper_hint: Optional[float] = None,
                 config: Optional[Dict] = None) -> BisectionResult:
    """
    Siembra + bisección. Para cotas inferiores, el extremo infactible es
    `upper_hint` (mejor cota superior conocida) o la cota analítica.
    Si la semilla inferior no es factible, el resultado es "none certified".
    """
    evaluar = _como_evaluador(predicate)
    if direction is Direction.UPPER:
        c_lo, c_hi = seed_upper(evaluar, system)
        return bisect_upper(evaluar, c_lo, c_hi, tol, config)

    c_lo = seed_lower(system)
    if evaluar(c_lo) is not Verdict.FEASIBLE:
        logger.info(f"{system.name}: ninguna cota inferior certificada en c={c_lo:.4g}")
        return BisectionResult(
            bound=None, direction=direction, bracket_history=list(evaluar.historial),
            inconclusive_count=evaluar.inconclusos(), config=dict(config or {}),
            termination="none_certified",
        )
    c_hi = upper_hint
    if c_hi is None:
        _, superior = analytic_bounds(system)
        c_hi = superior * 1.01 if superior else 1.0
    return bisect_lower(evaluar, c_lo, c_hi, tol, config)


# ══════════════════════════════════════════════════════════════
# BARRIDOS
# ══════════════════════════════════════════════════════════════

FabricaPredicado = Callable[[Method, MethodConfig], Predicado]


@dataclass
class ProblemFamily:
    """Sistema + fábrica de predicados (método, configuración) → c ↦ veredicto"""
    system: TravellingWaveSystem
    predicate_factory: FabricaPredicado
    epsilon: float = 1e-4
    tol: float = TOLERANCIA_BISECCION

    @property
    def upper_method(self) -> Method:
        return Method.AUTOCAT_UPPER if self.system.family == "autocat" else Method.VOLUME_UPPER

    @property
    def lower_method(self) -> Method:
        return Method.AUTOCAT_LOWER if self.system.family == "autocat" else Method.VOLUME_LOWER

    def run(self, method: Method, degree: int, lam: Optional[float] = None,
            upper_hint: Optional[float] = None, h: Optional[float] = None) -> BisectionResult:
        """Una búsqueda; los fallos de intervalo quedan registrados en `termination`"""
        cfg = MethodConfig.for_method(method, degree, lam, epsilon=self.epsilon, h=h)
        snapshot = {"method": method.value, **cfg.to_dict(), "tol": self.tol}
        try:
            return search_bound(self.predicate_factory(method, cfg), self.system,
                                method.direction, self.tol, upper_hint, snapshot)
        except SearchError as e:
            logger.warning(f"{self.system.name} {method.value} grado {degree}: {e}")
            return BisectionResult(bound=None, direction=method.direction, config=snapshot,
                                   termination=f"error: {e}")


@dataclass
class SweepRow:
    lam: float
    upper: Optional[float]
    lower: Optional[float]
    results: Dict[str, BisectionResult] = field(default_factory=dict)


def lambda_sweep(family: ProblemFamily, lambdas: Sequence[float], degree: int) -> List[SweepRow]:
    """Cotas de volumen superior e inferior para cada λ de la malla"""
    if not lambdas:
        raise SearchError("La malla de λ está vacía")
    filas = []
    for lam in lambdas:
        superior = family.run(family.upper_method, degree, lam)
        inferior = family.run(family.lower_method, degree, lam, upper_hint=superior.bound)
        logger.info(f"λ={lam:g}: superior {superior.bound}, inferior {inferior.bound}")
        filas.append(SweepRow(lam, superior.bound, inferior.bound,
                              {"upper": superior, "lower": inferior}))
    return filas


@dataclass
class EscalationRow:
    degree: int
    upper_volume: Optional[float]
    upper_surface: Optional[float]
    lower: Optional[float]
    results: Dict[str, BisectionResult] = field(default_factory=dict)


def degree_escalation(family: ProblemFamily, degrees: Sequence[int],
                      lam_upper: Optional[float] = None,
                      lam_lower: Optional[float] = None) -> List[EscalationRow]:
    """
    Filas (grado, superior volumen, superior superficie, inferior).
    La superficie sólo existe para sistemas escalares.
    """
    if not degrees:
        raise SearchError("La lista de grados está vacía")
    if list(degrees) != sorted(degrees):
        raise SearchError(f"Los grados deben ser ascendentes: {list(degrees)}")
    escalar = family.system.scalar_model is not None
    filas = []
    for d in degrees:
        resultados = {"upper_volume": family.run(family.upper_method, d, lam_upper)}
        if escalar:
            resultados["upper_surface"] = family.run(Method.SURFACE_UPPER, d)
        mejores = [r.bound for r in resultados.values() if r.bound is not None]
        resultados["lower"] = family.run(family.lower_method, d, lam_lower,
                                         upper_hint=min(mejores) if mejores else None)
        filas.append(EscalationRow(
            degree=d,
            upper_volume=resultados["upper_volume"].bound,
            upper_surface=resultados["upper_surface"].bound if escalar else None,
            lower=resultados["lower"].bound,
            results=resultados,
        ))
    return filas

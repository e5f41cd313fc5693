"""
════════════════════════════════════════════════════════════════
COTAS DE VELOCIDAD MÍNIMA — ORQUESTACIÓN
════════════════════════════════════════════════════════════════

INPUT:  descripción de corrida (modelo, parámetros, método, grado, λ, ε, tol)
OUTPUT: ResultadoCota con la BisectionResult y el código de salida

FLUJO:
  F1. Construir y validar el sistema (antes de cualquier resolución)
  F2. Predicado c ↦ SolveOutcome: programa → instancia → solver →
      verificación exacta → verificación puntual aleatoria
  F3. Siembra del intervalo + bisección
  F4. Celdas encadenadas: la cota superior de una celda acota la
      búsqueda inferior que le sigue; celdas independientes en paralelo
"""

import multiprocessing as mp
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

from constants import Direction, Method, Verdict, TOLERANCIA_BISECCION
from config import ConfiguracionSistema, ConfigError, obtener_config, establecer_config
from bounds import BoundsError, MethodConfig, build_program, check_compatible
from models import ModelError, TravellingWaveSystem, analytic_bounds, build_system
from oracle import OracleError, ShootingEstimate, estimate_cstar_shooting
from search import (
    BisectionResult, ProblemFamily, SearchError, SweepRow, EscalationRow,
    lambda_sweep, degree_escalation,
)
from sdp import SolveOutcome
from sos import assemble, dump_instance, solve, spot_check, spot_check_passed
from utils import Logger


logger = Logger("core")

# Códigos de salida
CODIGO_EXITO = 0
CODIGO_FALLO = 1
CODIGO_USO = 2


# ══════════════════════════════════════════════════════════════
# EXCEPCIONES
# ══════════════════════════════════════════════════════════════

class CoreError(Exception):
    """Error base del orquestador"""
    pass


# ══════════════════════════════════════════════════════════════
# RESULTADOS
# ══════════════════════════════════════════════════════════════

@dataclass
class ResultadoCota:
    """Resultado de una corrida de bisección"""
    exito: bool
    spec: Any
    resultado: Optional[BisectionResult] = None
    parametros: str = ""
    mensaje: str = ""
    codigo: int = CODIGO_EXITO
    seconds: float = 0.0


@dataclass
class ResultadoBarrido:
    exito: bool
    filas: List[SweepRow] = field(default_factory=list)
    parametros: str = ""
    mensaje: str = ""
    codigo: int = CODIGO_EXITO
    seconds: float = 0.0
    model: str = ""


@dataclass
class ResultadoEscalado:
    exito: bool
    filas: List[EscalationRow] = field(default_factory=list)
    parametros: str = ""
    mensaje: str = ""
    codigo: int = CODIGO_EXITO
    seconds: float = 0.0
    model: str = ""


@dataclass
class ResultadoOraculo:
    exito: bool
    estimacion: Optional[ShootingEstimate] = None
    parametros: str = ""
    mensaje: str = ""
    codigo: int = CODIGO_EXITO
    seconds: float = 0.0
    model: str = ""


def _valor(v: Any) -> str:
    if isinstance(v, Fraction) and v.denominator != 1:
        return f"{float(v):.6g}"
    return str(v)


def _parametros(system: TravellingWaveSystem) -> str:
    return ";".join(f"{k}={_valor(v)}" for k, v in system.params.items())


# ══════════════════════════════════════════════════════════════
# PREDICADO SOS
# ══════════════════════════════════════════════════════════════

class PredicadoSos:
    """
    c ↦ SolveOutcome para un método y una configuración fijos.

    Un FEASIBLE se acepta sólo si además pasa la verificación puntual
    en muestras aleatorias del conjunto de cada restricción.
    """

    def __init__(self, method: Method, system: TravellingWaveSystem, cfg: MethodConfig,
                 config: Optional[ConfiguracionSistema] = None, volcado: Optional[str] = None):
        self.method = method
        self.system = system
        self.cfg = cfg
        self.config = config or obtener_config()
        self.volcado = volcado
        self.evaluaciones = 0

    def __call__(self, c: float) -> SolveOutcome:
        prog = build_program(self.method, self.system, c, self.cfg)
        instancia = assemble(prog)
        if self.volcado and self.evaluaciones == 0:
            dump_instance(instancia, self.volcado)
            logger.info(f"Instancia volcada en {self.volcado}")
        self.evaluaciones += 1

        resultado = solve(prog, self.config.solver, instancia)
        if resultado.verdict is Verdict.FEASIBLE and self.config.spot_check_points > 0:
            minimos = spot_check(prog, resultado.certificate,
                                 n_points=self.config.spot_check_points, seed=self.config.seed)
            resultado.datos["spot_check"] = minimos
            if not spot_check_passed(minimos):
                peor = min(minimos, key=minimos.get)
                logger.warning(f"{prog.nombre} c={c:.6g}: verificación puntual fallida en "
                               f"'{peor}' ({minimos[peor]:.2e})")
                resultado.verdict = Verdict.INCONCLUSIVE
                resultado.mensaje = f"Verificación puntual fallida en '{peor}'"
        logger.debug(f"{self.method.value} c={c:.8f}: {resultado.verdict.name} ({resultado.mensaje})")
        return resultado


# ══════════════════════════════════════════════════════════════
# CLASE PRINCIPAL
# ══════════════════════════════════════════════════════════════

class CalculadoraCotas:
    """
    Orquesta sistema, predicado y búsqueda para cada corrida.

    Las descripciones de corrida se leen por atributos: model, params,
    method, degree, lam, epsilon, tol, h, dump.
    """

    def __init__(self, config: Optional[ConfiguracionSistema] = None):
        self.config = config or obtener_config()

    # ──────────────────────────────────────────────────────────
    # F1-F2
    # ──────────────────────────────────────────────────────────

    def system(self, model: str, params: Dict[str, Any]) -> TravellingWaveSystem:
        return build_system(model, params)

    def predicate(self, method: Method, system: TravellingWaveSystem, cfg: MethodConfig,
                  volcado: Optional[str] = None) -> PredicadoSos:
        return PredicadoSos(method, system, cfg, self.config, volcado)

    def family(self, system: TravellingWaveSystem, epsilon: Optional[float] = None,
               tol: Optional[float] = None, volcado: Optional[str] = None) -> ProblemFamily:
        """Familia de problemas con el predicado SOS como fábrica"""
        return ProblemFamily(
            system=system,
            predicate_factory=lambda method, cfg: self.predicate(method, system, cfg, volcado),
            epsilon=epsilon if epsilon is not None else self.config.epsilon,
            tol=tol if tol is not None else self.config.bisection_tol,
        )

    # ──────────────────────────────────────────────────────────
    # F3. UNA CORRIDA
    # ──────────────────────────────────────────────────────────

    def run_bound(self, spec, upper_hint: Optional[float] = None) -> ResultadoCota:
        """
        Una bisección completa.

        Códigos: 0 éxito (incluye "none certified" en cotas inferiores),
        1 intervalo inválido o todas las evaluaciones inconclusas,
        2 modelo, método o parámetros inválidos.
        """
        inicio = time.perf_counter()
        parametros = ";".join(f"{k}={v}" for k, v in spec.params.items())
        try:
            method = spec.method if isinstance(spec.method, Method) else Method(spec.method)
            system = self.system(spec.model, spec.params)
            parametros = _parametros(system)
            check_compatible(method, system)
            # valida grado, λ, ε y h antes de resolver nada
            MethodConfig.for_method(method, spec.degree, spec.lam,
                                    epsilon=spec.epsilon or self.config.epsilon, h=spec.h)
        except (ModelError, BoundsError, ConfigError, ValueError) as e:
            logger.error(f"Corrida inválida: {e}")
            return ResultadoCota(False, spec, parametros=parametros, mensaje=str(e),
                                 codigo=CODIGO_USO, seconds=time.perf_counter() - inicio)

        familia = self.family(system, spec.epsilon, spec.tol, getattr(spec, "dump", None))
        logger.info(f"{system.name} [{parametros}] {method.value} grado {spec.degree}")
        resultado = familia.run(method, spec.degree, spec.lam, upper_hint=upper_hint, h=spec.h)
        resultado.seconds = time.perf_counter() - inicio

        if resultado.termination.startswith("error"):
            codigo = CODIGO_FALLO
        elif resultado.termination == "all_inconclusive":
            codigo = CODIGO_FALLO
        else:
            codigo = CODIGO_EXITO
        logger.info(f"{system.name} {method.value}: {resultado.mensaje} "
                    f"en {resultado.seconds:.1f} s")
        return ResultadoCota(
            exito=codigo == CODIGO_EXITO,
            spec=spec,
            resultado=resultado,
            parametros=parametros,
            mensaje=resultado.mensaje if resultado.bound is not None else resultado.termination,
            codigo=codigo,
            seconds=resultado.seconds,
        )

    # ──────────────────────────────────────────────────────────
    # F4. CELDAS
    # ──────────────────────────────────────────────────────────

    def run_cell(self, celda: Sequence) -> List[ResultadoCota]:
        """
        Corridas en orden; cada búsqueda inferior usa como extremo
        infactible la menor cota superior obtenida antes en la celda.
        """
        resultados: List[ResultadoCota] = []
        superiores: List[float] = []
        for spec in celda:
            method = spec.method if isinstance(spec.method, Method) else Method(spec.method)
            pista = min(superiores) if (method.direction is Direction.LOWER and superiores) else None
            r = self.run_bound(spec, upper_hint=pista)
            if method.direction is Direction.UPPER and r.resultado and r.resultado.bound is not None:
                superiores.append(r.resultado.bound)
            resultados.append(r)
        return resultados

    def run_cells(self, celdas: Sequence[Sequence], jobs: Optional[int] = None) -> List[ResultadoCota]:
        """Celdas independientes, en paralelo con a lo sumo `jobs` procesos"""
        jobs = jobs if jobs is not None else self.config.jobs
        celdas = [list(c) for c in celdas]
        if jobs <= 1 or len(celdas) <= 1:
            por_celda = [self.run_cell(c) for c in celdas]
        else:
            datos = self.config.to_dict()
            with mp.Pool(min(jobs, len(celdas))) as pool:
                por_celda = pool.starmap(_trabajador_celda, [(c, datos) for c in celdas])
        return [r for resultados in por_celda for r in resultados]

    # ──────────────────────────────────────────────────────────
    # BARRIDOS Y ORÁCULO
    # ──────────────────────────────────────────────────────────

    def run_sweep(self, model: str, params: Dict[str, Any], lambdas: Sequence[float],
                  degree: int, epsilon: Optional[float] = None,
                  tol: Optional[float] = None) -> ResultadoBarrido:
        inicio = time.perf_counter()
        try:
            system = self.system(model, params)
            filas = lambda_sweep(self.family(system, epsilon, tol), lambdas, degree)
        except (ModelError, BoundsError, SearchError) as e:
            logger.error(f"Barrido inválido: {e}")
            return ResultadoBarrido(False, mensaje=str(e), codigo=CODIGO_USO,
                                    seconds=time.perf_counter() - inicio)
        return ResultadoBarrido(True, filas, _parametros(system),
                                mensaje=f"{len(filas)} valores de λ",
                                seconds=time.perf_counter() - inicio, model=system.name)

    def run_escalation(self, model: str, params: Dict[str, Any], degrees: Sequence[int],
                       lam_upper: Optional[float] = None, lam_lower: Optional[float] = None,
                       epsilon: Optional[float] = None,
                       tol: Optional[float] = None) -> ResultadoEscalado:
        inicio = time.perf_counter()
        try:
            system = self.system(model, params)
            filas = degree_escalation(self.family(system, epsilon, tol), degrees,
                                      lam_upper, lam_lower)
        except (ModelError, BoundsError, SearchError) as e:
            logger.error(f"Escalado inválido: {e}")
            return ResultadoEscalado(False, mensaje=str(e), codigo=CODIGO_USO,
                                     seconds=time.perf_counter() - inicio)
        return ResultadoEscalado(True, filas, _parametros(system),
                                 mensaje=f"{len(filas)} grados",
                                 seconds=time.perf_counter() - inicio, model=system.name)

    def run_oracle(self, model: str, params: Dict[str, Any],
                   bracket: Optional[Tuple[float, float]] = None,
                   tol: Optional[float] = None) -> ResultadoOraculo:
        """Estimación por disparo; sin intervalo se usan las cotas analíticas"""
        inicio = time.perf_counter()
        try:
            system = self.system(model, params)
            bracket = bracket or default_shooting_bracket(system)
            estimacion = estimate_cstar_shooting(system, bracket, tol or TOLERANCIA_BISECCION)
        except (ModelError, CoreError) as e:
            return ResultadoOraculo(False, mensaje=str(e), codigo=CODIGO_USO,
                                    seconds=time.perf_counter() - inicio)
        except OracleError as e:
            logger.error(f"Oráculo: {e}")
            return ResultadoOraculo(False, parametros=_parametros(system), mensaje=str(e),
                                    codigo=CODIGO_FALLO, seconds=time.perf_counter() - inicio,
                                    model=system.name)
        mensaje = f"c* ≈ {estimacion.estimate:.6f}"
        if estimacion.undetermined:
            mensaje += " (disparo indeterminado; intervalo sin cerrar)"
        return ResultadoOraculo(True, estimacion, _parametros(system), mensaje,
                                seconds=time.perf_counter() - inicio, model=system.name)


def default_shooting_bracket(system: TravellingWaveSystem) -> Tuple[float, float]:
    """[inferior/2 o superior/10, superior·1.01] a partir de las cotas analíticas"""
    inferior, superior = analytic_bounds(system)
    if superior is None:
        raise CoreError(f"{system.name}: sin cota analítica; indique el intervalo")
    c_lo = 0.5 * inferior if inferior else 0.1 * superior
    return c_lo, 1.01 * superior


def _trabajador_celda(celda: Sequence, datos_config: Dict[str, Any]) -> List[ResultadoCota]:
    """Punto de entrada de cada proceso del pool"""
    config = ConfiguracionSistema.from_dict(datos_config)
    establecer_config(config)
    return CalculadoraCotas(config).run_cell(celda)

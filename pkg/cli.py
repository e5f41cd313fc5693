"""
════════════════════════════════════════════════════════════════
COTAS DE VELOCIDAD MÍNIMA — LÍNEA DE COMANDOS
════════════════════════════════════════════════════════════════

Subcomandos: bound, table, sweep, degrees, oracle.
Códigos de salida: 0 éxito, 1 fallo de la corrida (intervalo inválido,
todo inconcluso), 2 error de uso (modelo, parámetros o configuración).

Un archivo `--config` plano (`clave = valor`) fija la configuración del
sistema; las claves que no son de configuración pasan a ser los valores
por defecto de los flags (los flags explícitos siempre ganan).
"""

import argparse
import math
import sys
from dataclasses import dataclass, field
from enum import Enum, auto
from typing import Any, Dict, List, Optional, Sequence, Tuple

from constants import (
    Direction, Method, MODEL_KEYS, GRADO_DEFECTO, LAMBDA_COTA_INFERIOR_TABLAS,
)
from config import (
    ConfigError, ConfiguracionSistema, aplicar_claves, cargar_clave_valor,
    establecer_config, obtener_config,
)
from bounds import BoundsError, MethodConfig, check_compatible
from core import CODIGO_EXITO, CODIGO_FALLO, CODIGO_USO, CalculadoraCotas, ResultadoCota
from models import ModelError, TravellingWaveSystem, build_system
from renderizado import obtener_controlador_renderizado
from sdp import SOLVERS_SOPORTADOS
from utils import Logger, configurar_logging


logger = Logger("cli")


# ══════════════════════════════════════════════════════════════
# EXCEPCIONES
# ══════════════════════════════════════════════════════════════

class CliError(Exception):
    """Error de uso de la línea de comandos"""
    pass


# ══════════════════════════════════════════════════════════════
# ENUMS Y ESTRUCTURAS
# ══════════════════════════════════════════════════════════════

class CategoriaComando(Enum):
    """Categorías de comandos"""
    COTAS = auto()
    TABLAS = auto()
    VALIDACION = auto()


@dataclass
class ResultadoComando:
    """Resultado de ejecución de comando"""
    exito: bool
    mensaje: str
    datos: Optional[Any] = None
    codigo: int = CODIGO_EXITO


@dataclass
class DefinicionComando:
    """Definición de un comando"""
    nombre: str
    aliases: List[str]
    categoria: CategoriaComando
    descripcion: str
    uso: str
    ejemplo: str


@dataclass(frozen=True)
class RunSpec:
    """Una corrida de bisección completamente especificada"""
    model: str
    params: Dict[str, Any] = field(default_factory=dict)
    method: Method = Method.SURFACE_UPPER
    degree: int = 8
    lam: Optional[float] = None
    epsilon: Optional[float] = None
    tol: Optional[float] = None
    h: Optional[float] = None
    output: Optional[str] = None
    dump: Optional[str] = None

    def validar(self) -> TravellingWaveSystem:
        """Modelo, compatibilidad del método y parámetros; no resuelve nada"""
        system = build_system(self.model, self.params)
        check_compatible(self.method, system)
        MethodConfig.for_method(self.method, self.degree, self.lam,
                                epsilon=self.epsilon or obtener_config().epsilon, h=self.h)
        return system


# ══════════════════════════════════════════════════════════════
# REGISTRO DE COMANDOS
# ══════════════════════════════════════════════════════════════

COMANDOS = {
    "bound": DefinicionComando(
        nombre="bound",
        aliases=["b"],
        categoria=CategoriaComando.COTAS,
        descripcion="Bisección de una cota superior o inferior sobre c*",
        uso="bound --model M [parámetros] --method METODO [--degree d] [--lambda λ]",
        ejemplo="bound --model fisher --m 2 --method surface-upper --degree 8 --tol 1e-4",
    ),
    "table": DefinicionComando(
        nombre="table",
        aliases=["t"],
        categoria=CategoriaComando.TABLAS,
        descripcion="Reproducir una tabla de cotas (grados reducidos salvo --full)",
        uso="table {fisher,fisher-degrees,chemo,autocat-asymptotic,autocat} [--full] [--jobs n]",
        ejemplo="table fisher-degrees --jobs 4 --output fisher_grados.csv",
    ),
    "sweep": DefinicionComando(
        nombre="sweep",
        aliases=["s"],
        categoria=CategoriaComando.COTAS,
        descripcion="Cotas de volumen superior e inferior sobre una malla de λ",
        uso="sweep --model M [parámetros] --lambdas l1,l2,... [--degree d]",
        ejemplo="sweep --model fisher --m 2 --lambdas 1,2,3,5,10 --degree 4",
    ),
    "degrees": DefinicionComando(
        nombre="degrees",
        aliases=["d"],
        categoria=CategoriaComando.COTAS,
        descripcion="Escalado en grado: superior de volumen, de superficie e inferior",
        uso="degrees --model M [parámetros] --degrees d1,d2,...",
        ejemplo="degrees --model fisher --m 3 --degrees 1,2,3,4",
    ),
    "oracle": DefinicionComando(
        nombre="oracle",
        aliases=["o"],
        categoria=CategoriaComando.VALIDACION,
        descripcion="Estimación de c* por disparo sobre la variedad inestable",
        uso="oracle --model M [parámetros] [--bracket lo,hi] [--tol t]",
        ejemplo="oracle --model fisher --m 4 --tol 1e-5",
    ),
}

_ALIAS_COMANDO = {alias: nombre for nombre, d in COMANDOS.items() for alias in [nombre, *d.aliases]}

# Claves del archivo de configuración cuyo flag tiene otro destino
_DESTINO_FLAG = {"lambda": "lam", "lambda_upper": "lam_upper", "lambda_lower": "lam_lower"}


# ══════════════════════════════════════════════════════════════
# TABLAS
# ══════════════════════════════════════════════════════════════

TABLAS = ("fisher", "fisher-degrees", "chemo", "autocat-asymptotic", "autocat")


def _grilla_asintotica(full: bool) -> List[Tuple[str, float]]:
    """(D, ε): D = 10^{-3/4 .. -9/4} y 10^{1 .. 4}; D pequeño usa ε = 1e-5"""
    pequenos = [f"{10 ** (-e / 4):.6g}" for e in range(3, 10)]
    grandes = [f"{10 ** (e / 2):.6g}" for e in range(2, 9)]
    if not full:
        pequenos, grandes = pequenos[:2], grandes[:2]
    return [(D, 1e-5) for D in pequenos] + [(D, 1e-4) for D in grandes]


def celdas_tabla(which: str, full: bool = False, degree: Optional[int] = None,
                 epsilon: Optional[float] = None, tol: Optional[float] = None) -> List[List[RunSpec]]:
    """
    Celdas independientes de cada tabla. Dentro de una celda, las cotas
    inferiores se encadenan a las superiores que las preceden.
    """
    if which not in TABLAS:
        raise CliError(f"Tabla desconocida '{which}' (disponibles: {', '.join(TABLAS)})")

    def spec(model, params, method, d, lam=None, eps=epsilon):
        return RunSpec(model=model, params=params, method=method, degree=d, lam=lam,
                       epsilon=eps, tol=tol)

    celdas: List[List[RunSpec]] = []
    if which == "fisher":
        d = degree or (20 if full else 8)
        for m in range(2, 7):
            celdas.append([
                spec("fisher", {"m": m}, Method.SURFACE_UPPER, d),
                spec("fisher", {"m": m}, Method.VOLUME_LOWER, d, LAMBDA_COTA_INFERIOR_TABLAS),
            ])
    elif which == "fisher-degrees":
        grados = [degree] if degree else list(range(1, 9))
        for m in ((2, 3, 4, 5) if full else (2,)):
            for d in grados:
                celdas.append([
                    spec("fisher", {"m": m}, Method.VOLUME_UPPER, d),
                    spec("fisher", {"m": m}, Method.SURFACE_UPPER, d),
                    spec("fisher", {"m": m}, Method.VOLUME_LOWER, d),
                ])
    elif which == "chemo":
        d = degree or (20 if full else 12)
        for q in range(1, 10):
            params = {"k": 2, "q": q, "b": 1}
            celdas.append([
                spec("chemo", params, Method.SURFACE_UPPER, d),
                spec("chemo", params, Method.VOLUME_LOWER, d, LAMBDA_COTA_INFERIOR_TABLAS),
            ])
    elif which == "autocat-asymptotic":
        d = degree or (14 if full else 10)
        for D, eps in _grilla_asintotica(full):
            params = {"D": D, "m": 2}
            eps = epsilon or eps
            celdas.append([
                spec("autocat", params, Method.AUTOCAT_UPPER, d, eps=eps),
                spec("autocat", params, Method.AUTOCAT_LOWER, d, eps=eps),
            ])
    else:
        d = degree or 6
        pasos = range(1, 21) if full else range(1, 9)
        for k in pasos:
            D = f"{k / 10 if full else k / 4:g}"
            if D == "1":
                continue
            params = {"D": D, "m": 2}
            celdas.append([
                spec("autocat", params, Method.AUTOCAT_UPPER, d),
                spec("autocat", params, Method.AUTOCAT_LOWER, d),
            ])
    return celdas


def prefactores(resultados: Sequence[ResultadoCota]) -> List[str]:
    """c*/D para D < 1 y c*/√D para D > 1, con c* el punto medio del par de cotas"""
    pares: Dict[str, Dict[Direction, float]] = {}
    for r in resultados:
        if r.resultado is None or r.resultado.bound is None:
            continue
        pares.setdefault(str(r.spec.params["D"]), {})[r.resultado.direction] = r.resultado.bound
    lineas = []
    for D, cotas in pares.items():
        if len(cotas) < 2:
            continue
        medio = 0.5 * (cotas[Direction.UPPER] + cotas[Direction.LOWER])
        d = float(D)
        razon, etiqueta = (medio / d, "c*/D") if d < 1 else (medio / math.sqrt(d), "c*/√D")
        lineas.append(f"D={D}: c*≈{medio:.4g}  {etiqueta}≈{razon:.4g}  "
                      f"(ancho {cotas[Direction.UPPER] - cotas[Direction.LOWER]:.1e})")
    return lineas


# ══════════════════════════════════════════════════════════════
# PARSER
# ══════════════════════════════════════════════════════════════

def _lista(tipo):
    def convertir(texto: str):
        try:
            return [tipo(x) for x in texto.split(",") if x.strip()]
        except ValueError:
            raise argparse.ArgumentTypeError(f"lista inválida: {texto!r}")
    return convertir


def construir_parser() -> Tuple[argparse.ArgumentParser, Dict[str, argparse.ArgumentParser]]:
    """Parser principal y subparsers por nombre de comando"""
    comun = argparse.ArgumentParser(add_help=False)
    comun.add_argument("--config", help="archivo plano `clave = valor`")
    comun.add_argument("--output", help="CSV de resultados (se anexan filas)")
    comun.add_argument("--tol", type=float, help="tolerancia de bisección")
    comun.add_argument("--epsilon", type=float, help="ε de los métodos de volumen")
    comun.add_argument("--jobs", type=int, help="procesos para celdas independientes")
    comun.add_argument("--solver", choices=SOLVERS_SOPORTADOS)
    comun.add_argument("--full", action="store_true", default=None,
                       help="grados y grillas completos")
    comun.add_argument("--debug", action="store_true", default=None)

    modelo = argparse.ArgumentParser(add_help=False)
    modelo.add_argument("--model", choices=MODEL_KEYS)
    modelo.add_argument("--m", type=int, help="exponente de Fisher–KPP o de autocatálisis")
    modelo.add_argument("--k", type=int, help="difusión uᵏ (quimiotaxis)")
    modelo.add_argument("--q", type=int, help="reacción u(1−u^q) (quimiotaxis)")
    modelo.add_argument("--b", type=str, help="advección −b·u (quimiotaxis)")
    modelo.add_argument("--D", type=str, help="cociente de difusividades (autocatálisis)")

    parser = argparse.ArgumentParser(
        prog="cotas",
        description="Cotas certificadas sobre la velocidad mínima de ondas viajeras",
    )
    sub = parser.add_subparsers(dest="comando", required=True)
    subparsers: Dict[str, argparse.ArgumentParser] = {}

    def agregar(nombre: str, padres) -> argparse.ArgumentParser:
        d = COMANDOS[nombre]
        p = sub.add_parser(nombre, aliases=d.aliases, parents=padres, help=d.descripcion,
                           description=d.descripcion, epilog=f"Ejemplo: {d.ejemplo}")
        subparsers[nombre] = p
        return p

    p = agregar("bound", [comun, modelo])
    p.add_argument("--method", choices=[m.value for m in Method])
    p.add_argument("--degree", type=int)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--h", type=float, help="profundidad del rectángulo inferior")
    p.add_argument("--dump", help="volcado disperso de la primera instancia SDP")

    p = agregar("table", [comun])
    p.add_argument("which", choices=TABLAS)
    p.add_argument("--degree", type=int, help="reemplaza el grado de la tabla")

    p = agregar("sweep", [comun, modelo])
    p.add_argument("--lambdas", type=_lista(float))
    p.add_argument("--degree", type=int)

    p = agregar("degrees", [comun, modelo])
    p.add_argument("--degrees", type=_lista(int))
    p.add_argument("--lambda-upper", dest="lam_upper", type=float)
    p.add_argument("--lambda-lower", dest="lam_lower", type=float)

    p = agregar("oracle", [comun, modelo])
    p.add_argument("--bracket", type=_lista(float))

    return parser, subparsers


def parametros_modelo(args: argparse.Namespace) -> Tuple[str, Dict[str, Any]]:
    """Clave de modelo y sus parámetros desde los flags"""
    if not getattr(args, "model", None):
        raise CliError("Falta --model")
    if args.model == "fisher":
        return "fisher", {"m": args.m}
    if args.model == "chemo":
        return "chemo", {"k": args.k, "q": args.q, "b": args.b if args.b is not None else "0"}
    return "autocat", {"D": args.D, "m": args.m if args.m is not None else 2}


# ══════════════════════════════════════════════════════════════
# PROCESADOR DE COMANDOS
# ══════════════════════════════════════════════════════════════

class ProcesadorComandos:
    """Ejecuta un comando ya parseado y devuelve un ResultadoComando"""

    def __init__(self, config: Optional[ConfiguracionSistema] = None):
        self.config = config or obtener_config()
        self.calculadora = CalculadoraCotas(self.config)
        self.render = obtener_controlador_renderizado(self.config)

    def procesar(self, args: argparse.Namespace) -> ResultadoComando:
        comando = _ALIAS_COMANDO.get(args.comando)
        try:
            if comando == "bound":
                return self._cmd_bound(args)
            elif comando == "table":
                return self._cmd_table(args)
            elif comando == "sweep":
                return self._cmd_sweep(args)
            elif comando == "degrees":
                return self._cmd_degrees(args)
            elif comando == "oracle":
                return self._cmd_oracle(args)
        except (CliError, ModelError, BoundsError) as e:
            return ResultadoComando(False, f"Error de uso: {e}", codigo=CODIGO_USO)
        return ResultadoComando(False, f"Comando no reconocido: {args.comando}", codigo=CODIGO_USO)

    # ──────────────────────────────────────────────────────────

    def run_spec(self, args: argparse.Namespace) -> RunSpec:
        if not args.method:
            raise CliError("Falta --method")
        method = Method(args.method)
        model, params = parametros_modelo(args)
        spec = RunSpec(
            model=model,
            params=params,
            method=method,
            degree=args.degree if args.degree is not None else GRADO_DEFECTO[method],
            lam=args.lam,
            epsilon=self.config.epsilon,
            tol=self.config.bisection_tol,
            h=args.h,
            output=self.config.output,
            dump=args.dump,
        )
        spec.validar()
        return spec

    def _cmd_bound(self, args: argparse.Namespace) -> ResultadoComando:
        spec = self.run_spec(args)
        resultado = self.calculadora.run_bound(spec)
        self.render.escribir_cotas([resultado], spec.output)
        texto = self.render.texto.cotas([resultado])
        if resultado.codigo != CODIGO_EXITO:
            texto += f"\n{resultado.mensaje}"
        return ResultadoComando(resultado.exito, texto, resultado, resultado.codigo)

    def _cmd_table(self, args: argparse.Namespace) -> ResultadoComando:
        celdas = celdas_tabla(args.which, bool(self.config.full), args.degree,
                              epsilon=args.epsilon, tol=self.config.bisection_tol)
        logger.info(f"Tabla {args.which}: {len(celdas)} celdas, {self.config.jobs} procesos")
        resultados = self.calculadora.run_cells(celdas, self.config.jobs)
        ruta = self.config.output or f"table-{args.which}.csv"
        self.render.escribir_cotas(resultados, ruta)

        texto = self.render.texto.cotas(resultados)
        if args.which == "autocat-asymptotic":
            texto += "\n" + "\n".join(prefactores(resultados))
        texto += f"\nCSV: {ruta}"
        alguna = any(r.resultado is not None and r.resultado.bound is not None for r in resultados)
        return ResultadoComando(alguna, texto, resultados, CODIGO_EXITO if alguna else CODIGO_FALLO)

    def _cmd_sweep(self, args: argparse.Namespace) -> ResultadoComando:
        if not args.lambdas:
            raise CliError("La malla --lambdas está vacía")
        model, params = parametros_modelo(args)
        degree = args.degree or 4
        barrido = self.calculadora.run_sweep(model, params, args.lambdas, degree)
        if not barrido.exito:
            return ResultadoComando(False, barrido.mensaje, barrido, barrido.codigo)
        self.render.escribir_barrido(barrido, self.config.output)
        return ResultadoComando(True, self.render.texto.barrido(barrido), barrido)

    def _cmd_degrees(self, args: argparse.Namespace) -> ResultadoComando:
        if not args.degrees:
            raise CliError("La lista --degrees está vacía")
        model, params = parametros_modelo(args)
        escalado = self.calculadora.run_escalation(model, params, args.degrees,
                                                   args.lam_upper, args.lam_lower)
        if not escalado.exito:
            return ResultadoComando(False, escalado.mensaje, escalado, escalado.codigo)
        self.render.escribir_escalado(escalado, self.config.output)
        return ResultadoComando(True, self.render.texto.escalado(escalado), escalado)

    def _cmd_oracle(self, args: argparse.Namespace) -> ResultadoComando:
        bracket = None
        if args.bracket is not None:
            if len(args.bracket) != 2:
                raise CliError(f"--bracket espera 'lo,hi' (recibido {args.bracket})")
            bracket = (args.bracket[0], args.bracket[1])
        model, params = parametros_modelo(args)
        oraculo = self.calculadora.run_oracle(model, params, bracket, self.config.bisection_tol)
        self.render.escribir_oraculo(oraculo, self.config.output)
        return ResultadoComando(oraculo.exito, self.render.texto.oraculo(oraculo), oraculo,
                                oraculo.codigo)


# ══════════════════════════════════════════════════════════════
# ENTRADA
# ══════════════════════════════════════════════════════════════

def _configuracion(args: argparse.Namespace, config: ConfiguracionSistema) -> ConfiguracionSistema:
    """Los flags explícitos sobrescriben la configuración"""
    flags = {
        "bisection_tol": args.tol,
        "epsilon": args.epsilon,
        "jobs": args.jobs,
        "solver": args.solver,
        "full": args.full,
        "debug_mode": args.debug,
        "output": args.output,
    }
    config, _ = aplicar_claves(config, {k: v for k, v in flags.items() if v is not None})
    return config


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, subparsers = construir_parser()

    previo = argparse.ArgumentParser(add_help=False)
    previo.add_argument("--config")
    conocidos, _ = previo.parse_known_args(argv)

    config = obtener_config()
    try:
        if conocidos.config:
            claves = cargar_clave_valor(conocidos.config)
            config, desconocidas = aplicar_claves(config, claves)
            defaults = {_DESTINO_FLAG.get(k, k): v for k, v in desconocidas.items()}
            for p in subparsers.values():
                p.set_defaults(**defaults)
        args = parser.parse_args(argv)
        config = _configuracion(args, config)
    except (ConfigError, OSError) as e:
        print(f"Error de configuración: {e}", file=sys.stderr)
        return CODIGO_USO

    establecer_config(config)
    configurar_logging(config.debug_mode)
    resultado = ProcesadorComandos(config).procesar(args)
    print(resultado.mensaje, file=sys.stdout if resultado.exito else sys.stderr)
    return resultado.codigo


if __name__ == "__main__":
    sys.exit(main())

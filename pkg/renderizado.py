"""
════════════════════════════════════════════════════════════════
COTAS DE VELOCIDAD MÍNIMA — RENDERIZADO
════════════════════════════════════════════════════════════════

PROPÓSITO:
  Fase A: filas CSV con el esquema declarado y la instantánea de
          configuración embebida en la columna params.
  Fase B: tablas de texto alineadas para la consola.

ALCANCE:
  Solo formato. Los valores se escriben tal como llegan.
"""

from typing import Any, Dict, List, Optional, Sequence

from constants import CSV_COLUMNAS, CSV_COLUMNAS_ORACULO
from config import ConfiguracionSistema, obtener_config
from core import ResultadoBarrido, ResultadoCota, ResultadoEscalado, ResultadoOraculo
from search import BisectionResult
from utils import GestorArchivos, Logger


logger = Logger("renderizado")

SIN_COTA = "none certified"


def _numero(valor: Optional[float], formato: str = ".6f") -> str:
    return "" if valor is None else format(valor, formato)


# ══════════════════════════════════════════════════════════════
# FASE A: FILAS CSV
# ══════════════════════════════════════════════════════════════

class RenderizadorCsv:
    """Filas `dict` con las columnas de CSV_COLUMNAS / CSV_COLUMNAS_ORACULO"""

    def __init__(self, config: Optional[ConfiguracionSistema] = None):
        self.config = config or obtener_config()

    def _params(self, parametros: str, extra: Dict[str, Any]) -> str:
        partes = [p for p in (parametros, self.config.snapshot()) if p]
        partes.extend(f"{k}={v}" for k, v in extra.items() if v is not None)
        return ";".join(partes)

    def fila_resultado(self, model: str, parametros: str, resultado: BisectionResult) -> Dict[str, Any]:
        """Una BisectionResult como fila; el método y el grado salen de su configuración"""
        cfg = resultado.config
        return {
            "model": model,
            "params": self._params(parametros, {
                "h": cfg.get("h"),
                "termination": resultado.termination,
                "non_monotone": resultado.non_monotone or None,
            }),
            "method": cfg.get("method", ""),
            "degree": cfg.get("degree", ""),
            "lambda": "" if cfg.get("lambda") is None else cfg["lambda"],
            "epsilon": cfg.get("epsilon", ""),
            "direction": resultado.direction.value,
            "bound": SIN_COTA if resultado.bound is None else _numero(resultado.bound, ".8f"),
            "bracket_width": _numero(resultado.bracket_width, ".3e"),
            "inconclusive": resultado.inconclusive_count,
            "seconds": _numero(resultado.seconds, ".2f"),
        }

    def filas_cota(self, resultados: Sequence[ResultadoCota]) -> List[Dict[str, Any]]:
        filas = []
        for r in resultados:
            if r.resultado is None:
                # corrida rechazada antes de resolver
                continue
            filas.append(self.fila_resultado(r.spec.model, r.parametros, r.resultado))
        return filas

    def filas_barrido(self, barrido: ResultadoBarrido) -> List[Dict[str, Any]]:
        return [self.fila_resultado(barrido.model, barrido.parametros, res)
                for fila in barrido.filas for res in fila.results.values()]

    def filas_escalado(self, escalado: ResultadoEscalado) -> List[Dict[str, Any]]:
        return [self.fila_resultado(escalado.model, escalado.parametros, res)
                for fila in escalado.filas for res in fila.results.values()]

    def fila_oraculo(self, oraculo: ResultadoOraculo) -> Dict[str, Any]:
        e = oraculo.estimacion
        return {
            "model": oraculo.model,
            "params": self._params(oraculo.parametros,
                                   {"undetermined": e.undetermined or None}),
            "estimate": _numero(e.estimate, ".8f"),
            "bracket_lo": _numero(e.bracket_lo, ".8f"),
            "bracket_hi": _numero(e.bracket_hi, ".8f"),
            "tol": e.tol,
            "seconds": _numero(oraculo.seconds, ".2f"),
        }


# ══════════════════════════════════════════════════════════════
# FASE B: TABLAS DE TEXTO
# ══════════════════════════════════════════════════════════════

def tabla_texto(cabecera: Sequence[str], filas: Sequence[Sequence[Any]]) -> str:
    """Columnas alineadas a la izquierda, separadas por dos espacios"""
    celdas = [[str(c) for c in cabecera]] + [[str(c) for c in f] for f in filas]
    anchos = [max(len(f[i]) for f in celdas) for i in range(len(cabecera))]
    lineas = ["  ".join(c.ljust(a) for c, a in zip(f, anchos)).rstrip() for f in celdas]
    lineas.insert(1, "  ".join("─" * a for a in anchos))
    return "\n".join(lineas)


class RenderizadorTexto:
    """Salida de consola"""

    def cotas(self, resultados: Sequence[ResultadoCota]) -> str:
        filas = []
        for r in resultados:
            res = r.resultado
            if res is None:
                filas.append([r.spec.model, r.parametros, "", "", "", "", f"ERROR: {r.mensaje}", "", ""])
                continue
            cfg = res.config
            filas.append([
                r.spec.model, r.parametros, cfg.get("method", ""), cfg.get("degree", ""),
                "" if cfg.get("lambda") is None else cfg["lambda"],
                res.direction.value,
                SIN_COTA if res.bound is None else _numero(res.bound),
                _numero(res.bracket_width, ".1e"),
                res.inconclusive_count,
            ])
        return tabla_texto(
            ["model", "params", "method", "degree", "lambda", "direction", "bound", "width", "inconcl."],
            filas,
        )

    def barrido(self, barrido: ResultadoBarrido) -> str:
        filas = [[f"{f.lam:g}", _numero(f.upper) or SIN_COTA, _numero(f.lower) or SIN_COTA]
                 for f in barrido.filas]
        return f"{barrido.model} [{barrido.parametros}]\n" + \
            tabla_texto(["lambda", "upper", "lower"], filas)

    def escalado(self, escalado: ResultadoEscalado) -> str:
        """Grado por fila: superior de volumen, superior de superficie, inferior"""
        filas = [[f.degree, _numero(f.upper_volume, ".4f") or "---",
                  _numero(f.upper_surface, ".4f") or "---", _numero(f.lower, ".4f") or "---"]
                 for f in escalado.filas]
        return f"{escalado.model} [{escalado.parametros}]\n" + \
            tabla_texto(["degree", "upper (vol.)", "upper (surf.)", "lower"], filas)

    def oraculo(self, oraculo: ResultadoOraculo) -> str:
        if oraculo.estimacion is None:
            return f"{oraculo.model}: {oraculo.mensaje}"
        e = oraculo.estimacion
        return (f"{oraculo.model} [{oraculo.parametros}] {oraculo.mensaje}  "
                f"intervalo [{e.bracket_lo:.6f}, {e.bracket_hi:.6f}]  "
                f"{len(e.history)} disparos")


# ══════════════════════════════════════════════════════════════
# CONTROLADOR
# ══════════════════════════════════════════════════════════════

class ControladorRenderizado:
    """Fachada: texto para consola y anexado de filas CSV"""

    def __init__(self, config: Optional[ConfiguracionSistema] = None):
        self.csv = RenderizadorCsv(config)
        self.texto = RenderizadorTexto()

    def escribir(self, filas: Sequence[Dict[str, Any]], ruta: Optional[str],
                 columnas: Sequence[str] = CSV_COLUMNAS) -> int:
        """Anexar filas a `ruta` (sin ruta no se escribe nada)"""
        if not ruta or not filas:
            return 0
        GestorArchivos.anexar_csv(filas, ruta, columnas)
        logger.info(f"{len(filas)} filas anexadas a {ruta}")
        return len(filas)

    def escribir_cotas(self, resultados: Sequence[ResultadoCota], ruta: Optional[str]) -> int:
        return self.escribir(self.csv.filas_cota(resultados), ruta)

    def escribir_barrido(self, barrido: ResultadoBarrido, ruta: Optional[str]) -> int:
        return self.escribir(self.csv.filas_barrido(barrido), ruta)

    def escribir_escalado(self, escalado: ResultadoEscalado, ruta: Optional[str]) -> int:
        return self.escribir(self.csv.filas_escalado(escalado), ruta)

    def escribir_oraculo(self, oraculo: ResultadoOraculo, ruta: Optional[str]) -> int:
        if oraculo.estimacion is None:
            return 0
        return self.escribir([self.csv.fila_oraculo(oraculo)], ruta, CSV_COLUMNAS_ORACULO)


def obtener_controlador_renderizado(config: Optional[ConfiguracionSistema] = None) -> ControladorRenderizado:
    return ControladorRenderizado(config)

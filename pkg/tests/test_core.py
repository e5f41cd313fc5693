import pytest

from cli import RunSpec
from config import ConfiguracionSistema
from constants import Direction, Method, Verdict
from core import (
    CODIGO_EXITO, CODIGO_FALLO, CODIGO_USO, CalculadoraCotas, CoreError, PredicadoSos,
    default_shooting_bracket,
)
from bounds import MethodConfig
from models import build_system


@pytest.fixture
def calculadora(monkeypatch):
    """Calculadora con predicados de umbral en lugar del solver SDP"""
    def predicado(self, method, system, cfg, volcado=None):
        if method.direction is Direction.UPPER:
            return lambda c: Verdict.FEASIBLE if c >= 0.71 else Verdict.INFEASIBLE
        return lambda c: Verdict.FEASIBLE if c <= 0.70 else Verdict.INFEASIBLE

    monkeypatch.setattr(CalculadoraCotas, "predicate", predicado)
    return CalculadoraCotas(ConfiguracionSistema())


def test_corrida_superior(calculadora):
    spec = RunSpec("fisher", {"m": 2}, Method.SURFACE_UPPER, degree=2, tol=1e-4)
    r = calculadora.run_bound(spec)
    assert r.codigo == CODIGO_EXITO
    assert r.exito
    assert r.resultado.bound == pytest.approx(0.71, abs=1e-4)
    assert r.parametros == "m=2"
    assert r.resultado.config["method"] == "surface-upper"


def test_celda_encadena_la_cota_inferior(calculadora):
    celda = [
        RunSpec("fisher", {"m": 2}, Method.SURFACE_UPPER, degree=2, tol=1e-4),
        RunSpec("fisher", {"m": 2}, Method.VOLUME_LOWER, degree=2, tol=1e-4),
    ]
    superior, inferior = calculadora.run_cell(celda)
    assert inferior.resultado.bound == pytest.approx(0.70, abs=1e-4)
    # el extremo infactible de la búsqueda inferior es la cota superior
    assert max(c for c, _ in inferior.resultado.bracket_history) == superior.resultado.bound


def test_celdas_secuenciales(calculadora):
    celdas = [[RunSpec("fisher", {"m": m}, Method.SURFACE_UPPER, degree=2, tol=1e-3)]
              for m in (2, 3)]
    resultados = calculadora.run_cells(celdas, jobs=1)
    assert [r.spec.params["m"] for r in resultados] == [2, 3]


def test_inferior_sin_certificado_es_exito(monkeypatch):
    monkeypatch.setattr(CalculadoraCotas, "predicate",
                        lambda self, method, system, cfg, volcado=None: (lambda c: Verdict.INFEASIBLE))
    r = CalculadoraCotas(ConfiguracionSistema()).run_bound(
        RunSpec("fisher", {"m": 2}, Method.VOLUME_LOWER, degree=2))
    assert r.codigo == CODIGO_EXITO
    assert r.resultado.bound is None
    assert r.mensaje == "none_certified"


def test_semilla_fallida_es_codigo_uno(monkeypatch):
    monkeypatch.setattr(CalculadoraCotas, "predicate",
                        lambda self, method, system, cfg, volcado=None: (lambda c: Verdict.INFEASIBLE))
    r = CalculadoraCotas(ConfiguracionSistema()).run_bound(
        RunSpec("fisher", {"m": 2}, Method.SURFACE_UPPER, degree=2))
    assert r.codigo == CODIGO_FALLO
    assert r.resultado.termination.startswith("error:")


@pytest.mark.parametrize("spec", [
    RunSpec("autocat", {"D": "1"}, Method.AUTOCAT_UPPER, degree=4),
    RunSpec("fisher", {"m": 2}, Method.AUTOCAT_UPPER, degree=4),
    RunSpec("fisher", {"m": 2}, Method.VOLUME_UPPER, degree=0),
    RunSpec("fisher", {"m": 2}, "volume-sideways", degree=4),
])
def test_corridas_invalidas_son_codigo_dos(spec):
    r = CalculadoraCotas(ConfiguracionSistema()).run_bound(spec)
    assert r.codigo == CODIGO_USO
    assert r.resultado is None


def test_intervalo_de_disparo_por_defecto():
    lo, hi = default_shooting_bracket(build_system("fisher", {"m": 2}))
    assert lo == pytest.approx(0.09428, abs=1e-4)
    assert hi == pytest.approx(0.9522, abs=1e-4)
    lo, hi = default_shooting_bracket(build_system("autocat", {"D": 2}))
    assert lo == pytest.approx(0.5)
    with pytest.raises(CoreError):
        default_shooting_bracket(build_system("autocat", {"D": 2, "m": 3}))


def test_oraculo_sin_intervalo_analitico_es_codigo_dos():
    r = CalculadoraCotas(ConfiguracionSistema()).run_oracle("autocat", {"D": 2, "m": 3})
    assert r.codigo == CODIGO_USO


def test_oraculo_con_misma_clasificacion_es_codigo_uno():
    r = CalculadoraCotas(ConfiguracionSistema()).run_oracle("fisher", {"m": 2}, (0.8, 1.0), 1e-2)
    assert r.codigo == CODIGO_FALLO
    assert r.model == "fisher"


def test_predicado_sos_vuelca_la_primera_instancia(tmp_path):
    ruta = tmp_path / "instancia.txt"
    predicado = PredicadoSos(Method.SURFACE_UPPER, build_system("fisher", {"m": 2}),
                             MethodConfig(degree=1), ConfiguracionSistema(), volcado=str(ruta))
    resultado = predicado(1.2)
    assert resultado.verdict in (Verdict.FEASIBLE, Verdict.INCONCLUSIVE)
    assert ruta.read_text(encoding="utf-8").startswith("# instancia:")
    assert predicado.evaluaciones == 1

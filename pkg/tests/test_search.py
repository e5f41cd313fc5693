import pytest

from constants import Direction, Method, Verdict
from models import build_system
from search import (
    Evaluador, InconclusiveBracketError, InvalidBracketError, ProblemFamily, SearchError,
    bisect_lower, bisect_upper, degree_escalation, lambda_sweep, non_monotone, search_bound,
)


def umbral_superior(c_umbral):
    """FEASIBLE para c ≥ c_umbral"""
    return lambda c: Verdict.FEASIBLE if c >= c_umbral else Verdict.INFEASIBLE


def umbral_inferior(c_umbral):
    """FEASIBLE (inexistencia) para c ≤ c_umbral"""
    return lambda c: Verdict.FEASIBLE if c <= c_umbral else Verdict.INFEASIBLE


def fabrica(superior=0.71, inferior=0.70):
    def crear(method, cfg):
        if method.direction is Direction.UPPER:
            return umbral_superior(superior)
        return umbral_inferior(inferior)
    return crear


# ── Bisección ────────────────────────────────────────────────

def test_biseccion_superior():
    r = bisect_upper(umbral_superior(0.7), 0.0, 1.0, tol=1e-4)
    assert 0.7 <= r.bound <= 0.7 + 1e-4
    assert r.bracket_width <= 1e-4
    assert r.direction is Direction.UPPER
    assert r.termination == "tolerance"
    assert not r.non_monotone
    # c_lo = 0 no se evalúa
    assert all(c > 0 for c, _ in r.bracket_history)


def test_biseccion_inferior():
    r = bisect_lower(umbral_inferior(0.6), 0.1, 1.0, tol=1e-4)
    assert 0.6 - 1e-4 <= r.bound <= 0.6
    assert r.direction is Direction.LOWER


def test_cota_superior_es_el_menor_factible_visto():
    r = bisect_upper(umbral_superior(0.3), 0.0, 1.0, tol=1e-3)
    factibles = [c for c, v in r.bracket_history if v is Verdict.FEASIBLE]
    assert r.bound == min(factibles)


@pytest.mark.parametrize("c_lo, c_hi", [(0.8, 1.0), (0.0, 0.5)])
def test_intervalo_invalido(c_lo, c_hi):
    with pytest.raises(InvalidBracketError):
        bisect_upper(umbral_superior(0.7), c_lo, c_hi)


def test_extremo_inconcluso():
    with pytest.raises(InconclusiveBracketError):
        bisect_upper(lambda c: Verdict.INCONCLUSIVE, 0.1, 1.0)


def test_tolerancia_y_orden_validados():
    with pytest.raises(SearchError):
        bisect_upper(umbral_superior(0.7), 0.0, 1.0, tol=0.0)
    with pytest.raises(InvalidBracketError):
        bisect_lower(umbral_inferior(0.7), 1.0, 0.5)


def test_todas_las_evaluaciones_inconclusas():
    def predicado(c):
        if c == 1.0:
            return Verdict.FEASIBLE
        if c == 0.5:
            return Verdict.INFEASIBLE
        return Verdict.INCONCLUSIVE

    r = bisect_upper(predicado, 0.5, 1.0, tol=1e-2)
    assert r.termination == "all_inconclusive"
    assert r.bound == 1.0
    assert r.inconclusive_count == len(r.bracket_history) - 2
    assert not r.exito


def test_inconclusos_cuentan_como_no_factibles():
    def predicado(c):
        if 0.6 < c < 0.8:
            return Verdict.INCONCLUSIVE
        return Verdict.FEASIBLE if c >= 0.6 else Verdict.INFEASIBLE

    r = bisect_upper(predicado, 0.0, 1.0, tol=1e-4)
    assert r.bound >= 0.8
    assert r.inconclusive_count > 0


def test_no_monotonia_detectada():
    historial = [(0.5, Verdict.FEASIBLE), (0.8, Verdict.INFEASIBLE)]
    assert non_monotone(historial, Direction.UPPER)
    assert not non_monotone(historial, Direction.LOWER)
    assert not non_monotone([(0.5, Verdict.FEASIBLE)], Direction.UPPER)


def test_evaluador_memoriza():
    llamadas = []

    def predicado(c):
        llamadas.append(c)
        return Verdict.FEASIBLE

    evaluar = Evaluador(predicado)
    evaluar(0.5)
    evaluar(0.5)
    assert llamadas == [0.5]
    assert evaluar.historial == [(0.5, Verdict.FEASIBLE)]


def test_replay_determinista():
    a = bisect_upper(umbral_superior(0.4321), 0.0, 1.0, tol=1e-5)
    b = bisect_upper(umbral_superior(0.4321), 0.0, 1.0, tol=1e-5)
    assert a.bracket_history == b.bracket_history
    assert a.bound == b.bound


# ── Siembra ──────────────────────────────────────────────────

def test_busqueda_superior_sembrada_con_la_cota_analitica():
    s = build_system("fisher", {"m": 2})
    r = search_bound(umbral_superior(0.7071), s, Direction.UPPER, tol=1e-4)
    assert r.bound == pytest.approx(0.7071, abs=1e-4)
    # primer punto evaluado: cota analítica × 1.01
    assert r.bracket_history[0][0] == pytest.approx(0.9428 * 1.01, abs=1e-4)


def test_siembra_superior_se_expande():
    s = build_system("fisher", {"m": 2})
    r = search_bound(umbral_superior(1.2), s, Direction.UPPER, tol=1e-3)
    assert r.bound == pytest.approx(1.2, abs=1e-3)


def test_busqueda_inferior_sin_certificado():
    s = build_system("fisher", {"m": 2})
    r = search_bound(lambda c: Verdict.INFEASIBLE, s, Direction.LOWER, upper_hint=0.71)
    assert r.bound is None
    assert r.termination == "none_certified"
    assert r.mensaje == "none certified"


def test_busqueda_inferior_usa_la_pista_superior():
    s = build_system("fisher", {"m": 2})
    r = search_bound(umbral_inferior(0.70), s, Direction.LOWER, tol=1e-4, upper_hint=0.71)
    assert r.bound == pytest.approx(0.70, abs=1e-4)
    assert max(c for c, _ in r.bracket_history) == 0.71


# ── Familias ─────────────────────────────────────────────────

def test_familia_registra_errores_de_intervalo():
    s = build_system("fisher", {"m": 2})
    familia = ProblemFamily(s, lambda method, cfg: (lambda c: Verdict.INFEASIBLE))
    r = familia.run(Method.SURFACE_UPPER, 2)
    assert r.bound is None
    assert r.termination.startswith("error:")
    assert r.config["method"] == "surface-upper"


def test_barrido_en_lambda():
    familia = ProblemFamily(build_system("fisher", {"m": 2}), fabrica())
    filas = lambda_sweep(familia, [1.0, 3.0], degree=2)
    assert [f.lam for f in filas] == [1.0, 3.0]
    for f in filas:
        assert f.upper == pytest.approx(0.71, abs=1e-4)
        assert f.lower == pytest.approx(0.70, abs=1e-4)
        assert f.results["upper"].config["lambda"] == f.lam


def test_barrido_vacio():
    familia = ProblemFamily(build_system("fisher", {"m": 2}), fabrica())
    with pytest.raises(SearchError):
        lambda_sweep(familia, [], degree=2)


def test_escalado_en_grado():
    familia = ProblemFamily(build_system("fisher", {"m": 2}), fabrica())
    filas = degree_escalation(familia, [1, 2])
    assert [f.degree for f in filas] == [1, 2]
    assert filas[0].upper_surface == pytest.approx(0.71, abs=1e-4)
    assert filas[0].results["upper_volume"].config["method"] == "volume-upper"
    with pytest.raises(SearchError):
        degree_escalation(familia, [3, 1])


def test_escalado_autocatalisis_sin_superficie():
    familia = ProblemFamily(build_system("autocat", {"D": 2}), fabrica(1.05, 1.04))
    fila, = degree_escalation(familia, [2])
    assert fila.upper_surface is None
    assert "upper_surface" not in fila.results
    assert fila.lower == pytest.approx(1.04, abs=1e-4)

"""
Corridas completas con el solver SDP contra valores publicados.
Lentas: se ejecutan con `pytest -m slow`. Cada prueba tiene su presupuesto
de tiempo de reloj.
"""

import math
import time
from contextlib import contextmanager

import pytest

from cli import RunSpec
from config import ConfiguracionSistema
from constants import LAMBDA_COTA_INFERIOR_TABLAS, Method
from core import CalculadoraCotas
from models import autocat_analytic_bounds, build_system, fisher_analytic_upper
from oracle import estimate_cstar_shooting

pytestmark = pytest.mark.slow

# (superior, inferior) con grado 20, m = 2..6
FISHER_GRADO_20 = {
    2: (0.7071, 0.7068),
    3: (0.4632, 0.4629),
    4: (0.3467, 0.3465),
    5: (0.2776, 0.2774),
    6: (0.2317, 0.2315),
}


@pytest.fixture(scope="module")
def calculadora():
    return CalculadoraCotas(ConfiguracionSistema())


@contextmanager
def presupuesto(segundos: float):
    inicio = time.perf_counter()
    yield
    transcurrido = time.perf_counter() - inicio
    assert transcurrido < segundos, f"{transcurrido:.1f} s > {segundos} s"


def _cota(calculadora, model, params, method, degree, lam=None, epsilon=None, upper_hint=None):
    spec = RunSpec(model, params, method, degree=degree, lam=lam, epsilon=epsilon, tol=1e-4)
    r = calculadora.run_bound(spec, upper_hint=upper_hint)
    assert r.codigo == 0, r.mensaje
    return r.resultado


def _limpia(resultado):
    """Bisección cerrada por tolerancia y sin saltos de monotonía"""
    return resultado.termination == "tolerance" and not resultado.non_monotone


def test_superficie_grado_uno_reproduce_la_cota_cerrada(calculadora):
    with presupuesto(10):
        for m in (2, 3, 4, 5):
            r = _cota(calculadora, "fisher", {"m": m}, Method.SURFACE_UPPER, 1)
            assert r.bound == pytest.approx(fisher_analytic_upper(m), abs=2e-4)
            assert _limpia(r)


def test_fisher_cuadratico_es_agudo(calculadora):
    with presupuesto(30):
        superior = _cota(calculadora, "fisher", {"m": 2}, Method.SURFACE_UPPER, 2)
        assert superior.bound == pytest.approx(1 / math.sqrt(2), abs=5e-4)
        inferior = _cota(calculadora, "fisher", {"m": 2}, Method.VOLUME_LOWER, 8,
                         lam=LAMBDA_COTA_INFERIOR_TABLAS, upper_hint=superior.bound)
        assert inferior.bound >= 0.6968 - 2e-3
        assert inferior.bound <= superior.bound


def test_tabla_fisher_grado_20(calculadora):
    with presupuesto(600):
        for m, (publicada_sup, publicada_inf) in FISHER_GRADO_20.items():
            superior = _cota(calculadora, "fisher", {"m": m}, Method.SURFACE_UPPER, 20)
            inferior = _cota(calculadora, "fisher", {"m": m}, Method.VOLUME_LOWER, 20,
                             lam=LAMBDA_COTA_INFERIOR_TABLAS, upper_hint=superior.bound)
            assert superior.bound == pytest.approx(publicada_sup, abs=2e-3), m
            assert inferior.bound == pytest.approx(publicada_inf, abs=2e-3), m
            assert 0 <= superior.bound - inferior.bound < 5e-3, m


def test_quimiotaxis_grado_reducido(calculadora):
    params = {"k": 2, "q": 1, "b": 1}
    with presupuesto(60):
        superior = _cota(calculadora, "chemo", params, Method.SURFACE_UPPER, 12)
        inferior = _cota(calculadora, "chemo", params, Method.VOLUME_LOWER, 12,
                         lam=LAMBDA_COTA_INFERIOR_TABLAS, upper_hint=superior.bound)
        assert inferior.bound <= 0.8239 <= superior.bound
        assert superior.bound - inferior.bound < 1e-2


def test_autocatalisis_difusion_grande(calculadora):
    params = {"D": "2", "m": 2}
    lo, hi = autocat_analytic_bounds(2.0)
    with presupuesto(300):
        superior = _cota(calculadora, "autocat", params, Method.AUTOCAT_UPPER, 6)
        inferior = _cota(calculadora, "autocat", params, Method.AUTOCAT_LOWER, 6,
                         upper_hint=superior.bound)
        assert lo - 1e-6 <= inferior.bound <= superior.bound <= hi + 1e-6
        assert superior.bound - inferior.bound < 1e-2


@pytest.mark.parametrize("D", ["0.25", "0.5"])
def test_autocatalisis_difusion_pequena_cota_superior(calculadora, D):
    lo, hi = autocat_analytic_bounds(float(D))
    with presupuesto(150):
        superior = _cota(calculadora, "autocat", {"D": D, "m": 2}, Method.AUTOCAT_UPPER, 6)
        assert lo - 1e-6 <= superior.bound <= hi + 1e-6


@pytest.mark.xfail(strict=False,
                   reason="con D < 1 la cara w = 0 usa una cota cuadrática que puede no certificar")
@pytest.mark.parametrize("D", ["0.25", "0.5"])
def test_autocatalisis_difusion_pequena_intervalo(calculadora, D):
    params = {"D": D, "m": 2}
    lo, hi = autocat_analytic_bounds(float(D))
    with presupuesto(300):
        superior = _cota(calculadora, "autocat", params, Method.AUTOCAT_UPPER, 6)
        inferior = _cota(calculadora, "autocat", params, Method.AUTOCAT_LOWER, 6,
                         upper_hint=superior.bound)
        assert inferior.bound is not None
        assert lo - 1e-6 <= inferior.bound <= superior.bound
        assert superior.bound - inferior.bound < 1e-2


def test_prefactor_asintotico(calculadora):
    params = {"D": "10", "m": 2}
    with presupuesto(300):
        superior = _cota(calculadora, "autocat", params, Method.AUTOCAT_UPPER, 10)
        inferior = _cota(calculadora, "autocat", params, Method.AUTOCAT_LOWER, 10,
                         upper_hint=superior.bound)
        medio = 0.5 * (superior.bound + inferior.bound)
        assert medio == pytest.approx(2.66, abs=0.02)
        assert medio / math.sqrt(10) == pytest.approx(0.842, abs=0.01)


@pytest.mark.parametrize("m, publicada", [(2, 0.7071), (3, 0.4632), (4, 0.3467)])
def test_disparo_dentro_del_intervalo_certificado(calculadora, m, publicada):
    superior = _cota(calculadora, "fisher", {"m": m}, Method.SURFACE_UPPER, 8)
    inferior = _cota(calculadora, "fisher", {"m": m}, Method.VOLUME_LOWER, 8,
                     lam=LAMBDA_COTA_INFERIOR_TABLAS, upper_hint=superior.bound)
    with presupuesto(30):
        estimacion = estimate_cstar_shooting(build_system("fisher", {"m": m}),
                                             (0.5 * inferior.bound, 1.01 * superior.bound), tol=1e-5)
    assert estimacion.estimate == pytest.approx(publicada, abs=1e-3)
    assert inferior.bound - 1e-4 <= estimacion.estimate <= superior.bound + 1e-4

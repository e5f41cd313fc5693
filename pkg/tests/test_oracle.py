import pytest

from constants import ShootClassification
from models import build_system
from oracle import (
    OracleError, SameClassificationError, estimate_cstar_shooting, shoot, shoot_autocat,
    shoot_scalar, unstable_direction,
)


def test_direccion_inestable_entra_en_la_region():
    s = build_system("fisher", {"m": 1})
    d = unstable_direction(s, 2.5)
    assert d[0] < 0 and d[1] < 0
    assert abs(sum(x * x for x in d) - 1.0) < 1e-12


def test_fisher_lineal_por_encima_de_dos_conecta():
    resultado = shoot_scalar(build_system("fisher", {"m": 1}), 2.5)
    assert resultado.classification is ShootClassification.CONNECTED
    assert resultado.arc_length > 0


def test_fisher_cuadratico_lento_sale_por_el_frente():
    resultado = shoot(build_system("fisher", {"m": 2}), 0.5)
    assert resultado.classification is ShootClassification.EXITED_FRONT
    u, v = resultado.exit_point
    assert abs(u) < 1e-8
    assert v < 0


def test_disparo_escalar_rechaza_sistema_3d():
    with pytest.raises(OracleError):
        shoot_scalar(build_system("autocat", {"D": 2}), 1.2)
    with pytest.raises(OracleError):
        shoot_autocat(build_system("fisher", {"m": 2}), 1.0)


def test_intervalo_invertido():
    with pytest.raises(OracleError):
        estimate_cstar_shooting(build_system("fisher", {"m": 2}), (1.0, 0.5))


def test_misma_clasificacion_en_ambos_extremos():
    with pytest.raises(SameClassificationError) as info:
        estimate_cstar_shooting(build_system("fisher", {"m": 2}), (0.8, 1.0), tol=1e-2)
    assert info.value.clasificacion is ShootClassification.CONNECTED


@pytest.mark.slow
@pytest.mark.parametrize("clave, params, intervalo, esperado, tol", [
    ("fisher", {"m": 2}, (0.5, 1.0), 0.7071, 1e-4),
    ("fisher", {"m": 3}, (0.3, 0.7), 0.4632, 1e-3),
    ("fisher", {"m": 4}, (0.2, 0.6), 0.3467, 1e-3),
    ("chemo", {"k": 2, "q": 1, "b": 1}, (0.5, 1.4), 0.8239, 1e-3),
])
def test_estimacion_por_disparo(clave, params, intervalo, esperado, tol):
    estimacion = estimate_cstar_shooting(build_system(clave, params), intervalo, tol=1e-5)
    assert not estimacion.undetermined
    assert estimacion.estimate == pytest.approx(esperado, abs=tol)
    assert estimacion.bracket_hi - estimacion.bracket_lo <= 1e-5


@pytest.mark.slow
@pytest.mark.parametrize("c, esperado", [
    (1.2, ShootClassification.CONNECTED),
    (0.9, ShootClassification.EXITED_FRONT),
])
def test_disparo_autocatalisis(c, esperado):
    assert shoot_autocat(build_system("autocat", {"D": 2}), c).classification is esperado

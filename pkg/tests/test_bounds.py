from fractions import Fraction

import pytest

from bounds import (
    IncompatibleSystemError, MethodConfig, MethodConfigError, auxiliary_function, barrier_weight,
    build_program, check_compatible, compact_autocat_region, phase_box, reverify_surface,
    surface_integral, trapping_expression,
)
from constants import ConstraintKind, Method, Verdict
from models import build_system
from polyalgebra import AffinePolynomial, Polynomial
from sdp import SosCertificate
from sos import solve


@pytest.fixture
def fisher2():
    return build_system("fisher", {"m": 2})


@pytest.fixture
def autocat_lento():
    return build_system("autocat", {"D": "0.5"})


# ── Configuración ────────────────────────────────────────────

def test_lambda_por_defecto_del_metodo():
    assert MethodConfig.for_method(Method.VOLUME_LOWER, 4).lam == 1e3
    assert MethodConfig.for_method(Method.VOLUME_UPPER, 4).lam == 3.0
    assert MethodConfig.for_method(Method.SURFACE_UPPER, 4).lam is None
    assert MethodConfig.for_method(Method.AUTOCAT_LOWER, 4, lam=5.0).lam == 5.0


@pytest.mark.parametrize("kwargs", [
    {"degree": 0},
    {"degree": 4, "epsilon": -1e-4},
    {"degree": 4, "lam": 0.0},
    {"degree": 4, "h": -1.0},
])
def test_configuracion_invalida(kwargs):
    with pytest.raises(MethodConfigError):
        MethodConfig(**kwargs)


def test_volumen_exige_lambda(fisher2):
    with pytest.raises(MethodConfigError):
        build_program(Method.VOLUME_UPPER, fisher2, 1.0, MethodConfig(degree=2))


# ── Compatibilidad ───────────────────────────────────────────

def test_metodos_de_autocatalisis_solo_en_3d(fisher2, autocat_lento):
    with pytest.raises(IncompatibleSystemError):
        check_compatible(Method.AUTOCAT_UPPER, fisher2)
    with pytest.raises(IncompatibleSystemError):
        check_compatible(Method.SURFACE_UPPER, autocat_lento)
    check_compatible(Method.AUTOCAT_LOWER, autocat_lento)
    check_compatible(Method.VOLUME_LOWER, fisher2)


def test_velocidad_no_positiva(fisher2):
    with pytest.raises(MethodConfigError):
        build_program(Method.SURFACE_UPPER, fisher2, 0, MethodConfig(degree=2))


# ── Construcción de programas ────────────────────────────────

def test_programa_de_superficie(fisher2):
    prog = build_program(Method.SURFACE_UPPER, fisher2, 0.9, MethodConfig(degree=2))
    assert [r.name for r in prog.constraints] == ["surface", "N_nonpositive"]
    assert [s.name for s in prog.scalar_constraints] == ["N_origin"]
    assert prog.metadata["surface"]["basis"] == "y-homogeneous"
    assert set(prog.templates) == {"N"}
    assert prog.templates["N"].nvars == 1


def test_programa_de_volumen_superior(fisher2):
    cfg = MethodConfig.for_method(Method.VOLUME_UPPER, 2)
    prog = build_program(Method.VOLUME_UPPER, fisher2, 0.9, cfg)
    assert [r.name for r in prog.constraints] == ["trapping", "top_edge"]
    # grado de multiplicador: grado + m, rebajado a par; el producto de la caja, dos menos
    assert prog.metadata["trapping"]["sigma"] == [4, 4, 2]
    assert prog.metadata["trapping"]["zeros"] == [[0.0, 0.0]]
    assert prog.metadata["trapping"]["weight"] == "1"

    con_h = build_program(Method.VOLUME_UPPER, fisher2, 0.9,
                          MethodConfig.for_method(Method.VOLUME_UPPER, 2, h=0.5))
    assert [r.name for r in con_h.constraints] == ["trapping", "top_edge", "left_edge", "bottom_edge"]


def test_programa_de_volumen_inferior(fisher2):
    prog = build_program(Method.VOLUME_LOWER, fisher2, 0.5,
                         MethodConfig.for_method(Method.VOLUME_LOWER, 2))
    assert [s.name for s in prog.scalar_constraints] == ["V_below_origin", "V_source"]
    assert all(s.kind is ConstraintKind.EQ0 for s in prog.scalar_constraints)
    assert prog.metadata["trapping"]["zeros"] == [[1.0, 0.0]]
    assert prog.metadata["top_edge"]["zeros"] == [[1.0]]
    # la caja cubre la variedad inestable: √(2∫u²(1−u)) = √(1/6)
    assert prog.metadata["domain"]["h"] >= (1 / 6) ** 0.5

    mas_honda = build_program(Method.VOLUME_LOWER, fisher2, 0.5,
                              MethodConfig.for_method(Method.VOLUME_LOWER, 2, h=2.0))
    assert mas_honda.metadata["domain"]["h"] == 2.0
    somera = build_program(Method.VOLUME_LOWER, fisher2, 0.5,
                           MethodConfig.for_method(Method.VOLUME_LOWER, 2, h=0.01))
    assert somera.metadata["domain"]["h"] == prog.metadata["domain"]["h"]


def test_programas_de_autocatalisis(autocat_lento):
    superior = build_program(Method.AUTOCAT_UPPER, autocat_lento, 0.4,
                             MethodConfig.for_method(Method.AUTOCAT_UPPER, 2))
    assert [r.name for r in superior.constraints] == ["trapping", "exit_face"]
    fuente = superior.scalar_constraints[0]
    assert fuente.kind is ConstraintKind.GE0
    assert "V_source.slack" in [b.name for b in superior.psd_blocks]

    inferior = build_program(Method.AUTOCAT_LOWER, autocat_lento, 0.4,
                             MethodConfig.for_method(Method.AUTOCAT_LOWER, 2))
    assert [r.name for r in inferior.constraints] == ["trapping", "w0_face"]
    # cuatro desigualdades en U₂
    assert len(inferior.constraints[0].multipliers) == 4


def test_expresion_atrapante():
    u, v = Polynomial.variables(2)
    V = AffinePolynomial.lift(u)
    expr = trapping_expression(V, (v, -u), Fraction(2))
    assert not expr.has_decision_variables()
    assert expr.base == -2 * v - u


def test_funcion_auxiliar_del_certificado(fisher2):
    prog = build_program(Method.SURFACE_UPPER, fisher2, 0.9, MethodConfig(degree=1))
    cert = SosCertificate({"N[0]": 0.0, "N[1]": -1.0}, {})
    N = auxiliary_function(prog, cert, "N")
    assert N.coefficient((1,)) == -1.0
    assert N.coefficient((0,)) == 0


# ── Re-verificación de una superficie fija ───────────────────

def test_integral_de_superficie_fisher_lineal():
    s = build_system("fisher", {"m": 1})
    u = Polynomial.variable(0, 1)
    integral = surface_integral(s, -u, 2).base
    # ∫₀ᵘ s(1−s) − 2s ds
    assert integral == -(u * u).scale(Fraction(1, 2)) - (u ** 3).scale(Fraction(1, 3))


@pytest.mark.parametrize("c, pasa", [(2, True), (3, True), (1.9, False)])
def test_reverificacion_de_superficie(c, pasa):
    s = build_system("fisher", {"m": 1})
    N = -Polynomial.variable(0, 1)
    reporte = reverify_surface(s, N, c)
    assert reporte.passed is pasa
    assert reporte.max_N <= 0


# ── Dominios compactos y pesos ───────────────────────────────

def test_caja_de_fase():
    caja = phase_box(Fraction(1, 2))
    assert len(caja.inequalities) == 3
    assert caja.contains((0.5, -0.25))
    assert caja.contains((1, -0.5))
    assert not caja.contains((0.5, -0.6))
    assert not caja.contains((0.5, 0.1))


def test_region_autocatalisis_acotada_en_w(autocat_lento):
    # techo D/c² = 0.5 / 0.25
    region = compact_autocat_region(autocat_lento, Fraction(1, 2))
    assert region.contains((0.2, 0.5, 1.9))
    assert not region.contains((0.2, 0.5, 2.1))
    assert not region.contains((0.5, 0.2, 0.1))


def test_peso_de_barrera_escalar(fisher2):
    c = Fraction(6836, 10 ** 4)
    peso = barrier_weight(fisher2, c, Fraction(1000))
    assert peso.evaluate((Fraction(0), Fraction(0))) == -1
    # λ·|μ₋| con μ² + cμ − 1 = 0
    mu = (float(c) + (float(c) ** 2 + 4) ** 0.5) / 2
    assert float(peso.evaluate((Fraction(1), Fraction(0)))) == pytest.approx(1000 * mu, rel=1e-3)


def test_peso_de_barrera_autocatalisis():
    s = build_system("autocat", {"D": 2})
    peso = barrier_weight(s, 1, Fraction(1000))
    assert peso.evaluate((Fraction(1), Fraction(1), Fraction(0))) == -1
    assert peso.evaluate((Fraction(0),) * 3) > 1000


def test_peso_en_el_programa_inferior(fisher2):
    prog = build_program(Method.VOLUME_LOWER, fisher2, Fraction(6836, 10 ** 4),
                         MethodConfig.for_method(Method.VOLUME_LOWER, 3))
    assert prog.metadata["trapping"]["weight"] != "1"


def test_peso_de_la_cota_superior_de_autocatalisis():
    s = build_system("autocat", {"D": 2})
    con_peso = build_program(Method.AUTOCAT_UPPER, s, Fraction(11, 10),
                             MethodConfig.for_method(Method.AUTOCAT_UPPER, 2, lam=0.5))
    assert con_peso.metadata["trapping"]["weight"] != "1"
    sin_peso = build_program(Method.AUTOCAT_UPPER, s, Fraction(11, 10),
                             MethodConfig.for_method(Method.AUTOCAT_UPPER, 2, lam=2.0))
    assert sin_peso.metadata["trapping"]["weight"] == "1"


# ── Certificados resueltos ───────────────────────────────────

@pytest.mark.parametrize("c, factible", [("0.6836", True), ("0.75", False)])
def test_cota_inferior_fisher_grado_3(fisher2, c, factible):
    prog = build_program(Method.VOLUME_LOWER, fisher2, Fraction(c),
                         MethodConfig.for_method(Method.VOLUME_LOWER, 3))
    resultado = solve(prog)
    assert (resultado.verdict is Verdict.FEASIBLE) is factible
    if factible:
        assert resultado.datos["verificacion"].passed


@pytest.mark.parametrize("c, factible", [(Fraction(11, 10), True), (Fraction(9, 10), False)])
def test_cota_superior_autocatalisis_con_lambda_pequeno(c, factible):
    s = build_system("autocat", {"D": 2})
    prog = build_program(Method.AUTOCAT_UPPER, s, c,
                         MethodConfig.for_method(Method.AUTOCAT_UPPER, 6, lam=0.5))
    resultado = solve(prog)
    assert (resultado.verdict is Verdict.FEASIBLE) is factible
    if factible:
        assert resultado.datos["verificacion"].passed


@pytest.mark.parametrize("c, factible", [(1, True), (Fraction(6, 5), False)])
def test_cota_inferior_autocatalisis(c, factible):
    s = build_system("autocat", {"D": 2})
    prog = build_program(Method.AUTOCAT_LOWER, s, c,
                         MethodConfig.for_method(Method.AUTOCAT_LOWER, 6, lam=1e3))
    resultado = solve(prog)
    assert (resultado.verdict is Verdict.FEASIBLE) is factible

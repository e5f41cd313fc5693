import numpy as np
import pytest

from constants import ConstraintKind, Verdict
from polyalgebra import AffineExpression, Monomial, Polynomial
from sdp import SosCertificate
from sos import (
    DegreeBookkeepingError, DuplicateNameError, SemialgebraicSet, SosError, SosProgram,
    UndeclaredVariableError, assemble, dump_instance, gram_basis, multiplier_degree,
    solve, spot_check, spot_check_passed, vanishing_basis, verify_certificate,
)


def _intervalo() -> SemialgebraicSet:
    u = Polynomial.variable(0, 1)
    return SemialgebraicSet(1, (u * (1 - u),))


# ── Grados ───────────────────────────────────────────────────

def test_base_de_gram():
    assert gram_basis(1, 4) == [Monomial((0,)), Monomial((1,)), Monomial((2,))]
    assert gram_basis(2, 3) == gram_basis(2, 4)
    with pytest.raises(DegreeBookkeepingError):
        gram_basis(1, -1)


@pytest.mark.parametrize("aux, extra, esperado", [(1, 0, 0), (2, 0, 2), (3, 2, 4), (8, 3, 10)])
def test_grado_de_multiplicador_par(aux, extra, esperado):
    assert multiplier_degree(aux, extra) == esperado


def test_grados_por_defecto_de_la_restriccion():
    u = Polynomial.variable(0, 1)
    prog = SosProgram()
    r = prog.add_nonneg_on_set(2 - u * u, _intervalo(), name="p")
    assert r.degrees["sigma"] == [0]
    assert r.degrees["master"] == 2
    assert r.master.side == 2


def test_grado_de_multiplicador_impar_rechazado():
    u = Polynomial.variable(0, 1)
    with pytest.raises(DegreeBookkeepingError):
        SosProgram().add_nonneg_on_set(2 - u * u, _intervalo(), multiplier_degrees=[1])


def test_producto_mayor_que_el_bloque_maestro():
    u = Polynomial.variable(0, 1)
    with pytest.raises(DegreeBookkeepingError):
        SosProgram().add_nonneg_on_set(2 - u * u, _intervalo(), multiplier_degrees=[2],
                                       master_degree=2)


# ── Declaraciones ────────────────────────────────────────────

def test_nombres_duplicados():
    prog = SosProgram()
    prog.new_polynomial("V", 1, 2)
    with pytest.raises(DuplicateNameError):
        prog.new_scalar("V")


def test_variable_no_declarada():
    with pytest.raises(UndeclaredVariableError):
        SosProgram().add_scalar_constraint(AffineExpression(0, {"x": 1}), ConstraintKind.EQ0)


def test_forma_cuadratica_exige_grado_dos():
    u, y = Polynomial.variables(2)
    conjunto = SemialgebraicSet(2, (u * (1 - u),))
    with pytest.raises(DegreeBookkeepingError):
        SosProgram().add_nonneg_on_set(y, conjunto, quadratic_vars=(1,))
    igualdad = SemialgebraicSet(2, (), (u,))
    with pytest.raises(SosError):
        SosProgram().add_nonneg_on_set(y * y, igualdad, quadratic_vars=(1,))


def test_ensamblado_determinista():
    u = Polynomial.variable(0, 1)

    def construir():
        prog = SosProgram()
        V = prog.new_polynomial("V", 1, 2)
        prog.add_nonneg_on_set(V - u, _intervalo(), name="c")
        prog.add_scalar_constraint(V.evaluate((0,)), ConstraintKind.EQ0, name="origen")
        return assemble(prog)

    a, b = construir(), construir()
    assert a.free_names == b.free_names
    assert a.block_names == ("c.master", "c.sigma1")
    assert (a.A != b.A).nnz == 0
    assert np.array_equal(a.b, b.b)


# ── Resolución y verificación ────────────────────────────────

def test_positivo_en_el_intervalo_factible():
    u = Polynomial.variable(0, 1)
    prog = SosProgram("2 - u²")
    prog.add_nonneg_on_set(2 - u * u, _intervalo(), name="p")
    resultado = solve(prog)
    assert resultado.verdict is Verdict.FEASIBLE
    reporte = resultado.datos["verificacion"]
    assert reporte.passed
    assert reporte.max_residual < 1e-7
    assert spot_check_passed(spot_check(prog, resultado.certificate, n_points=1000))


def test_constante_negativa_infactible():
    prog = SosProgram("-1")
    prog.add_nonneg_on_set(Polynomial.constant(-1, 1), SemialgebraicSet.whole_space(1), name="p")
    assert solve(prog).verdict is Verdict.INFEASIBLE


def test_plantilla_con_restriccion_escalar():
    u = Polynomial.variable(0, 1)
    prog = SosProgram()
    V = prog.new_polynomial("V", 1, 2)
    # V ≥ 1 en [0,1] y V(0) ≥ 3
    prog.add_nonneg_on_set(V - 1, _intervalo(), name="cota")
    prog.add_scalar_constraint(V.evaluate((0,)) - 3, ConstraintKind.GE0, name="inicio")
    resultado = solve(prog)
    assert resultado.verdict is Verdict.FEASIBLE
    valores = resultado.certificate.scalar_assignment
    assert valores["V[0]"] >= 3 - 1e-7


def test_verificacion_de_gram_a_mano():
    u = Polynomial.variable(0, 1)
    prog = SosProgram()
    prog.add_nonneg_on_set(u * u, SemialgebraicSet.whole_space(1), name="cuadrado")
    cert = SosCertificate({}, {"cuadrado.master": np.array([[0.0, 0.0], [0.0, 1.0]])})
    assert verify_certificate(prog, cert).passed

    malo = SosCertificate({}, {"cuadrado.master": np.array([[0.0, 0.0], [0.0, 2.0]])})
    reporte = verify_certificate(prog, malo)
    assert not reporte.passed
    assert reporte.max_residual == pytest.approx(1.0)

    indefinido = SosCertificate({}, {"cuadrado.master": np.array([[-1.0, 0.0], [0.0, 1.0]])})
    assert not verify_certificate(prog, indefinido).passed


def test_volcado_de_tripletes(tmp_path):
    u = Polynomial.variable(0, 1)
    prog = SosProgram()
    prog.add_nonneg_on_set(2 - u * u, _intervalo(), name="p")
    ruta = tmp_path / "instancia.txt"
    dump_instance(assemble(prog), str(ruta))
    lineas = ruta.read_text(encoding="utf-8").splitlines()
    assert lineas[0].startswith("# instancia:")
    assert any(l.startswith("A ") for l in lineas)
    assert sum(1 for l in lineas if l.startswith("b ")) == assemble(prog).n_equalities


# ── Reducción en ceros forzados ──────────────────────────────

def test_base_que_se_anula_en_un_punto():
    base = [Polynomial({m: 1}, 2) for m in gram_basis(2, 2)]
    reducida = vanishing_basis(base, [(1, 0)])
    assert len(reducida) == 2
    assert all(p.evaluate((1, 0)) == 0 for p in reducida)
    u, v = Polynomial.variables(2)
    assert reducida == [u - 1, v]


def test_base_en_dos_puntos():
    base = [Polynomial({m: 1}, 1) for m in gram_basis(1, 4)]
    reducida = vanishing_basis(base, [(0,), (1,)])
    u = Polynomial.variable(0, 1)
    assert reducida == [u * u - u]


def test_multiplicador_nulo_donde_el_generador_es_positivo():
    u = Polynomial.variable(0, 1)
    conjunto = SemialgebraicSet(1, (u, 1 - u))
    prog = SosProgram()
    r = prog.add_nonneg_on_set(1 - u, conjunto, zeros=[(1,)], name="p")
    assert [b.name for _, b in r.multipliers] == ["p.sigma2"]
    assert r.degrees["sides"] == [1, 1]
    assert r.degrees["zeros"] == [[1.0]]


def test_bloque_maestro_anulado_por_completo():
    with pytest.raises(DegreeBookkeepingError):
        SosProgram().add_nonneg_on_set(Polynomial.constant(1, 1),
                                       SemialgebraicSet.whole_space(1), zeros=[(0,)])


def test_cero_forzado_da_margen_positivo_tras_la_reduccion():
    u = Polynomial.variable(0, 1)
    sin_reducir = SosProgram("u² completo")
    sin_reducir.add_nonneg_on_set(u * u, SemialgebraicSet.whole_space(1), name="p")
    assert solve(sin_reducir).verdict is Verdict.INCONCLUSIVE

    reducido = SosProgram("u² reducido")
    reducido.add_nonneg_on_set(u * u, SemialgebraicSet.whole_space(1), zeros=[(0,)], name="p")
    resultado = solve(reducido)
    assert resultado.verdict is Verdict.FEASIBLE
    assert resultado.slack > 1e-7
    assert resultado.datos["verificacion"].passed

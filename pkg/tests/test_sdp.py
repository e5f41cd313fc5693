import numpy as np
import pytest
from scipy import sparse

from constants import Verdict
from sdp import (
    CertificateDimensionError, SdpError, SdpInstance, SolverConfig, SolverConfigError,
    entradas_triangulares, solve_feasibility, verify_instance,
)


def _instancia(libres, bloques, A, b) -> SdpInstance:
    return SdpInstance(
        free_names=tuple(libres),
        block_names=tuple(f"X{k}" for k in range(len(bloques))),
        block_sizes=tuple(bloques),
        A=sparse.csr_matrix(np.atleast_2d(np.asarray(A, dtype=float))),
        b=np.asarray(b, dtype=float),
    )


# ── Configuración ────────────────────────────────────────────

def test_configuracion_por_defecto():
    cfg = SolverConfig.configure()
    assert cfg.to_dict() == {"margin_tol": 1e-7, "duality_gap_tol": 1e-9,
                             "max_iter": 200, "solver": "CLARABEL"}
    assert cfg.opciones()["max_iter"] == 200


@pytest.mark.parametrize("kwargs", [
    {"margin_tol": -1.0},
    {"duality_gap_tol": 0.0},
    {"max_iter": 0},
    {"solver": "MOSEK"},
])
def test_configuracion_invalida(kwargs):
    with pytest.raises(SolverConfigError):
        SolverConfig(**kwargs)


def test_opciones_scs():
    opciones = SolverConfig(solver="SCS").opciones()
    assert opciones["eps_abs"] == opciones["eps_rel"] == 1e-9
    assert opciones["max_iters"] == 20000


# ── Instancia ────────────────────────────────────────────────

def test_forma_de_la_instancia_validada():
    with pytest.raises(SdpError):
        _instancia([], [2], [[1.0, 0.0]], [1.0])


def test_split_reconstruye_matriz_simetrica():
    inst = _instancia(["a"], [2], [[0.0, 1.0, 0.0, 1.0]], [2.0])
    escalares, matrices = inst.split(np.array([5.0, 1.0, 0.5, 1.0]))
    assert escalares == {"a": 5.0}
    assert matrices["X0"] == pytest.approx(np.array([[1.0, 0.5], [0.5, 1.0]]))
    with pytest.raises(CertificateDimensionError):
        inst.split(np.zeros(3))
    assert inst.column_names() == ["a", "X0[0,0]", "X0[0,1]", "X0[1,1]"]


# ── Veredictos ───────────────────────────────────────────────

def test_bloque_uno_por_uno_factible():
    resultado = solve_feasibility(_instancia([], [1], [[1.0]], [1.0]))
    assert resultado.verdict is Verdict.FEASIBLE
    assert resultado.slack == pytest.approx(1.0, abs=1e-6)
    assert resultado.certificate.gram_matrices["X0"][0, 0] == pytest.approx(1.0, abs=1e-7)


def test_bloque_uno_por_uno_infactible():
    resultado = solve_feasibility(_instancia([], [1], [[1.0]], [-1.0]))
    assert resultado.verdict is Verdict.INFEASIBLE
    assert resultado.certificate is None


def test_sin_bloques_resuelve_por_minimos_cuadrados():
    consistente = solve_feasibility(_instancia(["a", "b"], [], [[1.0, 1.0]], [2.0]))
    assert consistente.verdict is Verdict.FEASIBLE
    inconsistente = solve_feasibility(_instancia(["a"], [], [[1.0], [1.0]], [1.0, 2.0]))
    assert inconsistente.verdict is Verdict.INFEASIBLE


def test_instancias_factibles_por_construccion():
    rng = np.random.default_rng(2024)
    for _ in range(20):
        lado = 3
        M = rng.normal(size=(lado, lado))
        X = M @ M.T + 0.1 * np.eye(lado)
        z = np.concatenate([[rng.normal()], [X[i, j] for i, j in entradas_triangulares(lado)]])
        A = rng.normal(size=(4, len(z)))
        inst = _instancia(["a"], [lado], A, A @ z)

        resultado = solve_feasibility(inst)
        assert resultado.verdict is Verdict.FEASIBLE
        residuo, min_eig = verify_instance(inst, resultado.certificate.to_vector(inst))
        assert residuo < 1e-7
        assert min_eig > -1e-8


def test_margen_nulo_es_inconcluso():
    # X[0,0] = 0 y X[1,1] = 1: factible sólo con un bloque singular, t* = 0
    A = [[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]]
    resultado = solve_feasibility(_instancia([], [2], A, [0.0, 1.0]))
    assert resultado.verdict is Verdict.INCONCLUSIVE
    assert abs(resultado.slack) < 1e-7
    assert resultado.certificate is None


def test_margen_positivo_bajo_la_tolerancia_es_inconcluso():
    A = [[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]]
    inst = _instancia([], [2], A, [1e-3, 1.0])
    assert solve_feasibility(inst).verdict is Verdict.FEASIBLE
    estricto = SolverConfig(margin_tol=1e-2)
    assert solve_feasibility(inst, estricto).verdict is Verdict.INCONCLUSIVE

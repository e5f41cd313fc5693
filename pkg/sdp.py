"""
════════════════════════════════════════════════════════════════
COTAS DE VELOCIDAD MÍNIMA — FACTIBILIDAD SDP
════════════════════════════════════════════════════════════════

Decide la factibilidad de programas con bloques PSD densos, variables
escalares libres y restricciones lineales de igualdad.

Se resuelve el problema de margen

    maximizar t   s.a.  X_k − t·I ⪰ 0,  A·z = b,  t ≤ 1

con un método de punto interior (Clarabel vía cvxpy). El punto primal
se proyecta sobre las igualdades por mínimos cuadrados y se verifica
antes de emitir FEASIBLE. Nunca se lanza una excepción por fallo
numérico del solver: se devuelve INCONCLUSIVE con el diagnóstico.
"""

import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import cvxpy as cp
import numpy as np
from scipy import sparse
from scipy.sparse.linalg import lsqr

from constants import Verdict, TOL_RESIDUO, TOL_AUTOVALOR
from utils import Logger, Validadores


logger = Logger("sdp")


# ══════════════════════════════════════════════════════════════
# EXCEPCIONES
# ══════════════════════════════════════════════════════════════

class SdpError(Exception):
    """Error base del módulo SDP"""
    pass


class SolverConfigError(SdpError):
    """Parámetro de solver inválido"""
    def __init__(self, parametro: str, valor):
        self.parametro = parametro
        self.valor = valor
        super().__init__(f"Parámetro de solver inválido: {parametro}={valor!r} (debe ser positivo)")


class CertificateDimensionError(SdpError):
    """El certificado no coincide con las dimensiones del programa"""
    def __init__(self, bloque: str, esperado, recibido):
        self.bloque = bloque
        self.esperado = esperado
        self.recibido = recibido
        super().__init__(f"Dimensión incompatible en '{bloque}': esperado {esperado}, recibido {recibido}")


# ══════════════════════════════════════════════════════════════
# CONFIGURACIÓN DEL SOLVER
# ══════════════════════════════════════════════════════════════

SOLVERS_SOPORTADOS = ("CLARABEL", "SCS")


@dataclass(frozen=True)
class SolverConfig:
    """Tolerancias del problema de margen"""
    margin_tol: float = 1e-7
    duality_gap_tol: float = 1e-9
    max_iter: int = 200
    solver: str = "CLARABEL"

    def __post_init__(self):
        for nombre in ("margin_tol", "duality_gap_tol"):
            ok, _ = Validadores.validar_positivo(nombre, getattr(self, nombre))
            if not ok:
                raise SolverConfigError(nombre, getattr(self, nombre))
        ok, _ = Validadores.validar_entero("max_iter", self.max_iter, 1)
        if not ok:
            raise SolverConfigError("max_iter", self.max_iter)
        if self.solver not in SOLVERS_SOPORTADOS:
            raise SolverConfigError("solver", self.solver)

    @classmethod
    def configure(cls, margin_tol: float = 1e-7, duality_gap_tol: float = 1e-9,
                  max_iter: int = 200, solver: str = "CLARABEL") -> "SolverConfig":
        return cls(margin_tol, duality_gap_tol, max_iter, solver)

    def to_dict(self) -> Dict:
        return {
            "margin_tol": self.margin_tol,
            "duality_gap_tol": self.duality_gap_tol,
            "max_iter": self.max_iter,
            "solver": self.solver,
        }

    def opciones(self) -> Dict:
        """Argumentos de `Problem.solve` para el solver elegido"""
        if self.solver == "SCS":
            return {"max_iters": self.max_iter * 100, "eps_abs": self.duality_gap_tol,
                    "eps_rel": self.duality_gap_tol}
        return {
            "max_iter": self.max_iter,
            "tol_gap_abs": self.duality_gap_tol,
            "tol_gap_rel": self.duality_gap_tol,
            "tol_feas": self.duality_gap_tol,
        }


def configure(margin_tol: float = 1e-7, duality_gap_tol: float = 1e-9,
              max_iter: int = 200) -> SolverConfig:
    return SolverConfig.configure(margin_tol, duality_gap_tol, max_iter)


# ══════════════════════════════════════════════════════════════
# INSTANCIA
# ══════════════════════════════════════════════════════════════

def entradas_triangulares(lado: int) -> List[Tuple[int, int]]:
    """Entradas (i, j) con i ≤ j en orden por filas"""
    return [(i, j) for i in range(lado) for j in range(i, lado)]


@dataclass
class SdpInstance:
    """
    Datos en forma estándar de un programa de factibilidad.

    Vector de incógnitas z: primero las variables libres, luego, por
    bloque, las entradas X[i,j] con i ≤ j. Cada columna representa el
    valor de la entrada simétrica, no la suma de las dos mitades.
    """
    free_names: Tuple[str, ...]
    block_names: Tuple[str, ...]
    block_sizes: Tuple[int, ...]
    A: sparse.csr_matrix
    b: np.ndarray
    row_names: Tuple[str, ...] = ()

    def __post_init__(self):
        if len(self.block_names) != len(self.block_sizes):
            raise SdpError("Nombres y tamaños de bloque no coinciden")
        if self.A.shape != (len(self.b), self.n_columns):
            raise SdpError(f"Matriz A de forma {self.A.shape}, esperada ({len(self.b)}, {self.n_columns})")
        if not np.all(np.isfinite(self.b)):
            raise SdpError("Lado derecho b con valores no finitos")

    @property
    def n_free(self) -> int:
        return len(self.free_names)

    @property
    def n_columns(self) -> int:
        return self.n_free + sum(s * (s + 1) // 2 for s in self.block_sizes)

    @property
    def n_equalities(self) -> int:
        return len(self.b)

    def block_offsets(self) -> List[int]:
        """Columna inicial de cada bloque"""
        offsets, actual = [], self.n_free
        for s in self.block_sizes:
            offsets.append(actual)
            actual += s * (s + 1) // 2
        return offsets

    def column_names(self) -> List[str]:
        nombres = list(self.free_names)
        for nombre, s in zip(self.block_names, self.block_sizes):
            nombres.extend(f"{nombre}[{i},{j}]" for i, j in entradas_triangulares(s))
        return nombres

    def split(self, z: np.ndarray) -> Tuple[Dict[str, float], Dict[str, np.ndarray]]:
        """Vector z → (escalares libres, matrices simétricas por bloque)"""
        z = np.asarray(z, dtype=float)
        if z.shape != (self.n_columns,):
            raise CertificateDimensionError("z", self.n_columns, z.shape)
        escalares = {n: float(z[k]) for k, n in enumerate(self.free_names)}
        matrices = {}
        for nombre, s, inicio in zip(self.block_names, self.block_sizes, self.block_offsets()):
            X = np.zeros((s, s))
            for k, (i, j) in enumerate(entradas_triangulares(s)):
                X[i, j] = X[j, i] = z[inicio + k]
            matrices[nombre] = X
        return escalares, matrices

    def join(self, escalares: Dict[str, float], matrices: Dict[str, np.ndarray]) -> np.ndarray:
        """Inversa de split"""
        z = np.zeros(self.n_columns)
        for k, n in enumerate(self.free_names):
            z[k] = escalares[n]
        for nombre, s, inicio in zip(self.block_names, self.block_sizes, self.block_offsets()):
            X = np.asarray(matrices[nombre], dtype=float)
            if X.shape != (s, s):
                raise CertificateDimensionError(nombre, (s, s), X.shape)
            for k, (i, j) in enumerate(entradas_triangulares(s)):
                z[inicio + k] = X[i, j]
        return z


# ══════════════════════════════════════════════════════════════
# CERTIFICADO Y RESULTADO
# ══════════════════════════════════════════════════════════════

@dataclass
class SosCertificate:
    """Asignación numérica de todas las variables de decisión"""
    scalar_assignment: Dict[str, float]
    gram_matrices: Dict[str, np.ndarray]

    @classmethod
    def from_vector(cls, inst: SdpInstance, z: np.ndarray) -> "SosCertificate":
        escalares, matrices = inst.split(z)
        return cls(escalares, matrices)

    def to_vector(self, inst: SdpInstance) -> np.ndarray:
        return inst.join(self.scalar_assignment, self.gram_matrices)

    def min_eigenvalue(self) -> float:
        return min((float(np.linalg.eigvalsh(X).min()) for X in self.gram_matrices.values() if X.size),
                   default=0.0)


@dataclass
class SolveOutcome:
    """Veredicto de un problema de factibilidad con diagnóstico"""
    verdict: Verdict
    certificate: Optional[SosCertificate] = None
    slack: Optional[float] = None
    iterations: Optional[int] = None
    residual: Optional[float] = None
    min_eigenvalue: Optional[float] = None
    status: str = ""
    mensaje: str = ""
    seconds: float = 0.0
    datos: Dict = field(default_factory=dict)

    @property
    def exito(self) -> bool:
        return self.verdict is Verdict.FEASIBLE


# ══════════════════════════════════════════════════════════════
# VERIFICACIÓN A NIVEL DE INSTANCIA
# ══════════════════════════════════════════════════════════════

def instance_residual(inst: SdpInstance, z: np.ndarray) -> float:
    if inst.n_equalities == 0:
        return 0.0
    return float(np.max(np.abs(inst.A @ z - inst.b)))


def verify_instance(inst: SdpInstance, z: np.ndarray) -> Tuple[float, float]:
    """(residuo máximo de igualdades, autovalor mínimo sobre los bloques)"""
    _, matrices = inst.split(z)
    min_eig = min((float(np.linalg.eigvalsh(X).min()) for X in matrices.values()), default=0.0)
    return instance_residual(inst, z), min_eig


def project_onto_equalities(inst: SdpInstance, z: np.ndarray) -> np.ndarray:
    """Corrección de norma mínima que anula el residuo A·z − b"""
    if inst.n_equalities == 0:
        return z
    r = inst.b - inst.A @ z
    if not np.any(r):
        return z
    dz = lsqr(inst.A, r, atol=1e-15, btol=1e-15, iter_lim=20 * inst.n_columns)[0]
    return z + dz


# ══════════════════════════════════════════════════════════════
# SOLVER
# ══════════════════════════════════════════════════════════════

def _construir_problema(inst: SdpInstance):
    t = cp.Variable()
    partes = []
    libres = None
    if inst.n_free:
        libres = cp.Variable(inst.n_free)
        partes.append(libres)
    bloques = []
    restricciones = [t <= 1]
    for s in inst.block_sizes:
        X = cp.Variable((s, s), symmetric=True)
        bloques.append(X)
        restricciones.append(X - t * np.eye(s) >> 0)
        # columna de (i, j) en la vectorización por columnas
        indices = np.array([j * s + i for i, j in entradas_triangulares(s)])
        partes.append(cp.reshape(X, (s * s,), order="F")[indices])
    if inst.n_equalities:
        z = cp.hstack(partes) if len(partes) > 1 else partes[0]
        restricciones.append(inst.A @ z == inst.b)
    return cp.Problem(cp.Maximize(t), restricciones), t, libres, bloques


def _vector_primal(inst: SdpInstance, libres, bloques) -> np.ndarray:
    escalares = {}
    if libres is not None:
        valores = np.atleast_1d(libres.value)
        escalares = {n: float(v) for n, v in zip(inst.free_names, valores)}
    matrices = {}
    for nombre, X in zip(inst.block_names, bloques):
        M = np.asarray(X.value, dtype=float)
        matrices[nombre] = (M + M.T) / 2
    return inst.join(escalares, matrices)


def _resolver_sin_bloques(inst: SdpInstance, inicio: float) -> SolveOutcome:
    z = project_onto_equalities(inst, np.zeros(inst.n_columns))
    residuo = instance_residual(inst, z)
    verdict = Verdict.FEASIBLE if residuo < TOL_RESIDUO else Verdict.INFEASIBLE
    return SolveOutcome(
        verdict=verdict,
        certificate=SosCertificate.from_vector(inst, z) if verdict is Verdict.FEASIBLE else None,
        residual=residuo,
        status="least_squares",
        mensaje="Sistema lineal sin bloques PSD",
        seconds=time.perf_counter() - inicio,
    )


def solve_feasibility(inst: SdpInstance, cfg: Optional[SolverConfig] = None) -> SolveOutcome:
    """
    Veredicto de tres vías para el problema de margen.

    FEASIBLE: t* ≥ +margin_tol y el punto proyectado verifica
        (residuo < 1e-7, autovalor mínimo > −1e-8).
    INFEASIBLE: el solver declara las igualdades infactibles, o
        t* ≤ −margin_tol con estado óptimo.
    INCONCLUSIVE: todo lo demás, en particular |t*| < margin_tol.

    Un programa con bloques singulares forzados tiene t* = 0; los
    constructores de `sos` eliminan esas direcciones de la base.
    """
    cfg = cfg or SolverConfig()
    inicio = time.perf_counter()

    if not inst.block_sizes:
        return _resolver_sin_bloques(inst, inicio)

    problema, t, libres, bloques = _construir_problema(inst)
    try:
        problema.solve(solver=getattr(cp, cfg.solver), verbose=False, **cfg.opciones())
    except (cp.error.SolverError, ArithmeticError, ValueError) as e:
        logger.warning(f"Fallo del solver: {e}")
        return SolveOutcome(Verdict.INCONCLUSIVE, status="solver_error", mensaje=str(e),
                            seconds=time.perf_counter() - inicio)

    estado = problema.status
    iteraciones = getattr(problema.solver_stats, "num_iters", None)

    def segundos() -> float:
        return time.perf_counter() - inicio

    if estado == cp.INFEASIBLE:
        return SolveOutcome(Verdict.INFEASIBLE, status=estado, iterations=iteraciones,
                            mensaje="Igualdades infactibles", seconds=segundos())
    if estado not in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE) or t.value is None:
        return SolveOutcome(Verdict.INCONCLUSIVE, status=estado, iterations=iteraciones,
                            mensaje=f"Estado del solver: {estado}", seconds=segundos())

    margen = float(t.value)
    if estado == cp.OPTIMAL and margen <= -cfg.margin_tol:
        return SolveOutcome(Verdict.INFEASIBLE, slack=margen, status=estado, iterations=iteraciones,
                            mensaje=f"Margen óptimo negativo t*={margen:.3e}", seconds=segundos())

    z = project_onto_equalities(inst, _vector_primal(inst, libres, bloques))
    residuo, min_eig = verify_instance(inst, z)
    if margen >= cfg.margin_tol and residuo < TOL_RESIDUO and min_eig > TOL_AUTOVALOR:
        return SolveOutcome(
            Verdict.FEASIBLE,
            certificate=SosCertificate.from_vector(inst, z),
            slack=margen, iterations=iteraciones, residual=residuo, min_eigenvalue=min_eig,
            status=estado, mensaje="Certificado verificado", seconds=segundos(),
        )

    logger.debug(f"Sin veredicto: t*={margen:.3e}, residuo={residuo:.3e}, λ_min={min_eig:.3e}")
    return SolveOutcome(
        Verdict.INCONCLUSIVE, slack=margen, iterations=iteraciones, residual=residuo,
        min_eigenvalue=min_eig, status=estado,
        mensaje=f"Certificado no verificado (t*={margen:.3e}, residuo={residuo:.3e}, λ_min={min_eig:.3e})",
        seconds=segundos(),
    )

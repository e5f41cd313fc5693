"""
════════════════════════════════════════════════════════════════
COTAS DE VELOCIDAD MÍNIMA — PROGRAMAS SOS
════════════════════════════════════════════════════════════════

Compila restricciones "expresión ≥ 0 sobre un conjunto semialgebraico"
en un programa de factibilidad semidefinido por bloques, mediante
matrices de Gram y el procedimiento S con multiplicadores SOS:

    expr − Σ sᵢσᵢ − Σ rⱼρⱼ = bᵀQb,   Q ⪰ 0,   σᵢ = bᵢᵀQᵢbᵢ,  Qᵢ ⪰ 0

Cada identidad se impone coeficiente a coeficiente. Las restricciones
puntuales (V(0)=0, −V(0)−ε ≥ 0) se agregan como igualdades lineales o
como bloques PSD de 1×1.
"""

import math
from fractions import Fraction
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse

from constants import (
    ConstraintKind, Verdict, TOL_RESIDUO, TOL_AUTOVALOR,
    PUNTOS_VERIFICACION, TOL_VERIFICACION_PUNTUAL,
)
from polyalgebra import (
    AffineExpression, AffinePolynomial, ArityError, LinearEquation, Monomial,
    Polynomial, match_coefficients, monomials_up_to, racional,
)
from sdp import (
    CertificateDimensionError, SdpInstance, SolveOutcome, SolverConfig,
    SosCertificate, entradas_triangulares, solve_feasibility,
)
from utils import Logger, GestorArchivos


logger = Logger("sos")

__all__ = [
    "SemialgebraicSet", "GramBlock", "SosProgram", "SosCertificate", "CertificateReport",
    "gram_basis", "vanishing_basis", "multiplier_degree", "assemble", "verify_certificate", "spot_check",
    "solve", "dump_instance", "SosError", "DegreeBookkeepingError", "UndeclaredVariableError",
]


# ══════════════════════════════════════════════════════════════
# EXCEPCIONES
# ══════════════════════════════════════════════════════════════

class SosError(Exception):
    """Error base de la compilación SOS"""
    pass


class DegreeBookkeepingError(SosError):
    """Grados de multiplicadores incompatibles con el bloque maestro"""
    def __init__(self, producto: str, grado: int, maximo: Optional[int] = None):
        self.producto = producto
        self.grado = grado
        self.maximo = maximo
        detalle = f" (bloque maestro admite grado {maximo})" if maximo is not None else ""
        super().__init__(f"Grado inválido para {producto}: {grado}{detalle}")


class UndeclaredVariableError(SosError):
    """Una restricción referencia una variable no declarada"""
    def __init__(self, variable: str):
        self.variable = variable
        super().__init__(f"Variable de decisión no declarada: {variable}")


class DuplicateNameError(SosError):
    """Nombre de plantilla o bloque repetido"""
    def __init__(self, nombre: str):
        self.nombre = nombre
        super().__init__(f"Nombre ya registrado en el programa: {nombre}")


# ══════════════════════════════════════════════════════════════
# TIPOS
# ══════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class SemialgebraicSet:
    """{x : sᵢ(x) ≥ 0, rⱼ(x) = 0}; vacío de restricciones = todo el espacio"""
    arity: int
    inequalities: Tuple[Polynomial, ...] = ()
    equalities: Tuple[Polynomial, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "inequalities", tuple(self.inequalities))
        object.__setattr__(self, "equalities", tuple(self.equalities))
        for p in self.inequalities + self.equalities:
            if p.nvars != self.arity:
                raise ArityError(self.arity, p.nvars)

    @classmethod
    def whole_space(cls, arity: int) -> "SemialgebraicSet":
        return cls(arity)

    def extend_arity(self, arity: int) -> "SemialgebraicSet":
        return SemialgebraicSet(
            arity,
            tuple(p.extend_arity(arity) for p in self.inequalities),
            tuple(p.extend_arity(arity) for p in self.equalities),
        )

    def contains(self, punto: Sequence[float], tol: float = 0.0) -> bool:
        return (all(p.evaluate(punto) >= -tol for p in self.inequalities) and
                all(abs(p.evaluate(punto)) <= tol for p in self.equalities))

    def mask(self, puntos: np.ndarray, tol: float = 0.0) -> np.ndarray:
        """Máscara vectorizada de pertenencia"""
        dentro = np.ones(len(puntos), dtype=bool)
        for p in self.inequalities:
            dentro &= p.evaluate_many(puntos) >= -tol
        for p in self.equalities:
            dentro &= np.abs(p.evaluate_many(puntos)) <= tol
        return dentro


@dataclass(frozen=True)
class GramBlock:
    """Bloque PSD simétrico con su base de polinomios (monomios salvo reducción)"""
    name: str
    basis: Tuple[Polynomial, ...]

    @property
    def side(self) -> int:
        return len(self.basis)

    @property
    def nvars(self) -> int:
        return self.basis[0].nvars

    def entry_name(self, i: int, j: int) -> str:
        if i > j:
            i, j = j, i
        return f"{self.name}[{i},{j}]"

    def entry_names(self) -> List[str]:
        return [self.entry_name(i, j) for i, j in entradas_triangulares(self.side)]

    def polynomial(self) -> AffinePolynomial:
        """bᵀQb como polinomio afín en las entradas de Q"""
        n = self.nvars
        terminos = {}
        for i, j in entradas_triangulares(self.side):
            producto = self.basis[i] * self.basis[j]
            terminos[self.entry_name(i, j)] = producto if i == j else producto.scale(2)
        return AffinePolynomial(Polynomial.zero(n), terminos)

    def max_degree(self) -> int:
        return max(p.degree for p in self.basis)


@dataclass
class RegisteredConstraint:
    """Una restricción de no negatividad compilada"""
    name: str
    expr: AffinePolynomial
    domain: SemialgebraicSet
    master: GramBlock
    multipliers: List[Tuple[Polynomial, GramBlock]] = field(default_factory=list)
    equality_multipliers: List[Tuple[Polynomial, AffinePolynomial]] = field(default_factory=list)
    degrees: Dict = field(default_factory=dict)

    def identity(self) -> AffinePolynomial:
        """expr − Σ sᵢσᵢ − Σ rⱼρⱼ − bᵀQb, que debe anularse"""
        residuo = self.expr - self.master.polynomial()
        for s, bloque in self.multipliers:
            residuo = residuo - bloque.polynomial() * s
        for r, rho in self.equality_multipliers:
            residuo = residuo - rho * r
        return residuo


@dataclass
class RegisteredScalar:
    """Restricción puntual lineal en las variables de decisión"""
    name: str
    expression: AffineExpression
    kind: ConstraintKind
    slack: Optional[GramBlock] = None

    def equation(self) -> LinearEquation:
        coeffs = self.expression.coeffs
        if self.slack is not None:
            coeffs[self.slack.entry_name(0, 0)] = -1
        return LinearEquation.from_dict(coeffs, -self.expression.const)


@dataclass
class CertificateReport:
    """Resultado de la verificación a posteriori"""
    min_eigenvalue: float
    max_eig_violation: float
    max_residual: float
    passed: bool
    residuals: Dict[str, float] = field(default_factory=dict)


# ══════════════════════════════════════════════════════════════
# GRADOS
# ══════════════════════════════════════════════════════════════

def gram_basis(arity: int, degree: int) -> List[Monomial]:
    """Monomios de grado ≤ ⌈degree/2⌉ en orden graduado-lexicográfico"""
    if degree < 0:
        raise DegreeBookkeepingError("base de Gram", degree)
    return monomials_up_to(arity, math.ceil(degree / 2))


def multiplier_degree(aux_degree: int, extra: int = 0) -> int:
    """aux_degree + extra, o uno menos, el que sea par"""
    d = aux_degree + extra
    return max(d if d % 2 == 0 else d - 1, 0)


def _par_superior(d: int) -> int:
    return d + (d % 2)


def _par_inferior(d: int) -> int:
    return max(d - (d % 2), 0)


# ══════════════════════════════════════════════════════════════
# REDUCCIÓN FACIAL
# ══════════════════════════════════════════════════════════════

def _nucleo_racional(filas: List[List[Fraction]], n: int) -> List[List[Fraction]]:
    """Base del núcleo por eliminación de Gauss-Jordan exacta"""
    M = [list(f) for f in filas]
    pivotes: List[int] = []
    for col in range(n):
        r = len(pivotes)
        if r == len(M):
            break
        fila = next((i for i in range(r, len(M)) if M[i][col] != 0), None)
        if fila is None:
            continue
        M[r], M[fila] = M[fila], M[r]
        inverso = 1 / M[r][col]
        M[r] = [x * inverso for x in M[r]]
        for i in range(len(M)):
            if i != r and M[i][col] != 0:
                k = M[i][col]
                M[i] = [a - k * b for a, b in zip(M[i], M[r])]
        pivotes.append(col)

    nucleo = []
    for j in (j for j in range(n) if j not in pivotes):
        v = [Fraction(0)] * n
        v[j] = Fraction(1)
        for fila, p in enumerate(pivotes):
            v[p] = -M[fila][j]
        nucleo.append(v)
    return nucleo


def vanishing_basis(base: Sequence[Polynomial],
                    puntos: Sequence[Sequence]) -> List[Polynomial]:
    """
    Base racional del subespacio de span(base) que se anula en todos
    los puntos.

    Si p = bᵀQb es SOS y p(z) = 0, cada polinomio de la base de Gram
    evaluado en z queda en el núcleo de Q; restringir la base a ese
    subespacio elimina la singularidad forzada del bloque. Los pivotes
    se toman en los elementos de menor grado, de modo que la base
    resultante es m − m(z)·1 cuando la base incluye la constante.
    """
    base = list(base)
    if not puntos or not base:
        return base
    n = base[0].nvars
    filas = []
    for punto in puntos:
        if len(punto) != n:
            raise ArityError(n, len(punto))
        z = [racional(x) for x in punto]
        filas.append([Fraction(p.evaluate(z)) for p in base])
    resultado = []
    for v in _nucleo_racional(filas, len(base)):
        p = Polynomial.zero(n)
        for k, p_k in zip(v, base):
            if k:
                p = p + p_k.scale(k)
        resultado.append(p)
    return resultado


# ══════════════════════════════════════════════════════════════
# PROGRAMA
# ══════════════════════════════════════════════════════════════

class SosProgram:
    """
    Programa SOS en construcción.

    Las variables escalares libres se declaran con `new_polynomial` o
    `new_scalar`; los bloques de Gram los crea `add_nonneg_on_set`.
    El orden de registro fija el orden de las columnas al ensamblar.
    """

    def __init__(self, nombre: str = "programa"):
        self.nombre = nombre
        self.scalar_vars: List[str] = []
        self.psd_blocks: List[GramBlock] = []
        self.constraints: List[RegisteredConstraint] = []
        self.scalar_constraints: List[RegisteredScalar] = []
        self.templates: Dict[str, AffinePolynomial] = {}
        self.metadata: Dict[str, Dict] = {}
        self._nombres: set = set()
        self._declaradas: set = set()

    # ── Declaraciones ─────────────────────────────────────────

    def _reservar(self, nombre: str) -> None:
        if nombre in self._nombres:
            raise DuplicateNameError(nombre)
        self._nombres.add(nombre)

    def new_scalar(self, nombre: str) -> AffineExpression:
        self._reservar(nombre)
        self.scalar_vars.append(nombre)
        self._declaradas.add(nombre)
        return AffineExpression(0, {nombre: 1})

    def new_polynomial(self, nombre: str, nvars: int, degree: int,
                       variables: Optional[Sequence[int]] = None) -> AffinePolynomial:
        """
        Plantilla Σ x_α·m_α sobre todos los monomios de grado ≤ degree
        (en las variables indicadas). Los coeficientes se llaman `nombre[α]`.
        """
        self._reservar(nombre)
        terminos = {}
        for mono in monomials_up_to(nvars, degree, variables):
            clave = f"{nombre}[{','.join(map(str, mono.exponents))}]"
            self.scalar_vars.append(clave)
            self._declaradas.add(clave)
            terminos[clave] = Polynomial({mono: 1}, nvars)
        plantilla = AffinePolynomial(Polynomial.zero(nvars), terminos)
        self.templates[nombre] = plantilla
        return plantilla

    def _nuevo_bloque(self, nombre: str, base: Sequence[Polynomial]) -> GramBlock:
        self._reservar(nombre)
        bloque = GramBlock(nombre, tuple(base))
        self.psd_blocks.append(bloque)
        self._declaradas.update(bloque.entry_names())
        return bloque

    # ── Restricciones ─────────────────────────────────────────

    def add_nonneg_on_set(self, expr, conjunto: SemialgebraicSet,
                          multiplier_degrees: Optional[Sequence[int]] = None,
                          master_degree: Optional[int] = None,
                          quadratic_vars: Sequence[int] = (),
                          name: Optional[str] = None,
                          zeros: Sequence[Sequence] = (),
                          multiplier_zeros: Sequence[Sequence] = ()) -> RegisteredConstraint:
        """
        Registrar expr ≥ 0 sobre el conjunto. Muta el programa y
        devuelve la restricción compilada.

        Con `quadratic_vars`, expr debe ser una forma cuadrática en esas
        variables; los bloques usan la base {y_k}⊗{monomios en el resto}
        y los grados se cuentan sólo en las variables restantes.

        `zeros` son puntos donde expr se anula para todo certificado
        (equilibrios con V = 0). La base maestra se reduce a polinomios
        que se anulan en ellos, y la de cada σᵢ también cuando sᵢ > 0
        en el punto. `multiplier_zeros` se aplica a todos los σᵢ.
        """
        expr = AffinePolynomial.lift(expr)
        if expr.nvars != conjunto.arity:
            raise ArityError(conjunto.arity, expr.nvars)
        nombre = name or f"c{len(self.constraints)}"
        n = expr.nvars
        cuadraticas = tuple(sorted(quadratic_vars))
        resto = [i for i in range(n) if i not in cuadraticas]

        if cuadraticas:
            self._validar_forma_cuadratica(expr, conjunto, cuadraticas, nombre)
            grado = lambda p: p.degree_in(resto)
        else:
            grado = lambda p: p.degree

        grado_expr = grado(expr)
        ineqs, eqs = conjunto.inequalities, conjunto.equalities
        grados_s = [grado(s) for s in ineqs]
        grados_r = [grado(r) for r in eqs]

        if multiplier_degrees is None:
            grados_sigma = [_par_inferior(max(grado_expr - d, 0)) for d in grados_s]
            grados_rho = [max(grado_expr - d, 0) for d in grados_r]
        else:
            multiplier_degrees = list(multiplier_degrees)
            if len(multiplier_degrees) not in (len(ineqs), len(ineqs) + len(eqs)):
                raise DegreeBookkeepingError("lista de grados", len(multiplier_degrees))
            grados_sigma = multiplier_degrees[:len(ineqs)]
            grados_rho = (multiplier_degrees[len(ineqs):] if len(multiplier_degrees) > len(ineqs)
                          else [max(grado_expr - d, 0) for d in grados_r])
        for k, d in enumerate(grados_sigma):
            if d < 0 or d % 2:
                raise DegreeBookkeepingError(f"σ{k + 1} de {nombre}", d)

        productos = ([ds + dg for ds, dg in zip(grados_s, grados_sigma)] +
                     [dr + dg for dr, dg in zip(grados_r, grados_rho)])
        requerido = max([_par_superior(grado_expr)] + [_par_superior(p) for p in productos])
        if master_degree is None:
            master_degree = requerido
        else:
            if master_degree % 2:
                raise DegreeBookkeepingError(f"bloque maestro de {nombre}", master_degree)
            for k, p in enumerate(productos):
                if p > master_degree:
                    raise DegreeBookkeepingError(f"producto {k + 1} de {nombre}", p, master_degree)
            if grado_expr > master_degree:
                raise DegreeBookkeepingError(f"expresión {nombre}", grado_expr, master_degree)

        zeros = [tuple(racional(x) for x in z) for z in zeros]
        multiplier_zeros = [tuple(racional(x) for x in z) for z in multiplier_zeros]
        base = lambda d: self._base(n, d, cuadraticas, resto)

        base_maestra = vanishing_basis(base(master_degree), zeros)
        if not base_maestra:
            raise DegreeBookkeepingError(f"bloque maestro de {nombre} (anulado en {zeros})",
                                         master_degree)
        maestro = self._nuevo_bloque(f"{nombre}.master", base_maestra)
        multiplicadores = []
        for k, (s, d) in enumerate(zip(ineqs, grados_sigma)):
            activos = [z for z in zeros if s.evaluate(z) > 0] + multiplier_zeros
            base_sigma = vanishing_basis(base(d), activos)
            if not base_sigma:
                logger.debug(f"{nombre}: σ{k + 1} nulo (s{k + 1} > 0 en {activos})")
                continue
            multiplicadores.append((s, self._nuevo_bloque(f"{nombre}.sigma{k + 1}", base_sigma)))
        multiplicadores_eq = [
            (r, self.new_polynomial(f"{nombre}.rho{k + 1}", n, d))
            for k, (r, d) in enumerate(zip(eqs, grados_rho))
        ]

        restriccion = RegisteredConstraint(
            name=nombre, expr=expr, domain=conjunto, master=maestro,
            multipliers=multiplicadores, equality_multipliers=multiplicadores_eq,
            degrees={
                "expr": grado_expr,
                "master": master_degree,
                "sigma": list(grados_sigma),
                "rho": list(grados_rho),
                "basis": "y-homogeneous" if cuadraticas else "full",
                "zeros": [[float(x) for x in z] for z in zeros],
                "sides": [maestro.side] + [b.side for _, b in multiplicadores],
            },
        )
        self.constraints.append(restriccion)
        self.metadata[nombre] = restriccion.degrees
        logger.debug(f"{nombre}: grado {grado_expr}, maestro {master_degree} "
                     f"(lado {maestro.side}), σ {grados_sigma}")
        return restriccion

    def _base(self, n: int, grado: int, cuadraticas: Tuple[int, ...],
              resto: List[int]) -> List[Polynomial]:
        if not cuadraticas:
            monos = gram_basis(n, grado)
        else:
            resto_monos = monomials_up_to(n, grado // 2, resto)
            monos = [Monomial.variable(k, n) * m for k in cuadraticas for m in resto_monos]
        return [Polynomial({m: 1}, n) for m in monos]

    @staticmethod
    def _validar_forma_cuadratica(expr: AffinePolynomial, conjunto: SemialgebraicSet,
                                  cuadraticas: Tuple[int, ...], nombre: str) -> None:
        for mono in expr.monomials():
            if mono.degree_in(cuadraticas) != 2:
                raise DegreeBookkeepingError(f"{nombre} (no es forma cuadrática en {cuadraticas})",
                                             mono.degree_in(cuadraticas))
        if conjunto.equalities:
            raise SosError(f"{nombre}: igualdades no admitidas con variables cuadráticas")
        for s in conjunto.inequalities:
            if s.degree_in(cuadraticas):
                raise DegreeBookkeepingError(f"conjunto de {nombre} (depende de {cuadraticas})",
                                             s.degree_in(cuadraticas))

    def add_scalar_constraint(self, lin: AffineExpression, kind: ConstraintKind,
                              name: Optional[str] = None) -> RegisteredScalar:
        """lin = 0 (EQ0) o lin ≥ 0 (GE0, con holgura en un bloque 1×1)"""
        nombre = name or f"s{len(self.scalar_constraints)}"
        for v in lin.variables():
            if v not in self._declaradas:
                raise UndeclaredVariableError(v)
        holgura = None
        if kind is ConstraintKind.GE0:
            holgura = self._nuevo_bloque(f"{nombre}.slack", [Polynomial.constant(1, 0)])
        registro = RegisteredScalar(nombre, lin, kind, holgura)
        self.scalar_constraints.append(registro)
        return registro

    # ── Consultas ─────────────────────────────────────────────

    def equations(self) -> List[Tuple[str, LinearEquation]]:
        """Igualdades lineales con su procedencia"""
        resultado = []
        for restriccion in self.constraints:
            identidad = restriccion.identity()
            cero = Polynomial.zero(identidad.nvars)
            monos = identidad.monomials()
            for mono, ec in zip(monos, match_coefficients(identidad, cero)):
                resultado.append((f"{restriccion.name}:{mono.exponents}", ec))
        for escalar in self.scalar_constraints:
            resultado.append((escalar.name, escalar.equation()))
        return [(n, ec) for n, ec in resultado if not ec.is_trivial()]

    def declared(self, variable: str) -> bool:
        return variable in self._declaradas

    def resumen(self) -> Dict:
        return {
            "programa": self.nombre,
            "escalares": len(self.scalar_vars),
            "bloques": [(b.name, b.side) for b in self.psd_blocks],
            "restricciones": list(self.metadata),
        }


# ══════════════════════════════════════════════════════════════
# ENSAMBLADO
# ══════════════════════════════════════════════════════════════

def assemble(prog: SosProgram) -> SdpInstance:
    """Datos en forma estándar con orden de variables determinista"""
    columnas: Dict[str, int] = {n: k for k, n in enumerate(prog.scalar_vars)}
    for bloque in prog.psd_blocks:
        for nombre in bloque.entry_names():
            columnas[nombre] = len(columnas)

    filas, cols, valores, b, nombres_filas = [], [], [], [], []
    for k, (procedencia, ec) in enumerate(prog.equations()):
        for variable, coef in ec.coeffs:
            if variable not in columnas:
                raise UndeclaredVariableError(variable)
            filas.append(k)
            cols.append(columnas[variable])
            valores.append(float(coef))
        b.append(float(ec.rhs))
        nombres_filas.append(procedencia)

    A = sparse.coo_matrix((valores, (filas, cols)), shape=(len(b), len(columnas))).tocsr()
    A.sum_duplicates()
    return SdpInstance(
        free_names=tuple(prog.scalar_vars),
        block_names=tuple(bl.name for bl in prog.psd_blocks),
        block_sizes=tuple(bl.side for bl in prog.psd_blocks),
        A=A,
        b=np.array(b, dtype=float),
        row_names=tuple(nombres_filas),
    )


# ══════════════════════════════════════════════════════════════
# VERIFICACIÓN
# ══════════════════════════════════════════════════════════════

def _asignacion(prog: SosProgram, cert: SosCertificate) -> Dict[str, float]:
    valores: Dict[str, float] = {}
    for nombre in prog.scalar_vars:
        if nombre not in cert.scalar_assignment:
            raise CertificateDimensionError(nombre, "escalar", "ausente")
        valores[nombre] = float(cert.scalar_assignment[nombre])
    for bloque in prog.psd_blocks:
        Q = cert.gram_matrices.get(bloque.name)
        if Q is None:
            raise CertificateDimensionError(bloque.name, (bloque.side, bloque.side), "ausente")
        Q = np.asarray(Q, dtype=float)
        if Q.shape != (bloque.side, bloque.side):
            raise CertificateDimensionError(bloque.name, (bloque.side, bloque.side), Q.shape)
        for i, j in entradas_triangulares(bloque.side):
            valores[bloque.entry_name(i, j)] = (Q[i, j] + Q[j, i]) / 2
    return valores


def verify_certificate(prog: SosProgram, cert: SosCertificate) -> CertificateReport:
    """
    Recalcular cada identidad polinomial con las matrices de Gram dadas.
    Pasa si el residuo máximo de coeficientes es < 1e-7 y el autovalor
    mínimo de Gram es > −1e-8.
    """
    valores = _asignacion(prog, cert)
    residuos: Dict[str, float] = {}
    for restriccion in prog.constraints:
        residuos[restriccion.name] = restriccion.identity().assign(valores).max_abs_coefficient()
    for escalar in prog.scalar_constraints:
        residuos[escalar.name] = abs(float(escalar.equation().residual(valores)))

    min_eig = min(
        (float(np.linalg.eigvalsh(np.asarray(cert.gram_matrices[b.name], dtype=float)).min())
         for b in prog.psd_blocks),
        default=0.0,
    )
    max_residuo = max(residuos.values(), default=0.0)
    return CertificateReport(
        min_eigenvalue=min_eig,
        max_eig_violation=max(0.0, -min_eig),
        max_residual=max_residuo,
        passed=max_residuo < TOL_RESIDUO and min_eig > TOL_AUTOVALOR,
        residuals=residuos,
    )


def spot_check(prog: SosProgram, cert: SosCertificate, n_points: int = PUNTOS_VERIFICACION,
               seed: int = 0, box: float = 1.0) -> Dict[str, float]:
    """
    Valor mínimo de cada expresión restringida en puntos aleatorios de su
    conjunto (muestreo por rechazo en [−box, box]ⁿ). Los conjuntos con
    igualdades no se muestrean.
    """
    rng = np.random.default_rng(seed)
    valores = _asignacion(prog, cert)
    minimos: Dict[str, float] = {}
    for restriccion in prog.constraints:
        if restriccion.domain.equalities:
            continue
        p = restriccion.expr.assign(valores)
        n = p.nvars
        aceptados: List[np.ndarray] = []
        total = 0
        for _ in range(200):
            muestra = rng.uniform(-box, box, size=(n_points, n))
            muestra = muestra[restriccion.domain.mask(muestra)]
            aceptados.append(muestra)
            total += len(muestra)
            if total >= n_points:
                break
        puntos = np.vstack(aceptados)[:n_points]
        if len(puntos):
            minimos[restriccion.name] = float(p.evaluate_many(puntos).min())
    return minimos


def spot_check_passed(minimos: Dict[str, float]) -> bool:
    return all(v >= TOL_VERIFICACION_PUNTUAL for v in minimos.values())


# ══════════════════════════════════════════════════════════════
# RESOLUCIÓN
# ══════════════════════════════════════════════════════════════

def solve(prog: SosProgram, cfg: Optional[SolverConfig] = None,
          instancia: Optional[SdpInstance] = None) -> SolveOutcome:
    """
    Ensamblar, resolver y volver a verificar el certificado contra las
    identidades polinomiales. Un FEASIBLE que no verifica pasa a
    INCONCLUSIVE.
    """
    instancia = instancia or assemble(prog)
    resultado = solve_feasibility(instancia, cfg)
    if resultado.verdict is Verdict.FEASIBLE:
        reporte = verify_certificate(prog, resultado.certificate)
        resultado.datos["verificacion"] = reporte
        if not reporte.passed:
            logger.warning(f"{prog.nombre}: certificado rechazado en la verificación "
                           f"(residuo {reporte.max_residual:.2e}, λ_min {reporte.min_eigenvalue:.2e})")
            resultado.verdict = Verdict.INCONCLUSIVE
            resultado.mensaje = "Certificado rechazado por verify_certificate"
    return resultado


# ══════════════════════════════════════════════════════════════
# VOLCADO
# ══════════════════════════════════════════════════════════════

def dump_instance(inst: SdpInstance, ruta: str) -> None:
    """
    Formato de tripletes dispersos, una entrada por línea:

        A <fila> <bloque> <i> <j> <valor>
        b <fila> <valor>

    El bloque 0 agrupa las variables libres (i = j = índice); los bloques
    PSD se numeran desde 1 y (i, j) es la entrada con i ≤ j.
    """
    ubicacion = [(0, k, k) for k in range(inst.n_free)]
    for numero, s in enumerate(inst.block_sizes, start=1):
        ubicacion.extend((numero, i, j) for i, j in entradas_triangulares(s))

    lineas = [
        f"# instancia: {inst.n_equalities} igualdades, {inst.n_free} libres, "
        f"bloques {list(inst.block_sizes)}",
    ]
    lineas.extend(f"# bloque {k}: {n}" for k, n in enumerate(inst.block_names, start=1))
    coo = inst.A.tocoo()
    for fila, col, valor in sorted(zip(coo.row, coo.col, coo.data)):
        bloque, i, j = ubicacion[col]
        lineas.append(f"A {fila} {bloque} {i} {j} {float(valor)!r}")
    lineas.extend(f"b {k} {float(v)!r}" for k, v in enumerate(inst.b))
    GestorArchivos.guardar_texto("\n".join(lineas) + "\n", ruta)

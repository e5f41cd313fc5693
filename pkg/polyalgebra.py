"""
════════════════════════════════════════════════════════════════
COTAS DE VELOCIDAD MÍNIMA — ÁLGEBRA POLINOMIAL
════════════════════════════════════════════════════════════════

Polinomios multivariados dispersos con coeficientes racionales
exactos (Fraction) o flotantes, y polinomios afines en variables
de decisión escalares (plantillas de V, N y multiplicadores σᵢ).

PRINCIPIOS:
  - Forma canónica: nunca se almacenan coeficientes nulos.
  - Aridad fija: las variables auxiliares se agregan explícitamente
    con `extend_arity`, nunca de forma implícita.
  - Orden graduado-lexicográfico global para bases reproducibles.
  - Todo objeto es inmutable tras su construcción.
"""

from fractions import Fraction
from functools import total_ordering
from itertools import combinations_with_replacement
from numbers import Rational
from typing import (
    Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union
)
from dataclasses import dataclass

import numpy as np


Coef = Union[Fraction, float]
Escalar = Union[int, Fraction, float]

_NOMBRES_DEFECTO = {1: ("u",), 2: ("u", "v"), 3: ("u", "v", "w")}


# ══════════════════════════════════════════════════════════════
# EXCEPCIONES
# ══════════════════════════════════════════════════════════════

class PolyAlgebraError(Exception):
    """Error base del álgebra polinomial"""
    pass


class ArityError(PolyAlgebraError):
    """Aridades incompatibles entre operandos"""
    def __init__(self, esperada: int, recibida: int):
        self.esperada = esperada
        self.recibida = recibida
        super().__init__(f"Aridad incompatible: esperada {esperada}, recibida {recibida}")


class NonlinearDecisionError(PolyAlgebraError):
    """Producto de dos factores con variables de decisión"""
    def __init__(self):
        super().__init__("nonlinear in decision variables")


# ══════════════════════════════════════════════════════════════
# COEFICIENTES
# ══════════════════════════════════════════════════════════════

def racional(x: Escalar) -> Fraction:
    """
    Conversión exacta a racional.

    Los flotantes se leen por su representación decimal más corta,
    de modo que 1e-4 se convierte en 1/10000 y no en su binario.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)) and not isinstance(x, bool):
        return Fraction(x)
    if isinstance(x, (float, np.floating)):
        return Fraction(repr(float(x)))
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"No se puede convertir {x!r} a racional")


def _normalizar(c: Escalar) -> Coef:
    if isinstance(c, bool):
        raise TypeError("Coeficiente booleano")
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, np.integer)):
        return Fraction(int(c))
    if isinstance(c, (float, np.floating)):
        return float(c)
    if isinstance(c, Rational):
        return Fraction(c)
    raise TypeError(f"Coeficiente no soportado: {c!r}")


def _es_escalar(x) -> bool:
    return isinstance(x, (int, float, Fraction, np.integer, np.floating)) and not isinstance(x, bool)


# ══════════════════════════════════════════════════════════════
# MONOMIO
# ══════════════════════════════════════════════════════════════

@total_ordering
@dataclass(frozen=True)
class Monomial:
    """
    Monomio por vector de exponentes.

    Orden graduado-lexicográfico: primero el grado total y, a igual
    grado, el de mayor exponente en la primera variable va antes
    (así la base de grado 1 en (u, v) es [1, u, v]).
    """
    exponents: Tuple[int, ...]

    def __post_init__(self):
        exps = tuple(int(e) for e in self.exponents)
        if any(e < 0 for e in exps):
            raise PolyAlgebraError(f"Exponente negativo en {exps}")
        object.__setattr__(self, "exponents", exps)

    @classmethod
    def one(cls, nvars: int) -> "Monomial":
        return cls((0,) * nvars)

    @classmethod
    def variable(cls, indice: int, nvars: int) -> "Monomial":
        exps = [0] * nvars
        exps[indice] = 1
        return cls(tuple(exps))

    @property
    def nvars(self) -> int:
        return len(self.exponents)

    @property
    def degree(self) -> int:
        return sum(self.exponents)

    def degree_in(self, indices: Iterable[int]) -> int:
        return sum(self.exponents[i] for i in indices)

    def _clave(self) -> Tuple[int, Tuple[int, ...]]:
        return self.degree, tuple(-e for e in self.exponents)

    def __lt__(self, other: "Monomial") -> bool:
        if not isinstance(other, Monomial):
            return NotImplemented
        return self._clave() < other._clave()

    def __mul__(self, other: "Monomial") -> "Monomial":
        if self.nvars != other.nvars:
            raise ArityError(self.nvars, other.nvars)
        return Monomial(tuple(a + b for a, b in zip(self.exponents, other.exponents)))

    def evaluate(self, punto: Sequence):
        valor = 1
        for x, e in zip(punto, self.exponents):
            if e:
                valor = valor * x ** e
        return valor

    def to_str(self, nombres: Optional[Sequence[str]] = None) -> str:
        nombres = nombres or _nombres(self.nvars)
        partes = []
        for nombre, e in zip(nombres, self.exponents):
            if e == 1:
                partes.append(nombre)
            elif e > 1:
                partes.append(f"{nombre}^{e}")
        return "·".join(partes) if partes else "1"

    def __str__(self) -> str:
        return self.to_str()


def _nombres(nvars: int) -> Tuple[str, ...]:
    return _NOMBRES_DEFECTO.get(nvars, tuple(f"x{i}" for i in range(nvars)))


def monomials_up_to(nvars: int, degree: int,
                    variables: Optional[Sequence[int]] = None) -> List[Monomial]:
    """
    Todos los monomios de grado total ≤ degree en las variables indicadas
    (por defecto todas), en orden graduado-lexicográfico.
    """
    if degree < 0:
        return []
    indices = list(range(nvars)) if variables is None else list(variables)
    resultado = []
    for d in range(degree + 1):
        for combo in combinations_with_replacement(indices, d):
            exps = [0] * nvars
            for i in combo:
                exps[i] += 1
            resultado.append(Monomial(tuple(exps)))
    return sorted(set(resultado))


# ══════════════════════════════════════════════════════════════
# POLINOMIO
# ══════════════════════════════════════════════════════════════

class Polynomial:
    """
    Polinomio disperso: mapa Monomio → coeficiente, con aridad fija.
    """

    __slots__ = ("_terms", "nvars")

    def __init__(self, terms: Optional[Mapping] = None, nvars: Optional[int] = None):
        terms = terms or {}
        limpio: Dict[Monomial, Coef] = {}
        for clave, c in terms.items():
            mono = clave if isinstance(clave, Monomial) else Monomial(tuple(clave))
            if nvars is None:
                nvars = mono.nvars
            elif mono.nvars != nvars:
                raise ArityError(nvars, mono.nvars)
            c = _normalizar(c)
            if c != 0:
                limpio[mono] = limpio.get(mono, 0) + c
                if limpio[mono] == 0:
                    del limpio[mono]
        if nvars is None:
            raise PolyAlgebraError("La aridad de un polinomio vacío debe ser explícita")
        self._terms = limpio
        self.nvars = nvars

    # ── Constructores ─────────────────────────────────────────

    @classmethod
    def zero(cls, nvars: int) -> "Polynomial":
        return cls({}, nvars)

    @classmethod
    def constant(cls, c: Escalar, nvars: int) -> "Polynomial":
        return cls({Monomial.one(nvars): c}, nvars)

    @classmethod
    def variable(cls, indice: int, nvars: int) -> "Polynomial":
        if not 0 <= indice < nvars:
            raise PolyAlgebraError(f"Índice de variable {indice} fuera de rango para aridad {nvars}")
        return cls({Monomial.variable(indice, nvars): 1}, nvars)

    @classmethod
    def variables(cls, nvars: int) -> Tuple["Polynomial", ...]:
        return tuple(cls.variable(i, nvars) for i in range(nvars))

    # ── Consultas ─────────────────────────────────────────────

    @property
    def terms(self) -> Dict[Monomial, Coef]:
        return dict(self._terms)

    def items(self) -> Iterator[Tuple[Monomial, Coef]]:
        for mono in sorted(self._terms):
            yield mono, self._terms[mono]

    def monomials(self) -> List[Monomial]:
        return sorted(self._terms)

    def coefficient(self, mono: Union[Monomial, Tuple[int, ...]]) -> Coef:
        if not isinstance(mono, Monomial):
            mono = Monomial(tuple(mono))
        return self._terms.get(mono, Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def degree(self) -> int:
        return max((m.degree for m in self._terms), default=0)

    def degree_in(self, indices: Iterable[int]) -> int:
        indices = list(indices)
        return max((m.degree_in(indices) for m in self._terms), default=0)

    def is_exact(self) -> bool:
        return all(isinstance(c, Fraction) for c in self._terms.values())

    # ── Aritmética ────────────────────────────────────────────

    def _verificar_aridad(self, other: "Polynomial") -> None:
        if other.nvars != self.nvars:
            raise ArityError(self.nvars, other.nvars)

    def _como_polinomio(self, other) -> Optional["Polynomial"]:
        if isinstance(other, Polynomial):
            self._verificar_aridad(other)
            return other
        if _es_escalar(other):
            return Polynomial.constant(other, self.nvars)
        return None

    def __add__(self, other):
        q = self._como_polinomio(other)
        if q is None:
            return NotImplemented
        terms = dict(self._terms)
        for mono, c in q._terms.items():
            terms[mono] = terms.get(mono, 0) + c
        return Polynomial(terms, self.nvars)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial({m: -c for m, c in self._terms.items()}, self.nvars)

    def __sub__(self, other):
        q = self._como_polinomio(other)
        if q is None:
            return NotImplemented
        return self + (-q)

    def __rsub__(self, other):
        q = self._como_polinomio(other)
        if q is None:
            return NotImplemented
        return q + (-self)

    def scale(self, k: Escalar) -> "Polynomial":
        k = _normalizar(k)
        return Polynomial({m: c * k for m, c in self._terms.items()}, self.nvars)

    def __mul__(self, other):
        if _es_escalar(other):
            return self.scale(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._verificar_aridad(other)
        terms: Dict[Monomial, Coef] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                mono = m1 * m2
                terms[mono] = terms.get(mono, 0) + c1 * c2
        return Polynomial(terms, self.nvars)

    def __rmul__(self, other):
        if _es_escalar(other):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, n: int) -> "Polynomial":
        if n < 0:
            raise PolyAlgebraError("Potencia negativa")
        resultado = Polynomial.constant(1, self.nvars)
        base = self
        while n:
            if n & 1:
                resultado = resultado * base
            base = base * base
            n >>= 1
        return resultado

    def __eq__(self, other) -> bool:
        if _es_escalar(other):
            other = Polynomial.constant(other, self.nvars)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.nvars == other.nvars and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.nvars, frozenset(self._terms.items())))

    # ── Cálculo ───────────────────────────────────────────────

    def derivative(self, indice: int) -> "Polynomial":
        """Derivada parcial término a término (regla de la potencia)"""
        self._verificar_indice(indice)
        terms = {}
        for mono, c in self._terms.items():
            e = mono.exponents[indice]
            if e:
                exps = list(mono.exponents)
                exps[indice] = e - 1
                terms[Monomial(tuple(exps))] = c * e
        return Polynomial(terms, self.nvars)

    def antiderivative(self, indice: int) -> "Polynomial":
        """Primitiva en una variable con constante nula (integral definida desde 0)"""
        self._verificar_indice(indice)
        terms = {}
        for mono, c in self._terms.items():
            exps = list(mono.exponents)
            exps[indice] += 1
            divisor = exps[indice]
            terms[Monomial(tuple(exps))] = c / divisor if isinstance(c, float) else c / Fraction(divisor)
        return Polynomial(terms, self.nvars)

    def _verificar_indice(self, indice: int) -> None:
        if not 0 <= indice < self.nvars:
            raise PolyAlgebraError(f"Índice de variable {indice} fuera de rango para aridad {self.nvars}")

    # ── Evaluación y sustitución ──────────────────────────────

    def evaluate(self, punto: Sequence):
        if len(punto) != self.nvars:
            raise ArityError(self.nvars, len(punto))
        total = 0
        for mono, c in self._terms.items():
            total = total + c * mono.evaluate(punto)
        return total

    def evaluate_many(self, puntos: np.ndarray) -> np.ndarray:
        """Evaluación vectorizada en flotante sobre una matriz (n_puntos × aridad)"""
        puntos = np.atleast_2d(np.asarray(puntos, dtype=float))
        if puntos.shape[1] != self.nvars:
            raise ArityError(self.nvars, puntos.shape[1])
        total = np.zeros(puntos.shape[0])
        for mono, c in self._terms.items():
            total += float(c) * np.prod(puntos ** np.array(mono.exponents), axis=1)
        return total

    def substitute(self, indice: int, valor: Escalar) -> "Polynomial":
        """Fijar una variable a un valor, reduciendo la aridad en uno"""
        self._verificar_indice(indice)
        valor = _normalizar(valor)
        terms: Dict[Monomial, Coef] = {}
        for mono, c in self._terms.items():
            exps = list(mono.exponents)
            e = exps.pop(indice)
            nuevo = Monomial(tuple(exps))
            terms[nuevo] = terms.get(nuevo, 0) + c * valor ** e
        return Polynomial(terms, self.nvars - 1)

    def extend_arity(self, nvars: int) -> "Polynomial":
        """Agregar variables al final (las nuevas no aparecen)"""
        if nvars < self.nvars:
            raise ArityError(self.nvars, nvars)
        relleno = (0,) * (nvars - self.nvars)
        return Polynomial({Monomial(m.exponents + relleno): c for m, c in self._terms.items()}, nvars)

    def to_float(self) -> "Polynomial":
        return Polynomial({m: float(c) for m, c in self._terms.items()}, self.nvars)

    def max_abs_coefficient(self) -> float:
        return max((abs(float(c)) for c in self._terms.values()), default=0.0)

    # ── Presentación ──────────────────────────────────────────

    def to_str(self, nombres: Optional[Sequence[str]] = None) -> str:
        if not self._terms:
            return "0"
        partes = []
        for mono, c in self.items():
            texto = mono.to_str(nombres)
            partes.append(f"{c}" if texto == "1" else f"{c}·{texto}")
        return " + ".join(partes)

    def __str__(self) -> str:
        return self.to_str()

    def __repr__(self) -> str:
        return f"Polynomial({self.to_str()}, nvars={self.nvars})"


# ══════════════════════════════════════════════════════════════
# EXPRESIONES AFINES EN VARIABLES DE DECISIÓN
# ══════════════════════════════════════════════════════════════

class AffineExpression:
    """const + Σ coef·x, con x identificadores de variables de decisión"""

    __slots__ = ("const", "_coeffs")

    def __init__(self, const: Escalar = 0, coeffs: Optional[Mapping[str, Escalar]] = None):
        self.const = _normalizar(const)
        self._coeffs: Dict[str, Coef] = {}
        for nombre, c in (coeffs or {}).items():
            c = _normalizar(c)
            if c != 0:
                self._coeffs[nombre] = c

    @property
    def coeffs(self) -> Dict[str, Coef]:
        return dict(self._coeffs)

    def variables(self) -> List[str]:
        return list(self._coeffs)

    def __add__(self, other):
        if _es_escalar(other):
            other = AffineExpression(other)
        if not isinstance(other, AffineExpression):
            return NotImplemented
        coeffs = dict(self._coeffs)
        for nombre, c in other._coeffs.items():
            coeffs[nombre] = coeffs.get(nombre, 0) + c
        return AffineExpression(self.const + other.const, coeffs)

    __radd__ = __add__

    def __neg__(self) -> "AffineExpression":
        return AffineExpression(-self.const, {n: -c for n, c in self._coeffs.items()})

    def __sub__(self, other):
        if _es_escalar(other):
            other = AffineExpression(other)
        if not isinstance(other, AffineExpression):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, k):
        if not _es_escalar(k):
            return NotImplemented
        k = _normalizar(k)
        return AffineExpression(self.const * k, {n: c * k for n, c in self._coeffs.items()})

    __rmul__ = __mul__

    def value(self, asignacion: Mapping[str, float]):
        total = self.const
        for nombre, c in self._coeffs.items():
            total = total + c * asignacion[nombre]
        return total

    def __repr__(self) -> str:
        partes = [f"{c}·{n}" for n, c in self._coeffs.items()]
        return f"AffineExpression({self.const} + {' + '.join(partes) or '0'})"


@dataclass(frozen=True)
class LinearEquation:
    """Σ coeffs[x]·x = rhs"""
    coeffs: Tuple[Tuple[str, Coef], ...]
    rhs: Coef

    @classmethod
    def from_dict(cls, coeffs: Mapping[str, Escalar], rhs: Escalar) -> "LinearEquation":
        limpio = tuple((n, _normalizar(c)) for n, c in coeffs.items() if c != 0)
        return cls(limpio, _normalizar(rhs))

    def variables(self) -> List[str]:
        return [n for n, _ in self.coeffs]

    def is_trivial(self) -> bool:
        return not self.coeffs and self.rhs == 0

    def residual(self, asignacion: Mapping[str, float]):
        return sum((c * asignacion[n] for n, c in self.coeffs), 0) - self.rhs


# ══════════════════════════════════════════════════════════════
# POLINOMIO AFÍN
# ══════════════════════════════════════════════════════════════

class AffinePolynomial:
    """
    base + Σ x·P_x, con x variables de decisión escalares y P_x polinomios.

    La evaluación en una asignación de x es lineal y da un Polynomial.
    """

    __slots__ = ("base", "_var_terms", "nvars")

    def __init__(self, base: Polynomial, var_terms: Optional[Mapping[str, Polynomial]] = None):
        self.base = base
        self.nvars = base.nvars
        self._var_terms: Dict[str, Polynomial] = {}
        for nombre, p in (var_terms or {}).items():
            if p.nvars != self.nvars:
                raise ArityError(self.nvars, p.nvars)
            if not p.is_zero():
                self._var_terms[nombre] = p

    @classmethod
    def lift(cls, p: Union["AffinePolynomial", Polynomial]) -> "AffinePolynomial":
        if isinstance(p, AffinePolynomial):
            return p
        return cls(p)

    @classmethod
    def decision(cls, nombre: str, p: Polynomial) -> "AffinePolynomial":
        """x·p para una única variable de decisión"""
        return cls(Polynomial.zero(p.nvars), {nombre: p})

    @property
    def var_terms(self) -> Dict[str, Polynomial]:
        return dict(self._var_terms)

    def variables(self) -> List[str]:
        return list(self._var_terms)

    def has_decision_variables(self) -> bool:
        return bool(self._var_terms)

    def monomials(self) -> List[Monomial]:
        monos = set(self.base.monomials())
        for p in self._var_terms.values():
            monos.update(p.monomials())
        return sorted(monos)

    @property
    def degree(self) -> int:
        return max([self.base.degree] + [p.degree for p in self._var_terms.values()])

    def degree_in(self, indices: Iterable[int]) -> int:
        indices = list(indices)
        return max([self.base.degree_in(indices)] +
                   [p.degree_in(indices) for p in self._var_terms.values()])

    def is_zero(self) -> bool:
        return self.base.is_zero() and not self._var_terms

    # ── Aritmética ────────────────────────────────────────────

    def _promover(self, other) -> Optional["AffinePolynomial"]:
        if isinstance(other, AffinePolynomial):
            if other.nvars != self.nvars:
                raise ArityError(self.nvars, other.nvars)
            return other
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise ArityError(self.nvars, other.nvars)
            return AffinePolynomial(other)
        if _es_escalar(other):
            return AffinePolynomial(Polynomial.constant(other, self.nvars))
        return None

    def __add__(self, other):
        q = self._promover(other)
        if q is None:
            return NotImplemented
        terms = dict(self._var_terms)
        for nombre, p in q._var_terms.items():
            terms[nombre] = terms[nombre] + p if nombre in terms else p
        return AffinePolynomial(self.base + q.base, terms)

    __radd__ = __add__

    def __neg__(self) -> "AffinePolynomial":
        return AffinePolynomial(-self.base, {n: -p for n, p in self._var_terms.items()})

    def __sub__(self, other):
        q = self._promover(other)
        if q is None:
            return NotImplemented
        return self + (-q)

    def __rsub__(self, other):
        q = self._promover(other)
        if q is None:
            return NotImplemented
        return q + (-self)

    def __mul__(self, other):
        if _es_escalar(other):
            return self.scale(other)
        if isinstance(other, AffinePolynomial):
            if other.nvars != self.nvars:
                raise ArityError(self.nvars, other.nvars)
            if other.has_decision_variables() and self.has_decision_variables():
                raise NonlinearDecisionError()
            if other.has_decision_variables():
                return other * self.base
            other = other.base
        if not isinstance(other, Polynomial):
            return NotImplemented
        if other.nvars != self.nvars:
            raise ArityError(self.nvars, other.nvars)
        return AffinePolynomial(self.base * other,
                                {n: p * other for n, p in self._var_terms.items()})

    def __rmul__(self, other):
        if _es_escalar(other) or isinstance(other, Polynomial):
            return self.__mul__(other)
        return NotImplemented

    def scale(self, k: Escalar) -> "AffinePolynomial":
        return AffinePolynomial(self.base.scale(k), {n: p.scale(k) for n, p in self._var_terms.items()})

    # ── Cálculo (distribuye sobre los términos) ───────────────

    def _mapear(self, f) -> "AffinePolynomial":
        return AffinePolynomial(f(self.base), {n: f(p) for n, p in self._var_terms.items()})

    def derivative(self, indice: int) -> "AffinePolynomial":
        return self._mapear(lambda p: p.derivative(indice))

    def antiderivative(self, indice: int) -> "AffinePolynomial":
        return self._mapear(lambda p: p.antiderivative(indice))

    def substitute(self, indice: int, valor: Escalar) -> "AffinePolynomial":
        return self._mapear(lambda p: p.substitute(indice, valor))

    def extend_arity(self, nvars: int) -> "AffinePolynomial":
        return self._mapear(lambda p: p.extend_arity(nvars))

    # ── Evaluación ────────────────────────────────────────────

    def evaluate(self, punto: Sequence) -> AffineExpression:
        """Valor en un punto del espacio de fases: expresión afín en las variables"""
        return AffineExpression(
            self.base.evaluate(punto),
            {n: p.evaluate(punto) for n, p in self._var_terms.items()},
        )

    def assign(self, valores: Mapping[str, Escalar]) -> Polynomial:
        """Sustituir valores de las variables de decisión"""
        resultado = self.base
        for nombre, p in self._var_terms.items():
            resultado = resultado + p.scale(valores[nombre])
        return resultado

    def __repr__(self) -> str:
        partes = [f"{n}·({p})" for n, p in self._var_terms.items()]
        return f"AffinePolynomial({self.base} + {' + '.join(partes) or '0'})"


Poly = Union[Polynomial, AffinePolynomial]


# ══════════════════════════════════════════════════════════════
# OPERACIONES
# ══════════════════════════════════════════════════════════════

def _verificar_aridades(p: Poly, q: Poly) -> None:
    if p.nvars != q.nvars:
        raise ArityError(p.nvars, q.nvars)


def add(p: Poly, q: Poly) -> Poly:
    _verificar_aridades(p, q)
    if isinstance(q, AffinePolynomial) and isinstance(p, Polynomial):
        return q + p
    return p + q


def mul(p: Poly, q: Poly) -> Poly:
    _verificar_aridades(p, q)
    if isinstance(q, AffinePolynomial) and isinstance(p, Polynomial):
        return q * p
    return p * q


def scale(p: Poly, k: Escalar) -> Poly:
    return p.scale(k)


def partial_derivative(p: Poly, var_index: int) -> Poly:
    return p.derivative(var_index)


def antiderivative(p: Poly, var_index: int) -> Poly:
    return p.antiderivative(var_index)


def evaluate(p: Polynomial, point: Sequence):
    return p.evaluate(point)


def match_coefficients(lhs: Poly, rhs: Poly) -> List[LinearEquation]:
    """
    Igualar coeficiente a coeficiente: una ecuación lineal por monomio
    presente en cualquiera de los dos lados.
    """
    _verificar_aridades(lhs, rhs)
    lhs = AffinePolynomial.lift(lhs)
    rhs = AffinePolynomial.lift(rhs)
    diferencia = lhs - rhs
    monos = sorted(set(lhs.monomials()) | set(rhs.monomials()))
    terminos = diferencia.var_terms
    ecuaciones = []
    for mono in monos:
        coeffs = {n: p.coefficient(mono) for n, p in terminos.items()}
        ecuaciones.append(LinearEquation.from_dict(coeffs, -diferencia.base.coefficient(mono)))
    return ecuaciones

"""
════════════════════════════════════════════════════════════════
COTAS DE VELOCIDAD MÍNIMA — MODELOS
════════════════════════════════════════════════════════════════

Sistemas de ondas viajeras de las tres familias:
  - Fisher–KPP generalizada: u_t = u_xx + uᵐ(1−u)
  - Quimiotaxis: u_t = (uᵏu_x)_x − b·u·u_x + u(1−u^q)
  - Autocatálisis cúbica (sistema 3D con parámetro D/c²)

Las cotas analíticas cerradas sirven de semilla para la bisección.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Optional, Tuple, Any

import numpy as np

from constants import SpeedParameter, MODEL_KEYS
from polyalgebra import Polynomial, racional
from sos import SemialgebraicSet


# ══════════════════════════════════════════════════════════════
# EXCEPCIONES
# ══════════════════════════════════════════════════════════════

class ModelError(Exception):
    """Error base de los modelos"""
    pass


class InvalidParameterError(ModelError):
    """Parámetro fuera del dominio del modelo"""
    def __init__(self, parametro: str, valor: Any, motivo: str):
        self.parametro = parametro
        self.valor = valor
        self.motivo = motivo
        super().__init__(f"Parámetro inválido {parametro}={valor!r}: {motivo}")


class UnitDiffusionError(InvalidParameterError):
    """Autocatálisis con D = 1"""
    def __init__(self):
        super().__init__(
            "D", 1,
            "con D=1 el sistema se reduce a una ecuación escalar tipo Fisher–KPP "
            "(u = v); usar el modelo fisher",
        )


# ══════════════════════════════════════════════════════════════
# MODELO ESCALAR
# ══════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class ScalarRdModel:
    """u_t = (D(u)u_x)_x + a(u)u_x + f(u), todo polinómico en u"""
    D: Polynomial
    a: Polynomial
    f: Polynomial

    def __post_init__(self):
        for nombre in ("D", "a", "f"):
            p = getattr(self, nombre)
            if p.nvars != 1:
                raise InvalidParameterError(nombre, p, "debe ser polinomio en una variable")
        if self.f.evaluate((Fraction(0),)) != 0 or self.f.evaluate((Fraction(1),)) != 0:
            raise InvalidParameterError("f", self.f, "se requiere f(0) = f(1) = 0")
        if not self.D.evaluate((Fraction(1),)) > 0:
            raise InvalidParameterError("D", self.D, "se requiere D(1) > 0")


# ══════════════════════════════════════════════════════════════
# SISTEMA DE ONDAS VIAJERAS
# ══════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class TravellingWaveSystem:
    """
    ẋ = F(x; c), con F = F0 + c·F1 (LINEAR) o F = F0 + F1/c² (INVERSE_SQUARE).

    source es el equilibrio del que parte la onda y target al que llega.
    """
    name: str
    family: str
    variables: Tuple[str, ...]
    F0: Tuple[Polynomial, ...]
    F1: Tuple[Polynomial, ...]
    parameter_kind: SpeedParameter
    source: Tuple[Fraction, ...]
    target: Tuple[Fraction, ...]
    region: SemialgebraicSet
    params: Dict[str, Any] = field(default_factory=dict, compare=False)
    scalar_model: Optional[ScalarRdModel] = None
    multiplier_extra: int = 0
    diffusion: Optional[Fraction] = None

    def __post_init__(self):
        n = len(self.variables)
        if len(self.F0) != n or len(self.F1) != n:
            raise ModelError(f"{self.name}: dimensión de F incompatible con {n} variables")
        for p in self.F0 + self.F1:
            if p.nvars != n:
                raise ModelError(f"{self.name}: aridad {p.nvars} en un sistema de dimensión {n}")
        for punto in (self.source, self.target):
            if any(p.evaluate(punto) != 0 for p in self.F0 + self.F1):
                raise ModelError(f"{self.name}: {punto} no es equilibrio para todo c")
            if not self.region.contains(punto):
                raise ModelError(f"{self.name}: la región no contiene {punto}")

    @property
    def dim(self) -> int:
        return len(self.variables)

    @property
    def exit_index(self) -> Optional[int]:
        """Coordenada de la cara de salida (autocatálisis: v si D<1, u si D>1)"""
        if self.diffusion is None:
            return None
        return 1 if self.diffusion < 1 else 0

    def _velocidad(self, c) -> Fraction:
        c = racional(c)
        if c <= 0:
            raise InvalidParameterError("c", c, "la velocidad debe ser positiva")
        return c

    def field_at(self, c) -> Tuple[Polynomial, ...]:
        """Campo vectorial con c racional exacto sustituido"""
        c = self._velocidad(c)
        factor = c if self.parameter_kind is SpeedParameter.LINEAR else 1 / (c * c)
        return tuple(f0 + f1.scale(factor) for f0, f1 in zip(self.F0, self.F1))

    def jacobian(self, c, punto) -> np.ndarray:
        campo = self.field_at(c)
        return np.array([[float(p.derivative(j).evaluate(punto)) for j in range(self.dim)]
                         for p in campo])

    def describe(self) -> str:
        """Parámetros como `k=v` separados por espacios"""
        return " ".join(f"{k}={v}" for k, v in self.params.items())


# ══════════════════════════════════════════════════════════════
# CONSTRUCTORES
# ══════════════════════════════════════════════════════════════

_U = Polynomial.variable(0, 1)
_UNO = Polynomial.constant(1, 1)


def _entero(nombre: str, valor: Any, minimo: int) -> int:
    try:
        entero = int(valor)
    except (TypeError, ValueError):
        raise InvalidParameterError(nombre, valor, "debe ser entero")
    if entero != racional(valor) or entero < minimo:
        raise InvalidParameterError(nombre, valor, f"debe ser entero ≥ {minimo}")
    return entero


def _racional(nombre: str, valor: Any) -> Fraction:
    try:
        return racional(valor)
    except (TypeError, ValueError, ZeroDivisionError):
        raise InvalidParameterError(nombre, valor, "debe ser un número")


def fisher_kpp(m: int) -> ScalarRdModel:
    m = _entero("m", m, 1)
    return ScalarRdModel(D=_UNO, a=Polynomial.zero(1), f=_U ** m * (_UNO - _U))


def chemotaxis(k: int, q: int, b=0) -> ScalarRdModel:
    k = _entero("k", k, 1)
    q = _entero("q", q, 1)
    b = _racional("b", b)
    if b < 0:
        raise InvalidParameterError("b", b, "debe ser ≥ 0")
    return ScalarRdModel(D=_U ** k, a=_U.scale(-b), f=_U * (_UNO - _U ** q))


def scalar_system(model: ScalarRdModel, name: str = "scalar", family: str = "scalar",
                  params: Optional[Dict[str, Any]] = None, multiplier_extra: int = 0
                  ) -> TravellingWaveSystem:
    """
    u̇ = v,  v̇ = −(c + a(u))·v − D(u)f(u)
    en U₁ = {u(1−u) ≥ 0, −v ≥ 0}, de (1,0) a (0,0).
    """
    u, v = Polynomial.variables(2)
    D, a, f = (p.extend_arity(2) for p in (model.D, model.a, model.f))
    region = SemialgebraicSet(2, (u * (1 - u), -v))
    return TravellingWaveSystem(
        name=name,
        family=family,
        variables=("u", "v"),
        F0=(v, -(a * v) - D * f),
        F1=(Polynomial.zero(2), -v),
        parameter_kind=SpeedParameter.LINEAR,
        source=(Fraction(1), Fraction(0)),
        target=(Fraction(0), Fraction(0)),
        region=region,
        params=dict(params or {}),
        scalar_model=model,
        multiplier_extra=multiplier_extra,
    )


def autocat_region(D: Fraction) -> SemialgebraicSet:
    """0 ≤ u ≤ v ≤ 1 si D<1; 0 ≤ v ≤ u ≤ 1 si D>1; siempre w ≥ 0"""
    u, v, w = Polynomial.variables(3)
    if D < 1:
        return SemialgebraicSet(3, (u, v - u, 1 - v, w))
    return SemialgebraicSet(3, (v, u - v, 1 - u, w))


def autocatalysis(D, m: int = 2) -> TravellingWaveSystem:
    """
    u̇ = D(v + w − u),  v̇ = w,  ẇ = −w + (D/c²)·u(1 − v)ᵐ
    de (0,0,0) a (1,1,0).
    """
    D = _racional("D", D)
    m = _entero("m", m, 1)
    if D <= 0:
        raise InvalidParameterError("D", D, "debe ser positivo")
    if D == 1:
        raise UnitDiffusionError()
    u, v, w = Polynomial.variables(3)
    cero = Polynomial.zero(3)
    return TravellingWaveSystem(
        name="autocat",
        family="autocat",
        variables=("u", "v", "w"),
        F0=((v + w - u).scale(D), w, -w),
        F1=(cero, cero, (u * (1 - v) ** m).scale(D)),
        parameter_kind=SpeedParameter.INVERSE_SQUARE,
        source=(Fraction(0),) * 3,
        target=(Fraction(1), Fraction(1), Fraction(0)),
        region=autocat_region(D),
        params={"D": D, "m": m},
        multiplier_extra=0,
        diffusion=D,
    )


def build_system(key: str, params: Dict[str, Any]) -> TravellingWaveSystem:
    """Sistema a partir de la clave de modelo y sus parámetros"""
    if key not in MODEL_KEYS:
        raise InvalidParameterError("model", key, f"claves válidas: {', '.join(MODEL_KEYS)}")
    if key == "fisher":
        m = _entero("m", params.get("m"), 1)
        return scalar_system(fisher_kpp(m), name="fisher", family="fisher",
                             params={"m": m}, multiplier_extra=m)
    if key == "chemo":
        k = _entero("k", params.get("k"), 1)
        q = _entero("q", params.get("q"), 1)
        b = _racional("b", params.get("b", 0))
        return scalar_system(chemotaxis(k, q, b), name="chemo", family="chemo",
                             params={"k": k, "q": q, "b": b}, multiplier_extra=q)
    if params.get("D") is None:
        raise InvalidParameterError("D", None, "obligatorio para autocat")
    return autocatalysis(params["D"], params.get("m", 2))


# ══════════════════════════════════════════════════════════════
# PROFUNDIDAD DE LA VARIEDAD INESTABLE
# ══════════════════════════════════════════════════════════════

def manifold_depth(model: ScalarRdModel, c) -> Fraction:
    """
    Cota racional h ≥ |v| sobre la variedad inestable de (1,0) mientras
    permanece en U₁.

    Allí u decrece y sirve de parámetro: d(v²)/du = 2(c + a)|v| − 2Df.
    Integrando desde u = 1, v² ≤ Φ + 2A·max|v| con Φ = 2∫₀¹ Df y
    A ≥ max(0, −(c + a)) en [0,1], luego max|v| ≤ A + √(A² + Φ).
    """
    c = racional(c)
    a0 = model.a.coefficient((0,))
    variacion = sum((abs(racional(k)) for mono, k in model.a.items() if mono.degree > 0),
                    Fraction(0))
    A = max(Fraction(0), -c - a0 + variacion)
    phi = 2 * (model.D * model.f).antiderivative(0).evaluate((Fraction(1),))
    cota = float(A) + math.sqrt(float(A) ** 2 + float(phi))
    return Fraction(math.ceil(cota * 10 ** 4) + 1, 10 ** 4)


# ══════════════════════════════════════════════════════════════
# COTAS ANALÍTICAS
# ══════════════════════════════════════════════════════════════

def fisher_analytic_upper(m) -> float:
    """2·√(2[(m−1)(m+2)]^{m−1} / [m(m+1)]^m), válida para m > 1"""
    if not m > 1:
        raise InvalidParameterError("m", m, "la cota cerrada requiere m > 1")
    m = float(m)
    return 2.0 * math.sqrt(2.0 * ((m - 1) * (m + 2)) ** (m - 1) / (m * (m + 1)) ** m)


def chemo_analytic_upper(k, q, b=0) -> float:
    if not (k > 0 and q > 0 and b >= 0):
        raise InvalidParameterError("(k,q,b)", (k, q, b), "se requiere k, q > 0 y b ≥ 0")
    k, q, b = float(k), float(q), float(b)
    r = k / q
    radicando = 2 * q * k ** r * (k + q + 2) ** r / ((k + 2) ** (1 + r) * (k + q) ** (1 + r))
    return 2 * b / 3 + 2 * math.sqrt(radicando)


def autocat_analytic_bounds(D) -> Tuple[float, float]:
    """(inferior, superior) para m = 2"""
    if not D > 0:
        raise InvalidParameterError("D", D, "debe ser positivo")
    if D == 1:
        raise UnitDiffusionError()
    D = float(D)
    if D < 1:
        return D / math.sqrt(2), min(4 * D / math.sqrt(1 + 4 * D), math.sqrt(D))
    return math.sqrt(D / 2), math.sqrt(D / (1 + 1 / D))


def analytic_bounds(system: TravellingWaveSystem) -> Tuple[Optional[float], Optional[float]]:
    """
    Cotas cerradas conocidas (inferior, superior); None si no hay.
    Fisher con m = 1 usa el valor exacto c* = 2.
    """
    p = system.params
    if system.family == "fisher":
        if p["m"] == 1:
            return 2.0, 2.0
        return None, fisher_analytic_upper(p["m"])
    if system.family == "chemo":
        return None, chemo_analytic_upper(p["k"], p["q"], p["b"])
    if system.family == "autocat" and p.get("m", 2) == 2:
        return autocat_analytic_bounds(system.diffusion)
    return None, None

"""
════════════════════════════════════════════════════════════════
COTAS DE VELOCIDAD MÍNIMA — PROGRAMAS DE COTAS
════════════════════════════════════════════════════════════════

Programas SOS de factibilidad a velocidad c fija:

  MÉTODO             │ FACTIBLE IMPLICA
  ───────────────────┼──────────────────────────────
  surface-upper      │ c ≥ c*  (superficie v = N(u))
  volume-upper       │ c ≥ c*  (V con región atrapante)
  volume-lower       │ c ≤ c*  (barrera V)
  autocat-upper      │ c ≥ c*  (sistema 3D)
  autocat-lower      │ c ≤ c*  (sistema 3D)

La desigualdad atrapante es −λ·F·∇V − p·V ≥ 0 con un peso polinómico
p. Con p ≥ 0 en la fuente y V < 0 allí, {V ≤ 0} es invariante para
cualquier p (cotas superiores; en volume-upper p = 1). Para las
barreras, W = V·exp(∫p/λ) no crece a lo largo de las trayectorias:
si p/λ > −μ₊ en la fuente, W → 0 en ξ → −∞ y la variedad inestable
queda en V ≤ 0. El peso vale −1 en el destino (V > 0 allí) y |μ₋|·λ
en la fuente, lo que deja factible el orden uno en ambos equilibrios.

Las restricciones se imponen en dominios compactos que contienen la
variedad inestable mientras permanece en la región admisible: la caja
[0,1]×[−h,0] en el plano de fases escalar y w ≤ D/c² en autocatálisis.
Los equilibrios donde la expresión se anula se declaran como ceros para
reducir las bases de Gram.

Las restricciones sobre caras se compilan como problemas SOS de menor
dimensión tras sustituir exactamente la coordenada fija. Para
autocat-upper se asume que la variedad inestable sólo puede tener w = 0
dentro de U₂ en los extremos ξ = ±∞; no se verifica aquí.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from constants import ConstraintKind, Method, EPSILON_DEFECTO, LAMBDA_DEFECTO
from models import TravellingWaveSystem, manifold_depth
from polyalgebra import AffinePolynomial, Polynomial, racional
from sos import SemialgebraicSet, SosCertificate, SosProgram, multiplier_degree
from utils import Logger, Validadores


logger = Logger("bounds")


# ══════════════════════════════════════════════════════════════
# EXCEPCIONES
# ══════════════════════════════════════════════════════════════

class BoundsError(Exception):
    """Error base de la construcción de programas"""
    pass


class MethodConfigError(BoundsError):
    """Parámetro de método inválido"""
    def __init__(self, mensaje: str):
        super().__init__(mensaje)


class IncompatibleSystemError(BoundsError):
    """El método no se aplica a este sistema"""
    def __init__(self, metodo: Method, sistema: str):
        self.metodo = metodo
        self.sistema = sistema
        super().__init__(f"El método {metodo.value} no se aplica al sistema '{sistema}'")


# ══════════════════════════════════════════════════════════════
# CONFIGURACIÓN DEL MÉTODO
# ══════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class MethodConfig:
    """Grado de V o N, λ, ε, profundidad h opcional y grados de multiplicadores"""
    degree: int
    lam: Optional[float] = None
    epsilon: float = EPSILON_DEFECTO
    h: Optional[float] = None
    multiplier_degrees: Optional[Tuple[int, ...]] = None
    multiplier_extra: Optional[int] = None

    def __post_init__(self):
        ok, mensaje = Validadores.validar_entero("degree", self.degree, 1)
        if not ok:
            raise MethodConfigError(mensaje)
        ok, mensaje = Validadores.validar_positivo("epsilon", self.epsilon)
        if not ok:
            raise MethodConfigError(mensaje)
        for nombre in ("lam", "h"):
            valor = getattr(self, nombre)
            if valor is not None:
                ok, mensaje = Validadores.validar_positivo(nombre, valor)
                if not ok:
                    raise MethodConfigError(mensaje)

    @classmethod
    def for_method(cls, method: Method, degree: int, lam: Optional[float] = None,
                   **kwargs) -> "MethodConfig":
        """Configuración con el λ por defecto del método"""
        if lam is None and method.uses_lambda:
            lam = LAMBDA_DEFECTO[method]
        return cls(degree=degree, lam=lam, **kwargs)

    def require_lambda(self) -> Fraction:
        if self.lam is None:
            raise MethodConfigError("λ es obligatorio para los métodos de volumen")
        return racional(self.lam)

    def to_dict(self) -> Dict:
        return {
            "degree": self.degree,
            "lambda": self.lam,
            "epsilon": self.epsilon,
            "h": self.h,
            "multiplier_degrees": self.multiplier_degrees,
        }


# ══════════════════════════════════════════════════════════════
# PIEZAS COMUNES
# ══════════════════════════════════════════════════════════════

def _grados_atrapante(system: TravellingWaveSystem, cfg: MethodConfig,
                      conjunto: SemialgebraicSet):
    """Grado de σᵢ tal que todos los productos sᵢσᵢ tengan el mismo grado"""
    if cfg.multiplier_degrees is not None:
        return list(cfg.multiplier_degrees)
    extra = system.multiplier_extra if cfg.multiplier_extra is None else cfg.multiplier_extra
    base = multiplier_degree(cfg.degree, extra)
    grados = [max(base + 2 - s.degree, 0) for s in conjunto.inequalities]
    return [d - d % 2 for d in grados]


def trapping_expression(V: AffinePolynomial, campo, lam: Fraction,
                        peso: Optional[Polynomial] = None) -> AffinePolynomial:
    """−λ·F·∇V − p·V, con p = 1 si no se da peso"""
    derivada = AffinePolynomial.lift(Polynomial.zero(V.nvars))
    for i, Fi in enumerate(campo):
        derivada = derivada + V.derivative(i) * Fi
    if peso is None:
        return derivada.scale(-lam) - V
    return derivada.scale(-lam) - V * peso


def interpolated_weight(avance: Polynomial, en_fuente, en_destino) -> Polynomial:
    """Peso afín en el avance s: s = 0 en la fuente, s = 1 en el destino"""
    return (1 - avance).scale(racional(en_fuente)) + avance.scale(racional(en_destino))


def stable_rate(system: TravellingWaveSystem, c) -> Fraction:
    """|μ₋|: módulo del autovalor más negativo en la fuente, como racional"""
    autovalores = np.linalg.eigvals(system.jacobian(c, system.source)).real
    return Fraction(float(-autovalores.min())).limit_denominator(10 ** 4)


def _avance(system: TravellingWaveSystem) -> Polynomial:
    if system.family == "autocat":
        u, v, _ = Polynomial.variables(3)
        return (u + v).scale(Fraction(1, 2))
    return 1 - Polynomial.variable(0, 2)


def barrier_weight(system: TravellingWaveSystem, c, lam: Fraction) -> Polynomial:
    """
    Peso de las barreras: λ·|μ₋| en la fuente y −1 en el destino.

    En la fuente la expresión atrapante se anula; con p/λ = |μ₋| el
    orden uno admite un V que crece con pendiente menor que μ₊.
    """
    return interpolated_weight(_avance(system), lam * stable_rate(system, c), -1)


def _intervalo_unidad() -> SemialgebraicSet:
    u = Polynomial.variable(0, 1)
    return SemialgebraicSet(1, (u * (1 - u),))


def phase_box(h) -> SemialgebraicSet:
    """[0,1]×[−h,0] con el producto de sus dos generadores"""
    h = racional(h)
    u, v = Polynomial.variables(2)
    s1, s2 = u * (1 - u), -(v * (v + h))
    return SemialgebraicSet(2, (s1, s2, s1 * s2))


def _techo_w(system: TravellingWaveSystem, c: Fraction) -> Fraction:
    # ẇ ≤ −w + D/c² mientras u, v ∈ [0,1]
    return system.diffusion / (c * c)


def compact_autocat_region(system: TravellingWaveSystem, c) -> SemialgebraicSet:
    """U₂ con w ∈ [0, D/c²]"""
    c = racional(c)
    _, _, w = Polynomial.variables(3)
    techo = _techo_w(system, c)
    resto = tuple(s for s in system.region.inequalities if s != w)
    return SemialgebraicSet(3, resto + (w * (techo - w),))


def check_compatible(method: Method, system: TravellingWaveSystem) -> None:
    """Métodos escalares sólo para sistemas 2D; los de autocatálisis sólo para el 3D"""
    if method in (Method.AUTOCAT_UPPER, Method.AUTOCAT_LOWER):
        compatible = system.family == "autocat" and system.dim == 3
    else:
        compatible = system.scalar_model is not None and system.dim == 2
    if not compatible:
        raise IncompatibleSystemError(method, system.name)


def _validar(method: Method, system: TravellingWaveSystem, c) -> Fraction:
    check_compatible(method, system)
    c = racional(c)
    if c <= 0:
        raise MethodConfigError(f"la velocidad debe ser positiva (recibido {c})")
    return c


def _agregar_atrapante(prog: SosProgram, system: TravellingWaveSystem, c: Fraction,
                       cfg: MethodConfig, conjunto: SemialgebraicSet,
                       peso: Optional[Polynomial] = None,
                       zeros: Sequence[Sequence] = ()) -> AffinePolynomial:
    V = prog.new_polynomial("V", system.dim, cfg.degree)
    expr = trapping_expression(V, system.field_at(c), cfg.require_lambda(), peso)
    restriccion = prog.add_nonneg_on_set(
        expr, conjunto, multiplier_degrees=_grados_atrapante(system, cfg, conjunto),
        name="trapping", zeros=zeros,
    )
    restriccion.degrees["weight"] = "1" if peso is None else str(peso)
    logger.debug(f"{prog.nombre}: peso atrapante {restriccion.degrees['weight']}")
    return V


# ══════════════════════════════════════════════════════════════
# MÉTODO DE SUPERFICIE
# ══════════════════════════════════════════════════════════════

def surface_integral(system: TravellingWaveSystem, N, c) -> AffinePolynomial:
    """I(u) = ∫₀ᵘ [D(s)f(s) + (c + a(s))·N(s)] ds"""
    modelo = system.scalar_model
    c = racional(c)
    integrando = AffinePolynomial.lift(N) * (modelo.a + c) + modelo.D * modelo.f
    return integrando.antiderivative(0)


def surface_upper(system: TravellingWaveSystem, c, cfg: MethodConfig) -> SosProgram:
    """
    Trayectorias atrapadas sobre la superficie v = N(u):
      −y₁²·I(u) + 2y₁y₂·N(u) + 2y₂² ≥ 0 en [0,1]×ℝ²
      −N(u) ≥ 0 en [0,1],   N(0) = 0

    El coeficiente de y₁² se anula en u = 0 para todo N, también en el
    multiplicador de u(1−u), que lo hace a segundo orden.
    """
    c = _validar(Method.SURFACE_UPPER, system, c)
    prog = SosProgram(f"surface-upper c={float(c):.6g}")
    N = prog.new_polynomial("N", 1, cfg.degree)
    integral = surface_integral(system, N, c)

    _, y1, y2 = Polynomial.variables(3)
    forma = (integral.extend_arity(3) * (-(y1 * y1))
             + N.extend_arity(3) * (y1 * y2).scale(2)
             + (y2 * y2).scale(2))
    prog.add_nonneg_on_set(forma, _intervalo_unidad().extend_arity(3),
                           quadratic_vars=(1, 2), name="surface",
                           zeros=[(0, 1, 0)], multiplier_zeros=[(0, 1, 0)])
    prog.add_nonneg_on_set(-N, _intervalo_unidad(), name="N_nonpositive", zeros=[(0,)])
    prog.add_scalar_constraint(N.evaluate((0,)), ConstraintKind.EQ0, name="N_origin")
    return prog


# ══════════════════════════════════════════════════════════════
# MÉTODOS DE VOLUMEN ESCALARES
# ══════════════════════════════════════════════════════════════

def scalar_depth(system: TravellingWaveSystem, c, cfg: MethodConfig) -> Fraction:
    """h de la caja: el de la configuración o la cota de la variedad inestable"""
    if cfg.h is not None:
        return racional(cfg.h)
    return manifold_depth(system.scalar_model, c)


def volume_upper_scalar(system: TravellingWaveSystem, c, cfg: MethodConfig) -> SosProgram:
    c = _validar(Method.VOLUME_UPPER, system, c)
    prog = SosProgram(f"volume-upper c={float(c):.6g}")
    h = scalar_depth(system, c, cfg)
    prog.metadata["domain"] = {"h": float(h)}
    V = _agregar_atrapante(prog, system, c, cfg, phase_box(h), zeros=[system.target])
    eps = racional(cfg.epsilon)
    u1 = Polynomial.variable(0, 1)

    # V(u,0) ≤ −εu(1−u) en [0,1]
    prog.add_nonneg_on_set(-V.substitute(1, 0) - (u1 * (1 - u1)).scale(eps),
                           _intervalo_unidad(), name="top_edge", zeros=[(0,)])
    if cfg.h is not None:
        v1 = Polynomial.variable(0, 1)
        intervalo_v = SemialgebraicSet(1, (-(v1 * (v1 + h)),))
        # V(0,v) + εv ≥ 0 en [−h,0];  V(u,−h) ≥ 0 en [0,1]
        prog.add_nonneg_on_set(V.substitute(0, 0) + v1.scale(eps), intervalo_v,
                               name="left_edge", zeros=[(0,)])
        prog.add_nonneg_on_set(V.substitute(1, -h), _intervalo_unidad(), name="bottom_edge")
    prog.add_scalar_constraint(V.evaluate((0, 0)), ConstraintKind.EQ0, name="V_origin")
    return prog


def volume_lower_scalar(system: TravellingWaveSystem, c, cfg: MethodConfig) -> SosProgram:
    """
    Barrera entre (1,0) y (0,0): −λ·F·∇V − p·V ≥ 0 en la caja,
    V(u,0) ≥ ε(1−u), V(1,0) = 0 y V(0,−ε) = 0.

    La caja no puede ser menos profunda que la variedad inestable, así
    que un h de la configuración sólo la agranda.
    """
    c = _validar(Method.VOLUME_LOWER, system, c)
    prog = SosProgram(f"volume-lower c={float(c):.6g}")
    lam = cfg.require_lambda()
    h = manifold_depth(system.scalar_model, c)
    if cfg.h is not None:
        h = max(h, racional(cfg.h))
    prog.metadata["domain"] = {"h": float(h)}
    V = _agregar_atrapante(prog, system, c, cfg, phase_box(h),
                           peso=barrier_weight(system, c, lam), zeros=[system.source])
    eps = racional(cfg.epsilon)
    u1 = Polynomial.variable(0, 1)

    # V(u,0) ≥ ε(1−u) en [0,1]
    prog.add_nonneg_on_set(V.substitute(1, 0) - (1 - u1).scale(eps),
                           _intervalo_unidad(), name="top_edge", zeros=[(1,)])
    prog.add_scalar_constraint(V.evaluate((0, -eps)), ConstraintKind.EQ0, name="V_below_origin")
    prog.add_scalar_constraint(V.evaluate((1, 0)), ConstraintKind.EQ0, name="V_source")
    return prog


# ══════════════════════════════════════════════════════════════
# AUTOCATÁLISIS
# ══════════════════════════════════════════════════════════════

def _cara_salida(system: TravellingWaveSystem, c: Fraction) -> Tuple[int, SemialgebraicSet]:
    """Cara v = 1 (D<1) o u = 1 (D>1) de U₂, con la coordenada eliminada"""
    a, w = Polynomial.variables(2)
    techo = _techo_w(system, c)
    return system.exit_index, SemialgebraicSet(2, (a, 1 - a, w * (techo - w)))


def _cara_w0(system: TravellingWaveSystem) -> SemialgebraicSet:
    u, v = Polynomial.variables(2)
    if system.diffusion < 1:
        return SemialgebraicSet(2, (u, v - u, 1 - v))
    return SemialgebraicSet(2, (v, u - v, 1 - u))


def autocat_upper(system: TravellingWaveSystem, c, cfg: MethodConfig) -> SosProgram:
    """
    Región atrapante {V ≤ 0} con la fuente dentro y el destino en su borde.

    En el destino la derivada de −λ·F·∇V − p·V en la dirección w es
    (λ − p)·∂V/∂w, positiva sólo si p < λ; el peso baja de 1 en la
    fuente a min(1, λ/2) en el destino.
    """
    c = _validar(Method.AUTOCAT_UPPER, system, c)
    prog = SosProgram(f"autocat-upper c={float(c):.6g}")
    lam = cfg.require_lambda()
    peso = None
    if lam < 2:
        peso = interpolated_weight(_avance(system), 1, lam / 2)
    V = _agregar_atrapante(prog, system, c, cfg, compact_autocat_region(system, c),
                           peso=peso, zeros=[system.target])
    eps = racional(cfg.epsilon)

    prog.add_scalar_constraint(-V.evaluate((0, 0, 0)) - eps, ConstraintKind.GE0, name="V_source")
    prog.add_scalar_constraint(V.evaluate((1, 1, 0)), ConstraintKind.EQ0, name="V_target")

    indice, cara = _cara_salida(system, c)
    w2 = Polynomial.variable(1, 2)
    prog.add_nonneg_on_set(V.substitute(indice, 1) - w2.scale(eps), cara,
                           name="exit_face", zeros=[(1, 0)])
    return prog


def autocat_lower(system: TravellingWaveSystem, c, cfg: MethodConfig) -> SosProgram:
    """
    Barrera con V(0,0,0) = 0 y V > 0 en el destino.

    Con D > 1 la cara w = 0 exige V ≥ ε(u + v). Con D < 1 esa condición
    obliga ∂V/∂v ≥ ε en el origen, incompatible a primer orden con la
    desigualdad atrapante; se exige V ≥ ε(u + v)², que deja V(1,1,0) ≥ 4ε.
    """
    c = _validar(Method.AUTOCAT_LOWER, system, c)
    prog = SosProgram(f"autocat-lower c={float(c):.6g}")
    lam = cfg.require_lambda()
    V = _agregar_atrapante(prog, system, c, cfg, compact_autocat_region(system, c),
                           peso=barrier_weight(system, c, lam), zeros=[system.source])
    eps = racional(cfg.epsilon)

    u2, v2 = Polynomial.variables(2)
    cota = (u2 + v2) if system.diffusion > 1 else (u2 + v2) ** 2
    prog.add_nonneg_on_set(V.substitute(2, 0) - cota.scale(eps), _cara_w0(system),
                           name="w0_face", zeros=[(0, 0)])
    prog.add_scalar_constraint(V.evaluate((0, 0, 0)), ConstraintKind.EQ0, name="V_source")
    return prog


# ══════════════════════════════════════════════════════════════
# DESPACHO
# ══════════════════════════════════════════════════════════════

CONSTRUCTORES: Dict[Method, Callable[[TravellingWaveSystem, object, MethodConfig], SosProgram]] = {
    Method.SURFACE_UPPER: surface_upper,
    Method.VOLUME_UPPER: volume_upper_scalar,
    Method.VOLUME_LOWER: volume_lower_scalar,
    Method.AUTOCAT_UPPER: autocat_upper,
    Method.AUTOCAT_LOWER: autocat_lower,
}


def build_program(method: Method, system: TravellingWaveSystem, c, cfg: MethodConfig) -> SosProgram:
    return CONSTRUCTORES[method](system, c, cfg)


def auxiliary_function(prog: SosProgram, cert: SosCertificate, nombre: str) -> Polynomial:
    """Polinomio V o N recuperado del certificado"""
    return prog.templates[nombre].assign(cert.scalar_assignment)


# ══════════════════════════════════════════════════════════════
# RE-VERIFICACIÓN DE UNA SUPERFICIE FIJA
# ══════════════════════════════════════════════════════════════

@dataclass
class SurfaceReverification:
    passed: bool
    min_minus_I: float
    min_schur: float
    max_N: float


def reverify_surface(system: TravellingWaveSystem, N: Polynomial, c,
                     n_points: int = 2001, tol: float = 1e-9) -> SurfaceReverification:
    """
    Comprobar en una malla de [0,1] que un N fijo sigue atrapando a
    velocidad c sin resolver de nuevo: −I ≥ 0, −2I − N² ≥ 0, N ≤ 0.
    """
    integral = surface_integral(system, N, c).base
    schur = integral.scale(-2) - N * N
    malla = np.linspace(0.0, 1.0, n_points).reshape(-1, 1)
    menos_i = (-integral).evaluate_many(malla)
    valores_schur = schur.evaluate_many(malla)
    valores_n = N.evaluate_many(malla)
    return SurfaceReverification(
        passed=bool(menos_i.min() >= -tol and valores_schur.min() >= -tol and valores_n.max() <= tol),
        min_minus_I=float(menos_i.min()),
        min_schur=float(valores_schur.min()),
        max_N=float(valores_n.max()),
    )

"""Rama de característica p: Z(X, t) a partir de polinomios de Weil.

El orden en t = q^{-n} se detecta por división exacta por (1 - q^n t); el
valor principal es un racional exacto.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Optional

import sympy
from mpmath import mp

from .errors import (
    DomainError,
    InvariantViolationError,
    OrderMismatchError,
    OverflowGuardError,
    SingularCurveError,
)
from .models import CurveSpec, HodgeNumbersFp, WeilPolySet
from .numeric import LeadingTaylor
from .settings import get_settings


logger = logging.getLogger(__name__)

t = sympy.Symbol("t")

# C(X, n) es idénticamente 1 en característica p
CORRECTION_FACTOR = Fraction(1)

POINT_COUNT_MAX_Q = 10 ** 4
EXTENSION_COUNT_MAX_Q = 500


def _poly(coeffs) -> sympy.Poly:
    return sympy.Poly(list(reversed(coeffs)), t, domain=sympy.QQ)


def _as_fraction(value) -> Fraction:
    value = sympy.Rational(value)
    return Fraction(int(value.p), int(value.q))


@dataclass(frozen=True)
class ZetaFunction:
    """Z(X, t) = numerator / denominator en términos mínimos."""
    q: int
    dim: int
    numerator: tuple[int, ...]
    denominator: tuple[int, ...]
    euler_characteristic: int

    def expression(self) -> sympy.Expr:
        return _poly(self.numerator).as_expr() / _poly(self.denominator).as_expr()

    def __str__(self) -> str:
        return str(sympy.factor(self.expression()))


def poincare_duality_defects(W: WeilPolySet) -> list[int]:
    """Grados i con P_{2d-i}(t) distinto de t^b P_i(1/(q^d t)) normalizado."""
    defects = []
    qd = Fraction(W.q) ** W.dim
    for i in range(W.top_degree + 1):
        coeffs = W.poly(i)
        b = len(coeffs) - 1
        dual = [Fraction(c) / qd ** k for k, c in enumerate(coeffs)][::-1]
        dual = tuple(c / dual[0] for c in dual)
        if dual != tuple(Fraction(c) for c in W.poly(W.top_degree - i)):
            defects.append(i)
        if b != len(W.poly(W.top_degree - i)) - 1:
            defects.append(i)
    return sorted(set(defects))


@dataclass(frozen=True)
class RiemannHypothesisReport:
    worst_defect: dict[int, str]
    passed: bool


def riemann_hypothesis_check(
    W: WeilPolySet,
    tolerance: Optional[float] = None
) -> RiemannHypothesisReport:
    """||alpha| - q^{i/2}| para las raíces recíprocas de cada P_i.

    Las raíces se aíslan sobre la parte libre de cuadrados de P_i.
    """
    tolerance = tolerance or get_settings().tolerance
    worst: dict[int, str] = {}
    passed = True
    with mp.workprec(max(get_settings().default_precision, 128)):
        for i in range(W.top_degree + 1):
            P = _poly(W.poly(i))
            if P.degree() < 1:
                continue
            target = mp.mpf(W.q) ** (mp.mpf(i) / 2)
            defect = mp.mpf(0)
            for factor, _ in P.sqf_list()[1]:
                coeffs = [mp.mpf(c.p) / c.q for c in factor.all_coeffs()]
                if len(coeffs) < 2:
                    continue
                roots, err = mp.polyroots(
                    coeffs, maxsteps=200, extraprec=64, error=True
                )
                for root in roots:
                    alpha = 1 / abs(root)
                    defect = max(defect, abs(alpha - target) / target + err)
            worst[i] = mp.nstr(defect, 5)
            if defect > tolerance:
                passed = False
                logger.warning(
                    "%s: P_%d viola la hipótesis de Riemann (defecto %s)",
                    W.label, i, worst[i]
                )
    return RiemannHypothesisReport(worst, passed)


def zeta_from_weil_polys(W: WeilPolySet, verify: bool = True) -> ZetaFunction:
    """Z(X, t) = prod_i P_i(t)^{(-1)^{i+1}} en términos mínimos."""
    if verify:
        defects = poincare_duality_defects(W)
        if defects:
            message = f"{W.label}: dualidad de Poincaré falla en grados {defects}"
            raise InvariantViolationError(message)
        if not riemann_hypothesis_check(W).passed:
            message = f"{W.label}: raíces recíprocas fuera de |alpha| = q^(i/2)"
            raise InvariantViolationError(message)

    numerator = sympy.Poly(1, t, domain=sympy.QQ)
    denominator = sympy.Poly(1, t, domain=sympy.QQ)
    chi = 0
    for i in range(W.top_degree + 1):
        P = _poly(W.poly(i))
        chi += (-1) ** i * P.degree()
        if i % 2:
            numerator *= P
        else:
            denominator *= P
    common = numerator.gcd(denominator)
    numerator = numerator.exquo(common)
    denominator = denominator.exquo(common)
    scale = denominator.eval(0)
    numerator = sympy.Poly(numerator.as_expr() / scale, t, domain=sympy.QQ)
    denominator = sympy.Poly(denominator.as_expr() / scale, t, domain=sympy.QQ)

    def _ints(P: sympy.Poly) -> tuple[int, ...]:
        return tuple(int(c) for c in reversed(P.all_coeffs()))

    return ZetaFunction(W.q, W.dim, _ints(numerator), _ints(denominator), chi)


def zeta_functional_equation(W: WeilPolySet) -> tuple[int, sympy.Expr]:
    """Signo de Z(1/(q^d t)) = +- q^{d chi/2} t^chi Z(t), por álgebra exacta."""
    Z = zeta_from_weil_polys(W, verify=False)
    expr = Z.expression()
    chi = Z.euler_characteristic
    swapped = expr.subs(t, 1 / (sympy.Integer(W.q) ** W.dim * t))
    quotient = sympy.cancel(swapped / (t ** chi * expr))
    scale = sympy.sqrt(sympy.Integer(W.q)) ** (W.dim * chi)
    sign = sympy.simplify(quotient / scale)
    if sign not in (1, -1):
        message = (
            f"{W.label}: Z(1/(q^d t)) / (t^chi Z(t)) = {quotient} no es "
            f"+-q^(d chi / 2)"
        )
        raise InvariantViolationError(message)
    return int(sign), quotient


# Orden y valor principal en t = q^{-n}

def _split_off(coeffs: tuple[int, ...], q_n: Fraction) -> tuple[int, sympy.Poly]:
    """(m, Q) con P = (1 - q^n t)^m Q, por división exacta."""
    P = _poly(coeffs)
    linear = sympy.Poly([-sympy.Rational(q_n.numerator, q_n.denominator), 1], t,
                        domain=sympy.QQ)
    m = 0
    while P.degree() > 0:
        quotient, remainder = P.div(linear)
        if not remainder.is_zero:
            break
        P = quotient
        m += 1
    return m, P


def root_multiplicities(W: WeilPolySet, n: int) -> dict[int, int]:
    """m_i(n): multiplicidad de q^n entre las raíces recíprocas de P_i."""
    q_n = Fraction(W.q) ** n
    return {i: _split_off(W.poly(i), q_n)[0] for i in range(W.top_degree + 1)}


def order_leading_at(W: WeilPolySet, n: int) -> LeadingTaylor:
    """ord_{t=q^{-n}} Z y Z* = lim (1 - q^n t)^{-ord} Z(X, t)."""
    q_n = Fraction(W.q) ** n
    x = sympy.Rational(1) / sympy.Rational(q_n.numerator, q_n.denominator)
    order = 0
    value = Fraction(1)
    for i in range(W.top_degree + 1):
        m, Q = _split_off(W.poly(i), q_n)
        sign = (-1) ** (i + 1)
        order += sign * m
        value *= _as_fraction(Q.eval(x)) ** sign
    logger.debug("%s en t=q^-%d: orden %d, Z* = %s", W.label, n, order, value)
    return LeadingTaylor(n, order, value)


@dataclass(frozen=True)
class DetStarReport:
    n: int
    value: Fraction
    semisimple: dict[int, bool]
    limit_value: Fraction
    correction_factor: Fraction = CORRECTION_FACTOR

    @property
    def semisimple_at_zero(self) -> bool:
        return all(self.semisimple.values())

    @property
    def agrees(self) -> Optional[bool]:
        if not self.semisimple_at_zero:
            return None
        return self.value == self.limit_value


def _detstar_degree(coeffs: tuple[int, ...], q_n: Fraction) -> Fraction:
    # Det*(1 - phi q^{-n}) = q^{-n(b-m)} R(q^n), con car(x) = (x - q^n)^m R(x)
    b = len(coeffs) - 1
    if b == 0:
        return Fraction(1)
    x = sympy.Symbol("x")
    char = sympy.Poly(list(coeffs), x, domain=sympy.QQ)
    point = sympy.Rational(q_n.numerator, q_n.denominator)
    m = 0
    derivative = char
    while derivative.eval(point) == 0:
        derivative = derivative.diff(x)
        m += 1
    rest = _as_fraction(derivative.eval(point)) / factorial(m)
    return rest / q_n ** (b - m)


def detstar_trivialization(W: WeilPolySet, n: int) -> DetStarReport:
    """prod_i Det*(1 - phi q^{-n} | H^i)^{(-1)^{i+1}} y semisimplicidad en cero.

    Det* sólo multiplica los factores no nulos. Un bloque de Jordan de
    tamaño mayor que 1 para el autovalor q^n marca el grado como no
    semisimple y la igualdad con Z* no se afirma.
    """
    q_n = Fraction(W.q) ** n
    value = Fraction(1)
    semisimple = {}
    for i in range(W.top_degree + 1):
        value *= _detstar_degree(W.poly(i), q_n) ** ((-1) ** (i + 1))
        blocks = W.blocks(i, W.q ** n) if n >= 0 else ()
        semisimple[i] = all(size == 1 for size in blocks)
    limit = order_leading_at(W, n).coefficient
    report = DetStarReport(n, value, semisimple, limit)
    if report.agrees is False:
        message = (
            f"{W.label} n={n}: Det* = {value} distinto de Z* = {limit}"
        )
        raise InvariantViolationError(message)
    return report


def milne_chi(H: HodgeNumbersFp, n: int) -> int:
    """chi = sum_{i <= n, j} (-1)^{i+j} (n - i) h^j(Omega^i)."""
    return sum(
        (-1) ** (i + j) * (n - i) * h
        for (i, j), h in H.hij.items()
        if i <= n
    )


@dataclass(frozen=True)
class RankOrderReport:
    n: int
    multiplicities: dict[int, int]
    ranks: dict[int, int]
    euler_side: int
    t_order: int
    s_order: int
    correction_factor: Fraction = CORRECTION_FACTOR


def _order_in_s(coeffs: tuple[int, ...], q: int, n: int) -> int:
    # orden de P(q^{-s}) en s=n: primera derivada no nula en t=q^{-n}
    P = _poly(coeffs)
    point = sympy.Integer(q) ** (-n)
    k = 0
    while P.eval(point) == 0:
        P = P.diff(t)
        k += 1
    return k


def weil_etale_rank_order(W: WeilPolySet, n: int) -> RankOrderReport:
    """rank H^i_W(X, Z(n)) = m_i(n) + m_{i-1}(n) y la identidad de orden."""
    m = root_multiplicities(W, n)
    ranks = {}
    for i in range(W.top_degree + 2):
        r = m.get(i, 0) + m.get(i - 1, 0)
        if r:
            ranks[i] = r
    euler = sum((-1) ** i * i * r for i, r in ranks.items())
    t_order = order_leading_at(W, n).order
    s_order = sum(
        (-1) ** (i + 1) * _order_in_s(W.poly(i), W.q, n)
        for i in range(W.top_degree + 1)
    )
    if s_order != t_order:
        message = f"{W.label} n={n}: ord_s = {s_order} pero ord_t = {t_order}"
        raise OrderMismatchError(message, s_order, t_order)
    if euler != t_order:
        message = (
            f"{W.label} n={n}: sum (-1)^i i rank = {euler} pero "
            f"ord Z = {t_order}"
        )
        raise OrderMismatchError(message, t_order, euler)
    return RankOrderReport(n, m, ranks, euler, t_order, s_order)


# Conteo de puntos

@dataclass(frozen=True)
class PointCount:
    q: int
    genus: int
    counts: tuple[int, ...]
    p1: Optional[tuple[int, ...]] = None
    trace: Optional[int] = None
    notes: list[str] = field(default_factory=list)


def _check_curve(curve: CurveSpec, p: int) -> list[int]:
    if p == 2:
        message = "y^2 = f(x) no es un modelo válido en característica 2"
        raise SingularCurveError(message)
    f = [c % p for c in curve.coefficients]
    if f[-1] == 0:
        message = f"El coeficiente principal de f se anula módulo {p}"
        raise SingularCurveError(message)
    x = sympy.Symbol("x")
    disc = sympy.discriminant(
        sympy.Poly(list(reversed(curve.coefficients)), x), x
    )
    if disc % p == 0:
        message = f"f tiene raíces múltiples módulo {p}: la curva es singular"
        raise SingularCurveError(message)
    return f


def _evaluate(f: list[int], x: int, p: int) -> int:
    value = 0
    for c in reversed(f):
        value = (value * x + c) % p
    return value


def _count_prime_field(f: list[int], p: int) -> int:
    squares = {(y * y) % p for y in range(1, p)}
    affine = 0
    for x in range(p):
        v = _evaluate(f, x, p)
        affine += 1 if v == 0 else (2 if v in squares else 0)
    return affine + _points_at_infinity(f, p)


def _points_at_infinity(f: list[int], p: int) -> int:
    degree = len(f) - 1
    if degree % 2:
        return 1
    return 2 if pow(f[-1], (p - 1) // 2, p) == 1 else 0


class _QuadraticExtension:
    """F_{p^2} = F_p[s] / (s^2 - r) con r no residuo."""

    def __init__(self, p: int):
        self.p = p
        self.r = next(a for a in range(2, p) if pow(a, (p - 1) // 2, p) == p - 1)

    def mul(self, a, b):
        p, r = self.p, self.r
        return ((a[0] * b[0] + r * a[1] * b[1]) % p,
                (a[0] * b[1] + a[1] * b[0]) % p)

    def power(self, a, e: int):
        result = (1, 0)
        while e:
            if e & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            e >>= 1
        return result

    def evaluate(self, f: list[int], x):
        value = (0, 0)
        for c in reversed(f):
            value = self.mul(value, x)
            value = ((value[0] + c) % self.p, value[1])
        return value

    def count(self, f: list[int]) -> int:
        p = self.p
        half = (p * p - 1) // 2
        affine = 0
        for a in range(p):
            for b in range(p):
                v = self.evaluate(f, (a, b))
                if v == (0, 0):
                    affine += 1
                elif self.power(v, half) == (1, 0):
                    affine += 2
        # el coeficiente principal es un cuadrado en F_{p^2}
        return affine + (1 if (len(f) - 1) % 2 else 2)


def point_count_curve(curve: CurveSpec, q: int) -> PointCount:
    """#X(F_q) por enumeración y P_1 cuando el género es 1 o 2."""
    if not sympy.isprime(q):
        message = f"q={q} debe ser primo"
        raise DomainError(message)
    if q > POINT_COUNT_MAX_Q:
        message = f"q={q} supera la cota de enumeración {POINT_COUNT_MAX_Q}"
        raise OverflowGuardError(message)
    f = _check_curve(curve, q)
    genus = curve.genus
    n1 = _count_prime_field(f, q)
    s1 = q + 1 - n1
    logger.info("#X(F_%d) = %d para y^2 = %s", q, n1, curve.coefficients)
    if genus == 1:
        return PointCount(q, genus, (n1,), (1, -s1, q), s1)
    if q > EXTENSION_COUNT_MAX_Q:
        note = f"P_1 sin determinar: q={q} > {EXTENSION_COUNT_MAX_Q}"
        logger.warning(note)
        return PointCount(q, genus, (n1,), None, s1, [note])
    n2 = _QuadraticExtension(q).count(f)
    s2 = q * q + 1 - n2
    c1 = -s1
    c2 = (s1 * s1 - s2) // 2
    p1 = (1, c1, c2, q * c1, q * q)
    return PointCount(q, genus, (n1, n2), p1, s1)

"""Aritmética de bolas con precisión arbitraria y funciones especiales.

Las bolas guardan punto medio y radio como ``mpf``; cada operación pasa por el
contexto de intervalos ``mpmath.iv`` (redondeo hacia afuera) y vuelve a
forma punto medio/radio, de modo que el radio siempre encierra el error.
"""
import logging
import math
from contextlib import contextmanager
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Union

import sympy
from mpmath import iv, mp
from mpmath.libmp import to_rational

from .errors import DomainError, PoleError, SchemaError, UnverifiedOrderError
from .settings import get_settings


logger = logging.getLogger(__name__)

ExactRational = Fraction
Rational = Union[int, Fraction]


@contextmanager
def working_precision(prec: int) -> Iterator[None]:
    # mp e iv guardan su precisión por separado
    saved = (mp.prec, iv.prec)
    mp.prec = prec
    iv.prec = prec
    try:
        yield
    finally:
        mp.prec, iv.prec = saved


def _exact_interval(x: Rational):
    x = Fraction(x)
    if x.denominator == 1:
        return iv.mpf(x.numerator)
    return iv.mpf(x.numerator) / x.denominator


@dataclass(frozen=True)
class BallReal:
    mid: object
    rad: object
    prec: int

    def __post_init__(self):
        if self.rad < 0:
            message = "El radio de una bola no puede ser negativo"
            raise ValueError(message)

    # Construcción

    @classmethod
    def exact(cls, value: Rational, prec: int) -> "BallReal":
        with working_precision(prec):
            return cls.from_interval(_exact_interval(value), prec)

    @classmethod
    def from_interval(cls, x, prec: int) -> "BallReal":
        # extremos sin redondear
        lo, hi = (mp.make_mpf(v) for v in x._mpi_)
        mid = mp.fdiv(mp.fadd(lo, hi, prec=prec), 2, prec=prec)
        rad = max(
            mp.fsub(hi, mid, prec=prec, rounding="u"),
            mp.fsub(mid, lo, prec=prec, rounding="u"),
        )
        return cls(mid, rad, prec)

    @classmethod
    def from_decimal_string(cls, text: str, prec: int) -> "BallReal":
        """Lee un decimal; el radio es media unidad del último dígito dado.

        Los enteros y las fracciones "p/q" se leen como exactos.
        """
        s = text.strip()
        if "/" in s or s.lstrip("+-").isdigit():
            try:
                return cls.exact(Fraction(s), prec)
            except (ValueError, ZeroDivisionError) as exc:
                message = f"Número racional inválido: '{text}'"
                raise SchemaError(message) from exc
        try:
            exponent = Decimal(s).as_tuple().exponent
        except InvalidOperation as exc:
            message = f"Número decimal inválido: '{text}'"
            raise SchemaError(message) from exc
        with working_precision(prec):
            half_ulp = (iv.mpf(10) ** exponent) / 2
            x = iv.mpf(s) + iv.mpf([-half_ulp.b, half_ulp.b])
            return cls.from_interval(x, prec)

    # Conversión

    def interval(self):
        lo = mp.fsub(self.mid, self.rad, prec=self.prec, rounding="d")
        hi = mp.fadd(self.mid, self.rad, prec=self.prec, rounding="u")
        with working_precision(self.prec):
            return iv.mpf([lo, hi])

    @property
    def lower(self):
        return mp.fsub(self.mid, self.rad, prec=self.prec, rounding="d")

    @property
    def upper(self):
        return mp.fadd(self.mid, self.rad, prec=self.prec, rounding="u")

    def with_precision(self, prec: int) -> "BallReal":
        return BallReal.from_interval(self.interval(), prec)

    # Aritmética

    def _coerce(self, other) -> "BallReal":
        if isinstance(other, BallReal):
            return other
        if isinstance(other, (int, Fraction)):
            return BallReal.exact(other, self.prec)
        return NotImplemented

    def _combine(self, other, op) -> "BallReal":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        prec = min(self.prec, other.prec)
        with working_precision(prec):
            return BallReal.from_interval(
                op(self.interval(), other.interval()),
                prec
            )

    def __add__(self, other):
        return self._combine(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return self._combine(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._combine(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other_ball = self._coerce(other)
        if other_ball is NotImplemented:
            return NotImplemented
        if other_ball.contains_zero():
            message = "División por una bola que contiene 0"
            raise DomainError(message)
        return self._combine(other_ball, lambda a, b: a / b)

    def __rtruediv__(self, other):
        other_ball = self._coerce(other)
        if other_ball is NotImplemented:
            return NotImplemented
        return other_ball / self

    def __neg__(self):
        return BallReal(-self.mid, self.rad, self.prec)

    def __abs__(self):
        if self.contains_zero():
            with working_precision(self.prec):
                hi = max(abs(self.lower), abs(self.upper))
                return BallReal.from_interval(iv.mpf([0, hi]), self.prec)
        return -self if self.mid < 0 else self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return 1 / (self ** (-k))
        with working_precision(self.prec):
            return BallReal.from_interval(self.interval() ** k, self.prec)

    def apply(self, fn) -> "BallReal":
        """Aplica una función del contexto ``iv`` (p. ej. ``iv.sqrt``)."""
        with working_precision(self.prec):
            return BallReal.from_interval(fn(self.interval()), self.prec)

    # Predicados

    def contains_zero(self) -> bool:
        return self.lower <= 0 <= self.upper

    def contains(self, x) -> bool:
        if isinstance(x, BallReal):
            return self.lower <= x.lower and x.upper <= self.upper
        if isinstance(x, (int, Fraction)):
            x = Fraction(x)
            p, q = x.numerator, x.denominator
            lo = mp.fmul(self.lower, q, exact=True)
            hi = mp.fmul(self.upper, q, exact=True)
            return lo <= p <= hi
        return self.lower <= x <= self.upper

    def overlaps(self, other: "BallReal") -> bool:
        return not (self.upper < other.lower or other.upper < self.lower)

    def relative_width(self):
        if self.mid == 0:
            return mp.inf
        return mp.fdiv(self.rad, abs(self.mid), prec=53, rounding="u")

    def is_positive(self) -> bool:
        return self.lower > 0

    def __str__(self) -> str:
        digits = max(5, int(self.prec * 0.30103) - 2)
        return (
            f"{mp.nstr(self.mid, digits)} +/- {mp.nstr(self.rad, 3)}"
        )


@dataclass(frozen=True)
class BallComplex:
    re: BallReal
    im: BallReal

    @property
    def prec(self) -> int:
        return min(self.re.prec, self.im.prec)

    @classmethod
    def from_real(cls, x: BallReal) -> "BallComplex":
        return cls(x, BallReal.exact(0, x.prec))

    @classmethod
    def root_of_unity(cls, k: int, order: int, prec: int) -> "BallComplex":
        k %= order
        if k == 0:
            return cls.from_real(BallReal.exact(1, prec))
        with working_precision(prec):
            angle = 2 * iv.pi * k / order
            return cls(
                BallReal.from_interval(iv.cos(angle), prec),
                BallReal.from_interval(iv.sin(angle), prec),
            )

    def _coerce(self, other):
        if isinstance(other, BallComplex):
            return other
        if isinstance(other, BallReal):
            return BallComplex.from_real(other)
        if isinstance(other, (int, Fraction)):
            return BallComplex.from_real(BallReal.exact(other, self.prec))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return BallComplex(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return BallComplex(self.re - other.re, self.im - other.im)

    def __neg__(self):
        return BallComplex(-self.re, -self.im)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return BallComplex(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def conjugate(self) -> "BallComplex":
        return BallComplex(self.re, -self.im)

    def abs_squared(self) -> BallReal:
        return self.re * self.re + self.im * self.im

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        denominator = other.abs_squared()
        numerator = self * other.conjugate()
        return BallComplex(numerator.re / denominator, numerator.im / denominator)

    def contains_zero(self) -> bool:
        return self.re.contains_zero() and self.im.contains_zero()

    def is_real(self) -> bool:
        return self.im.contains_zero()

    def __str__(self) -> str:
        return f"({self.re}) + ({self.im})i"


class GammaKind(str, Enum):
    GAMMA = "Gamma"
    GAMMA_R = "Gamma_R"
    GAMMA_C = "Gamma_C"


Coefficient = Union[BallReal, BallComplex, Fraction, sympy.Expr]


@dataclass(frozen=True)
class LeadingTaylor:
    """Orden y coeficiente principal de una función en ``s = point``.

    El coeficiente es una bola (real o compleja), un racional exacto o una
    expresión cerrada de sympy; nunca puede contener 0.
    """
    point: int
    order: int
    coefficient: Coefficient

    def __post_init__(self):
        c = self.coefficient
        if isinstance(c, (BallReal, BallComplex)):
            zero = c.contains_zero()
        elif isinstance(c, Fraction):
            zero = c == 0
        else:
            zero = bool(sympy.sympify(c).is_zero)
        if zero:
            message = (
                f"El coeficiente principal en s={self.point} contiene 0; "
                f"el orden {self.order} no está verificado"
            )
            raise UnverifiedOrderError(message)

    def is_exact(self) -> bool:
        return isinstance(self.coefficient, (Fraction, sympy.Expr))

    def ball(self, prec: int) -> BallReal:
        c = self.coefficient
        if isinstance(c, BallReal):
            return c
        if isinstance(c, BallComplex):
            if not c.is_real():
                message = "Coeficiente principal no real"
                raise DomainError(message)
            return c.re
        if isinstance(c, Fraction):
            return BallReal.exact(c, prec)
        return fold(c, prec)


# Números de Bernoulli

@lru_cache(maxsize=None)
def _bernoulli_number(m: int) -> Fraction:
    # Recurrencia sum_{j<=m} C(m+1, j) B_j = 0, convención B_1 = -1/2
    if m == 0:
        return Fraction(1)
    if m > 1 and m % 2:
        return Fraction(0)
    s = sum(
        (math.comb(m + 1, j) * _bernoulli_number(j) for j in range(m)),
        Fraction(0)
    )
    return -s / (m + 1)


def bernoulli(k: int) -> Fraction:
    if k < 0:
        message = "El índice de Bernoulli debe ser no negativo"
        raise DomainError(message)
    return _bernoulli_number(k)


def bernoulli_polynomial(k: int, x: Rational) -> Fraction:
    x = Fraction(x)
    return sum(
        (math.comb(k, j) * bernoulli(j) * x ** (k - j) for j in range(k + 1)),
        Fraction(0)
    )


def _rising(s: Fraction, m: int) -> Fraction:
    out = Fraction(1)
    for j in range(m):
        out *= s + j
    return out


def _power(base, s: Fraction):
    # base ** (-s) en intervalos
    if s.denominator == 1:
        return base ** (-s.numerator)
    return iv.exp(-(_exact_interval(s)) * iv.ln(base))


def _em_parameters(s: Fraction, wp: int) -> tuple[int, int]:
    m = int(0.25 * wp) + 4 + abs(int(s))
    if s <= 0 and s.denominator == 1:
        # (s)_{2M} se anula: la suma de Euler-Maclaurin es finita
        m = max(m, (1 - s.numerator) // 2 + 1)
    return m, m


def _em_tail_bound(s: Fraction, a: Fraction, n: int, m: int):
    """Cota del resto de Euler-Maclaurin con M términos de corrección.

    |R| <= 4 |(s)_{2M}| / (2 pi)^{2M} * (N+a)^{1-s-2M} / (s+2M-1),
    válida para s + 2M - 1 > 0.
    """
    rising = abs(_rising(s, 2 * m))
    if rising == 0:
        return iv.mpf(0)
    x = _exact_interval(n + a)
    bound = (
        4 * _exact_interval(rising) / (2 * iv.pi) ** (2 * m)
        * _power(x, s + 2 * m - 1)
        / _exact_interval(s + 2 * m - 1)
    )
    return iv.mpf([0, bound.b])


def hurwitz_zeta(s: Rational, a: Rational, prec: int) -> BallReal:
    """Bola que contiene zeta_H(s, a) = sum_{k>=0} (k+a)^{-s}.

    El radio final queda por debajo de 2^{-prec+g} * max(1, |valor|),
    con g los bits de guarda configurados.
    """
    s = Fraction(s)
    a = Fraction(a)
    if s == 1:
        message = "zeta de Hurwitz tiene un polo en s=1"
        raise PoleError(message)
    if not 0 < a <= 1:
        message = f"El parámetro a={a} debe estar en (0, 1]"
        raise DomainError(message)
    if prec < 32:
        message = "La precisión mínima es de 32 bits"
        raise DomainError(message)

    guard = get_settings().guard_bits
    wp = prec + guard + 16
    n, m = _em_parameters(s, wp)
    target = mp.ldexp(1, -prec + guard)
    # en enteros s <= 0 la fórmula es exacta: sólo falta precisión
    exact_sum = s <= 0 and s.denominator == 1

    while True:
        with working_precision(wp):
            total = iv.mpf(0)
            for k in range(n):
                total += _power(_exact_interval(k + a), s)
            x = _exact_interval(n + a)
            total += _power(x, s - 1) / _exact_interval(s - 1)
            total += _power(x, s) / 2
            for j in range(1, m + 1):
                rising = _rising(s, 2 * j - 1)
                if rising:
                    c = bernoulli(2 * j) * rising / math.factorial(2 * j)
                    total += _exact_interval(c) * _power(x, s + 2 * j - 1)
            remainder = _em_tail_bound(s, a, n, m)
            total += iv.mpf([-remainder.b, remainder.b])
            ball = BallReal.from_interval(total, wp)

        scale = max(mp.mpf(1), abs(ball.mid))
        if ball.rad <= target * scale:
            logger.debug(
                "hurwitz_zeta(s=%s, a=%s): N=%d M=%d radio=%s",
                s, a, n, m, mp.nstr(ball.rad, 3)
            )
            return BallReal.from_interval(ball.interval(), prec + guard)
        if not exact_sum:
            n *= 2
            m += m // 2
        wp += 32


def hurwitz_zeta_constant(a: Rational, prec: int) -> BallReal:
    """Término constante de zeta_H(s, a) en s=1, igual a -digamma(a)."""
    a = Fraction(a)
    if not 0 < a <= 1:
        message = f"El parámetro a={a} debe estar en (0, 1]"
        raise DomainError(message)
    guard = get_settings().guard_bits
    wp = prec + guard + 16
    n, m = _em_parameters(Fraction(1), wp)
    target = mp.ldexp(1, -prec + guard)

    while True:
        with working_precision(wp):
            total = iv.mpf(0)
            for k in range(n):
                total += 1 / _exact_interval(k + a)
            x = _exact_interval(n + a)
            total -= iv.ln(x)
            total += 1 / (2 * x)
            for j in range(1, m + 1):
                c = bernoulli(2 * j) / (2 * j)
                total += _exact_interval(c) / x ** (2 * j)
            remainder = _em_tail_bound(Fraction(1), a, n, m)
            total += iv.mpf([-remainder.b, remainder.b])
            ball = BallReal.from_interval(total, wp)
        if ball.rad <= target * max(mp.mpf(1), abs(ball.mid)):
            return BallReal.from_interval(ball.interval(), prec + guard)
        n *= 2
        m += m // 2
        wp += 32


# Datos de Gamma

def gamma_leading(kind: GammaKind, n: int, prec: int) -> LeadingTaylor:
    """Orden y coeficiente principal exactos de Gamma, Gamma_R o Gamma_C."""
    kind = GammaKind(kind)
    pi = sympy.pi
    if kind is GammaKind.GAMMA:
        if n >= 1:
            return LeadingTaylor(n, 0, sympy.Integer(math.factorial(n - 1)))
        k = -n
        return LeadingTaylor(n, -1, sympy.Rational((-1) ** k, math.factorial(k)))

    if kind is GammaKind.GAMMA_R:
        if n <= 0 and n % 2 == 0:
            # Gamma(s/2) ~ 2 (-1)^k / (k! (s + 2k))
            k = -n // 2
            coefficient = 2 * sympy.Rational((-1) ** k, math.factorial(k)) \
                * pi ** k
            return LeadingTaylor(n, -1, coefficient)
        half = sympy.Rational(n, 2)
        return LeadingTaylor(n, 0, pi ** (-half) * sympy.gamma(half))

    if n >= 1:
        coefficient = 2 * (2 * pi) ** (-n) * math.factorial(n - 1)
        return LeadingTaylor(n, 0, coefficient)
    k = -n
    coefficient = 2 * (2 * pi) ** k * sympy.Rational((-1) ** k, math.factorial(k))
    return LeadingTaylor(n, -1, coefficient)


# Plegado de expresiones exactas

def _fold_interval(expr):
    if expr.is_Integer or expr.is_Rational:
        return _exact_interval(Fraction(int(expr.p), int(expr.q)))
    if expr is sympy.pi:
        return iv.pi
    if expr is sympy.E:
        return iv.e
    if expr.is_Add:
        total = iv.mpf(0)
        for term in expr.args:
            total += _fold_interval(term)
        return total
    if expr.is_Mul:
        total = iv.mpf(1)
        for factor in expr.args:
            total *= _fold_interval(factor)
        return total
    if expr.is_Pow:
        base, exponent = expr.args
        b = _fold_interval(base)
        if exponent.is_Integer:
            return b ** int(exponent)
        if exponent.is_Rational and exponent.q == 2:
            return iv.sqrt(b) ** int(exponent.p)
        return iv.exp(_fold_interval(exponent) * iv.ln(b))
    if isinstance(expr, sympy.log):
        return iv.ln(_fold_interval(expr.args[0]))
    if isinstance(expr, sympy.exp):
        return iv.exp(_fold_interval(expr.args[0]))
    if isinstance(expr, sympy.cos):
        return iv.cos(_fold_interval(expr.args[0]))
    if isinstance(expr, sympy.sin):
        return iv.sin(_fold_interval(expr.args[0]))
    if isinstance(expr, sympy.zeta) and len(expr.args) == 1:
        s = expr.args[0]
        if s.is_Integer and int(s) != 1:
            return hurwitz_zeta(int(s), 1, iv.prec).interval()
    message = f"No se puede evaluar la expresión exacta '{expr}'"
    raise DomainError(message)


def fold(expr, prec: int) -> BallReal:
    """Convierte una expresión cerrada (racionales, pi, raíces, log) en bola."""
    expr = sympy.sympify(expr)
    with working_precision(prec + 8):
        return BallReal.from_interval(_fold_interval(expr), prec)


def parse_real(text: str, prec: int) -> BallReal:
    """Lee un número decimal, un racional "p/q" o una expresión cerrada."""
    s = text.strip()
    try:
        return BallReal.from_decimal_string(s, prec)
    except SchemaError:
        pass
    try:
        expr = sympy.sympify(s, locals={"log": sympy.log, "zeta": sympy.zeta})
    except (sympy.SympifyError, SyntaxError, TypeError) as exc:
        message = f"Valor real ilegible: '{text}'"
        raise SchemaError(message) from exc
    if expr.free_symbols:
        message = f"El valor '{text}' contiene símbolos libres"
        raise SchemaError(message)
    return fold(expr, prec)


def rational_reconstruction(ball: BallReal, max_denominator: int) -> Fraction | None:
    """Racional de denominador acotado contenido en la bola, si existe."""
    candidate = Fraction(*to_rational(ball.mid._mpf_)) \
        .limit_denominator(max_denominator)
    if ball.contains(candidate):
        logger.debug("Reconstrucción racional: %s", candidate)
        return candidate
    return None


def scale_by_exact(expr, value, prec: int):
    """Producto de una forma cerrada por un racional, expresión o bola.

    Si ambos factores son exactos el resultado sigue siendo exacto
    (``Fraction`` cuando es racional).
    """
    expr = sympy.sympify(expr)
    if isinstance(value, Fraction):
        value = sympy.Rational(value.numerator, value.denominator)
    if isinstance(value, sympy.Expr):
        product = sympy.simplify(expr * value)
        if product.is_Rational:
            return Fraction(int(product.p), int(product.q))
        return product
    return fold(expr, prec + 16) * value

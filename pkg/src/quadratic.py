"""Oráculo independiente para cuerpos cuadráticos.

Número de clases por enumeración de formas binarias reducidas (ciclos de
formas reducidas en el caso real) y regulador a partir del desarrollo en
fracción continua de (P0 + sqrt(D)) / 2.
"""
import logging
from fractions import Fraction
from math import gcd, isqrt
from typing import NamedTuple

import sympy
from mpmath import iv

from .errors import DomainError, OverflowGuardError
from .models import DirichletCharacter, KTheoryData, NumberFieldRecord
from .numeric import BallReal, working_precision
from .settings import get_settings


logger = logging.getLogger(__name__)


class QuadraticInvariants(NamedTuple):
    h: int
    R: BallReal
    w: int


class QuadraticUnit(NamedTuple):
    """Unidad fundamental u + v sqrt(D) con u, v racionales."""
    u: Fraction
    v: Fraction
    norm: int
    period: int


def is_fundamental_discriminant(D: int) -> bool:
    if D in (0, 1):
        return False
    if D % 4 == 1:
        return all(e == 1 for e in sympy.factorint(abs(D)).values())
    if D % 4 == 0:
        m = D // 4
        if m % 4 not in (2, 3):
            return False
        return all(e == 1 for e in sympy.factorint(abs(m)).values())
    return False


def _check_discriminant(D: int) -> None:
    bound = get_settings().max_quadratic_discriminant
    if abs(D) > bound:
        message = f"|D| = {abs(D)} supera la cota configurada {bound}"
        raise OverflowGuardError(message)
    if not is_fundamental_discriminant(D):
        message = f"{D} no es un discriminante fundamental"
        raise DomainError(message)


def reduced_forms(D: int) -> list[tuple[int, int, int]]:
    """Formas primitivas reducidas (a, b, c) de discriminante D < 0."""
    forms = []
    a = 1
    while 3 * a * a <= -D:
        for b in range(-a + 1, a + 1):
            if (b * b - D) % (4 * a):
                continue
            c = (b * b - D) // (4 * a)
            if c < a or (b < 0 and a == c):
                continue
            if gcd(gcd(a, b), c) == 1:
                forms.append((a, b, c))
        a += 1
    return forms


def _reduced_indefinite_forms(D: int) -> list[tuple[int, int, int]]:
    # 0 < b < sqrt(D), sqrt(D) - b < 2|a| < sqrt(D) + b
    s = isqrt(D)
    forms = []
    for b in range(1, s + 1):
        if (b - D) % 2:
            continue
        ac = (b * b - D) // 4
        for a in sympy.divisors(-ac):
            # 2|a| > sqrt(D) - b  <=>  (2|a| + b)^2 > D
            if (2 * a + b) ** 2 <= D or 2 * a > s + b:
                continue
            c = ac // a
            for sign in (1, -1):
                form = (sign * a, b, sign * c)
                if gcd(gcd(a, b), c) == 1:
                    forms.append(form)
    return forms


def _rho(form: tuple[int, int, int], D: int) -> tuple[int, int, int]:
    _, b, c = form
    s = isqrt(D)
    b_next = s - (s + b) % (2 * abs(c))
    return c, b_next, (b_next * b_next - D) // (4 * c)


def narrow_class_number(D: int) -> int:
    """Número de ciclos de formas reducidas de discriminante D > 0."""
    pending = set(_reduced_indefinite_forms(D))
    cycles = 0
    while pending:
        start = pending.pop()
        form = _rho(start, D)
        while form != start:
            pending.discard(form)
            form = _rho(form, D)
        cycles += 1
    return cycles


def fundamental_unit(D: int) -> QuadraticUnit:
    """Unidad fundamental del orden maximal de Q(sqrt(D)), D > 0.

    Producto de los cocientes completos (P_k + sqrt(D)) / Q_k sobre un
    periodo del desarrollo de (P0 + sqrt(D)) / 2, que es reducido.
    """
    s = isqrt(D)
    p0 = s if (s - D) % 2 == 0 else s - 1
    p, q = p0, 2
    u, v = Fraction(1), Fraction(0)
    period = 0
    while True:
        # (u + v r)(p + r) / q con r^2 = D
        u, v = (u * p + v * D) / q, (u + v * p) / q
        a = (p + s) // q
        p = a * q - p
        q = (D - p * p) // q
        period += 1
        if (p, q) == (p0, 2):
            break
    norm = u * u - v * v * D
    logger.debug("Unidad fundamental de D=%d: periodo %d", D, period)
    return QuadraticUnit(u, v, int(norm), period)


def regulator_expression(D: int) -> str:
    """log(u + v sqrt(D)) como texto exacto, legible por ``parse_real``."""
    unit = fundamental_unit(D)
    return f"log({unit.u} + ({unit.v})*sqrt({D}))"


def regulator(D: int, prec: int, unit: QuadraticUnit = None) -> BallReal:
    unit = unit or fundamental_unit(D)
    with working_precision(prec + 16):
        x = iv.mpf(unit.u.numerator) / unit.u.denominator \
            + iv.mpf(unit.v.numerator) / unit.v.denominator * iv.sqrt(D)
        return BallReal.from_interval(iv.ln(x), prec)


def quadratic_invariants(D: int, prec: int = None) -> QuadraticInvariants:
    """(h, R, w) del cuerpo cuadrático de discriminante fundamental D."""
    _check_discriminant(D)
    prec = prec or get_settings().default_precision
    if D < 0:
        w = {-4: 4, -3: 6}.get(D, 2)
        h = len(reduced_forms(D))
        return QuadraticInvariants(h, BallReal.exact(1, prec), w)

    unit = fundamental_unit(D)
    h_plus = narrow_class_number(D)
    h = h_plus if unit.norm == -1 else h_plus // 2
    logger.info(
        "Invariantes de D=%d: h+=%d N(eps)=%d h=%d", D, h_plus, unit.norm, h
    )
    return QuadraticInvariants(h, regulator(D, prec, unit), 2)


def kronecker(D: int, a: int) -> int:
    if a == 0:
        return 1 if abs(D) == 1 else 0
    e = 0
    while a % 2 == 0:
        a //= 2
        e += 1
    if e and D % 2 == 0:
        return 0
    value = sympy.jacobi_symbol(D % a, a) if a > 1 else 1
    if e % 2 and D % 8 in (3, 5):
        value = -value
    return value


def quadratic_character(D: int) -> DirichletCharacter:
    """Carácter de Kronecker (D/.) como carácter primitivo mod |D|."""
    modulus = abs(D)
    if modulus == 1:
        return DirichletCharacter(modulus=1, order=1, values=[(0, 0)])
    values = []
    for a in range(modulus):
        if gcd(a, modulus) != 1:
            continue
        values.append((a, 0 if kronecker(D, a) == 1 else 1))
    return DirichletCharacter(modulus=modulus, order=2, values=values)


def quadratic_field(
    D: int,
    prec: int = None,
    with_invariants: bool = False
) -> NumberFieldRecord:
    """Registro abeliano de Q(sqrt(D)) a partir de sus dos caracteres."""
    _check_discriminant(D)
    principal = DirichletCharacter(modulus=1, order=1, values=[(0, 0)])
    invariants = None
    if with_invariants:
        h, _, w = quadratic_invariants(D, prec)
        text = regulator_expression(D) if D > 0 else "1"
        invariants = KTheoryData({1: {"h": h, "w": w, "R": text}})
    return NumberFieldRecord(
        label=f"Q(sqrt({D // 4 if D % 4 == 0 else D}))",
        degree=2,
        r1=2 if D > 0 else 0,
        r2=0 if D > 0 else 1,
        disc=D,
        characters=[principal, quadratic_character(D)],
        invariants=invariants,
    )

"""Funciones L de Dirichlet y zeta de Dedekind en enteros.

Para n >= 1 se evalúa L(s, chi) = f^{-s} sum_a chi(a) zeta_H(s, a/f); para
n <= 0 se usan valores de Bernoulli generalizados (exactos) o la ecuación
funcional, nunca derivación numérica.
"""
import logging
import math
from fractions import Fraction
from typing import Optional, Union

import sympy
from mpmath import iv

from .errors import DomainError, OrderMismatchError
from .models import DirichletCharacter, NumberFieldRecord
from .numeric import (
    BallComplex,
    BallReal,
    GammaKind,
    LeadingTaylor,
    bernoulli_polynomial,
    fold,
    gamma_leading,
    hurwitz_zeta,
    hurwitz_zeta_constant,
    rational_reconstruction,
    scale_by_exact,
    working_precision,
)
from .settings import get_settings


logger = logging.getLogger(__name__)

Value = Union[Fraction, BallReal, BallComplex]


def _character_sum(chi: DirichletCharacter, weight, prec: int) -> Value:
    # sum_{a=1}^{f} chi(a) weight(a/f)
    f = chi.modulus
    total = None
    for a in range(1, f + 1):
        if chi.exponent(a) is None:
            continue
        w = weight(Fraction(a, f))
        if chi.is_real:
            term = chi.real_value(a) * w
        else:
            term = chi.value(a, prec) * w
        total = term if total is None else total + term
    return total


def gauss_sum(chi: DirichletCharacter, prec: int) -> BallComplex:
    f = chi.modulus
    total = BallComplex.from_real(BallReal.exact(0, prec))
    for a in range(1, f + 1):
        k = chi.exponent(a)
        if k is None:
            continue
        # chi(a) e(a/f) = exp(2 pi i (k/N + a/f))
        angle = Fraction(k, chi.order) + Fraction(a, f)
        total = total + BallComplex.root_of_unity(
            angle.numerator, angle.denominator, prec
        )
    return total


def root_number(chi: DirichletCharacter, prec: int) -> BallComplex:
    """W(chi) = tau(chi) / (i^kappa sqrt(f)); vale 1 para caracteres reales."""
    if chi.is_real:
        return BallComplex.from_real(BallReal.exact(1, prec))
    tau = gauss_sum(chi, prec)
    if chi.kappa:
        tau = BallComplex(tau.im, -tau.re)
    with working_precision(prec):
        sqrt_f = BallReal.from_interval(iv.sqrt(chi.modulus), prec)
    return tau / sqrt_f


def has_trivial_zero(chi: DirichletCharacter, n: int) -> bool:
    """Ceros forzados por el polo de Gamma_R(s + kappa) en n <= 0."""
    if n > 0 or (n + chi.kappa) % 2:
        return False
    # en n = 0 el polo de zeta(1) compensa el de Gamma_R
    return not chi.is_principal or n < 0


def _value_at(chi: DirichletCharacter, n: int, prec: int) -> Value:
    f = chi.modulus
    total = _character_sum(chi, lambda x: hurwitz_zeta(n, x, prec), prec)
    return total * Fraction(1, f ** n)


def _value_at_one(chi: DirichletCharacter, prec: int) -> Value:
    # sum chi(a) = 0 elimina el polo; queda el término constante
    total = _character_sum(chi, lambda x: hurwitz_zeta_constant(x, prec), prec)
    return total * Fraction(1, chi.modulus)


def _bernoulli_value(chi: DirichletCharacter, n: int, prec: int) -> Value:
    # L(1-k, chi) = -f^{k-1}/k sum chi(a) B_k(a/f)
    k = 1 - n
    f = chi.modulus
    total = _character_sum(chi, lambda x: bernoulli_polynomial(k, x), prec)
    return total * Fraction(-f ** (k - 1), k)


def _trivial_zero_derivative(chi: DirichletCharacter, n: int, prec: int) -> Value:
    kappa = chi.kappa
    pole = gamma_leading(GammaKind.GAMMA_R, n + kappa, prec)
    regular = gamma_leading(GammaKind.GAMMA_R, 1 - n + kappa, prec)
    dual_chi = chi if chi.is_real else chi.conjugate()
    dual = dirichlet_L_leading(dual_chi, 1 - n, prec)
    exact = sympy.Integer(chi.modulus) ** sympy.Rational(1 - 2 * n, 2) \
        * regular.coefficient / pole.coefficient
    value = dual.coefficient
    if isinstance(value, Fraction):
        value = BallReal.exact(value, prec + 16)
    value = fold(exact, prec + 16) * value
    if not chi.is_real:
        value = root_number(chi, prec + 16) * value
    return value


def dirichlet_L_leading(
    chi: DirichletCharacter,
    n: int,
    prec: Optional[int] = None
) -> LeadingTaylor:
    """Orden y coeficiente principal de L(s, chi) en s=n."""
    prec = prec or get_settings().default_precision
    if not chi.is_primitive:
        message = f"El carácter mod {chi.modulus} no es primitivo"
        raise DomainError(message)

    if n >= 2:
        return LeadingTaylor(n, 0, _value_at(chi, n, prec))
    if n == 1:
        if chi.modulus == 1:
            return LeadingTaylor(1, -1, Fraction(1))
        return LeadingTaylor(1, 0, _value_at_one(chi, prec))
    if has_trivial_zero(chi, n):
        return LeadingTaylor(n, 1, _trivial_zero_derivative(chi, n, prec))
    return LeadingTaylor(n, 0, _bernoulli_value(chi, n, prec))


# Zeta de Dedekind

def gamma_star(F: NumberFieldRecord, m: int, prec: int) -> tuple[int, sympy.Expr]:
    """Datos principales exactos de Gamma_R(s)^{r1} Gamma_C(s)^{r2} en s=m."""
    real = gamma_leading(GammaKind.GAMMA_R, m, prec)
    complex_ = gamma_leading(GammaKind.GAMMA_C, m, prec)
    order = F.r1 * real.order + F.r2 * complex_.order
    coefficient = sympy.sympify(real.coefficient) ** F.r1 \
        * sympy.sympify(complex_.coefficient) ** F.r2
    return order, coefficient


def _multiply(a: Value, b: Value) -> Value:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a * b
    if isinstance(a, Fraction):
        a, b = b, a
    return a * b


def _real_part(value: Value) -> Union[Fraction, BallReal]:
    if isinstance(value, BallComplex):
        if not value.is_real():
            message = "El producto de funciones L no es real"
            raise DomainError(message)
        return value.re
    return value


def functional_equation_transfer(
    F: NumberFieldRecord,
    m: int,
    source: LeadingTaylor,
    prec: int
) -> LeadingTaylor:
    """Datos en s=m a partir de los de s=1-m mediante xi_F(s) = xi_F(1-s).

    xi_F(s) = |D_F|^{s/2} Gamma_R(s)^{r1} Gamma_C(s)^{r2} zeta_F(s).
    """
    if source.point != 1 - m:
        message = f"Se esperaban datos en s={1 - m}, no en s={source.point}"
        raise DomainError(message)
    g_source, c_source = gamma_star(F, 1 - m, prec)
    g_target, c_target = gamma_star(F, m, prec)
    total = source.order + g_source
    exact = sympy.Integer(-1) ** total \
        * sympy.Integer(F.abs_disc) ** sympy.Rational(1 - 2 * m, 2) \
        * c_source / c_target
    coefficient = scale_by_exact(exact, source.coefficient, prec)
    order = total - g_target
    if isinstance(coefficient, BallReal) and order == 0 and m <= 0:
        bound = get_settings().rational_denominator_bound
        exact_value = rational_reconstruction(coefficient, bound)
        if exact_value is not None:
            coefficient = exact_value
    return LeadingTaylor(m, order, coefficient)


def _product_of_l_functions(F: NumberFieldRecord, n: int, prec: int) -> LeadingTaylor:
    order = 0
    coefficient: Value = Fraction(1)
    for chi in F.characters:
        leading = dirichlet_L_leading(chi, n, prec)
        order += leading.order
        coefficient = _multiply(coefficient, leading.coefficient)
    return LeadingTaylor(n, order, _real_part(coefficient))


def dedekind_zeta_leading(
    F: NumberFieldRecord,
    n: int,
    prec: Optional[int] = None
) -> LeadingTaylor:
    """Orden y coeficiente principal de zeta_F en s=n.

    El orden se contrasta con la forma cerrada ``F.rho(n)``; una diferencia
    indica un error del núcleo numérico.
    """
    prec = prec or get_settings().default_precision
    if F.characters is not None:
        if n >= 1:
            leading = _product_of_l_functions(F, n, prec)
        else:
            source = dedekind_zeta_leading(F, 1 - n, prec)
            leading = functional_equation_transfer(F, n, source, prec)
    elif F.zeta_values:
        if n in F.zeta_values:
            leading = F.zeta_values[n].leading(n, prec)
        elif 1 - n in F.zeta_values:
            source = F.zeta_values[1 - n].leading(1 - n, prec)
            leading = functional_equation_transfer(F, n, source, prec)
        else:
            message = f"{F.label}: sin datos de zeta en s={n} ni en s={1 - n}"
            raise DomainError(message)
    else:
        message = f"{F.label}: no hay caracteres ni tabla de valores de zeta"
        raise DomainError(message)

    expected = F.rho(n)
    if leading.order != expected:
        message = (
            f"{F.label}: orden analítico {leading.order} en s={n} distinto "
            f"de la forma cerrada {expected}"
        )
        raise OrderMismatchError(message, leading.order, expected)
    logger.debug("zeta_%s en s=%d: orden %d", F.label, n, leading.order)
    return leading


def euler_product_zeta(
    F: NumberFieldRecord,
    n: int,
    prec: Optional[int] = None,
    prime_bound: Optional[int] = None
) -> BallReal:
    """Producto de Euler de zeta_F(n), n >= 2, truncado en primos < cota.

    La cola sobre p >= B se encierra en exp([-e, e]) con
    e = d (B-1)^{1-n} / ((n-1)(1 - B^{-n})).
    """
    settings = get_settings()
    prec = prec or settings.default_precision
    bound = prime_bound or settings.euler_product_prime_bound
    if n < 2:
        message = "El producto de Euler sólo converge para n >= 2"
        raise DomainError(message)
    if F.characters is None:
        message = f"{F.label}: el producto de Euler requiere caracteres"
        raise DomainError(message)

    wp = prec + 32
    one = BallReal.exact(1, wp)
    all_real = all(chi.is_real for chi in F.characters)
    total = one if all_real else BallComplex.from_real(one)
    for p in sympy.primerange(2, bound):
        x = Fraction(1, p ** n)
        for chi in F.characters:
            if chi.exponent(p) is None:
                continue
            if chi.is_real:
                total = total * (1 - chi.real_value(p) * x)
            else:
                total = total * (1 - chi.value(p, wp) * x)
    value = 1 / _real_part(total)

    d = F.degree
    with working_precision(wp):
        eps = d * iv.mpf(bound - 1) ** (1 - n) \
            / ((n - 1) * (1 - iv.mpf(bound) ** (-n)))
        tail = iv.exp(iv.mpf([-eps.b, eps.b]))
        return BallReal.from_interval(value.interval() * tail, prec)


# Torsión w_n

def _kernel_exponent(F: NumberFieldRecord, ell: int, e: int) -> int:
    # exponente de {u in (Z/ell^e)^x : chi(u) = 1 si cond(chi) | ell^e}
    m = ell ** e
    characters = [chi for chi in F.characters if m % chi.modulus == 0]
    exponent = 1
    for u in range(1, m):
        if u % ell == 0:
            continue
        if all(chi.exponent(u) == 0 for chi in characters):
            exponent = math.lcm(exponent, sympy.n_order(u, m))
    return exponent


def torsion_w_n(F: NumberFieldRecord, n: int) -> int:
    """Mayor m tal que el exponente de Gal(F(mu_m)/F) divide a n."""
    if n < 1:
        message = "w_n sólo está definido para n >= 1"
        raise DomainError(message)
    if F.characters is None:
        message = f"{F.label}: w_n requiere los caracteres del cuerpo"
        raise DomainError(message)

    candidates = {2} | set(sympy.primefactors(F.abs_disc))
    candidates |= {d + 1 for d in sympy.divisors(n) if sympy.isprime(d + 1)}
    w = 1
    for ell in sorted(candidates):
        e = 0
        while e < 64 and n % _kernel_exponent(F, ell, e + 1) == 0:
            e += 1
        w *= ell ** e
    logger.debug("w_%d(%s) = %d", n, F.label, w)
    return w

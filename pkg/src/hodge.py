"""Contabilidad de Hodge de la fibra arquimediana.

Factores Gamma L_inf(h^i, s), sus órdenes en enteros, dimensiones de la
cohomología de Deligne real y la zeta completada de un anillo de enteros.
"""
import logging
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

import sympy

from .dirichlet import dedekind_zeta_leading
from .errors import InvariantViolationError, OrderMismatchError
from .models import HodgeStructure, NumberFieldRecord
from .numeric import (
    BallReal,
    GammaKind,
    LeadingTaylor,
    fold,
    gamma_leading,
    scale_by_exact,
)
from .settings import get_settings


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GammaTerm:
    kind: GammaKind
    shift: int
    exponent: int


@dataclass(frozen=True)
class GammaFactor:
    """Producto de Gamma_R(s + shift)^e y Gamma_C(s + shift)^e."""
    terms: tuple[GammaTerm, ...]

    @property
    def degree(self) -> int:
        return sum(
            t.exponent * (1 if t.kind is GammaKind.GAMMA_R else 2)
            for t in self.terms
        )

    def leading_at(self, n: int, prec: int) -> tuple[int, sympy.Expr]:
        """Orden y coeficiente principal exacto en s=n, factor a factor."""
        order = 0
        coefficient = sympy.Integer(1)
        for t in self.terms:
            leading = gamma_leading(t.kind, n + t.shift, prec)
            order += t.exponent * leading.order
            coefficient *= sympy.sympify(leading.coefficient) ** t.exponent
        return order, coefficient


def gamma_factor(H: HodgeStructure) -> GammaFactor:
    """L_inf(h^i, s) = prod_{p<q} Gamma_C(s-p)^{h^{p,q}}
    Gamma_R(s-i/2)^{h^{i/2,+}} Gamma_R(s-i/2+1)^{h^{i/2,-}}."""
    counts: Counter = Counter()
    for (p, q), h in H.hpq.items():
        if p < q and h:
            counts[(GammaKind.GAMMA_C, -p)] += h
    if H.weight % 2 == 0:
        half = H.weight // 2
        plus, minus = H.split()
        if plus:
            counts[(GammaKind.GAMMA_R, -half)] += plus
        if minus:
            counts[(GammaKind.GAMMA_R, -half + 1)] += minus
    terms = tuple(
        GammaTerm(kind, shift, exponent)
        for (kind, shift), exponent in sorted(
            counts.items(), key=lambda item: (item[0][0].value, item[0][1])
        )
    )
    factor = GammaFactor(terms)
    if factor.degree != H.dimension:
        message = (
            f"Grado del factor Gamma {factor.degree} distinto de "
            f"dim H^{H.weight} = {H.dimension}"
        )
        raise InvariantViolationError(message)
    return factor


def _middle_plus_minus(H: HodgeStructure, n: int) -> int:
    # h^{i/2, (-1)^{n-i/2}}
    if H.weight % 2:
        return 0
    plus, minus = H.split()
    return plus if (n - H.weight // 2) % 2 == 0 else minus


def linfty_order(H: HodgeStructure, n: int) -> int:
    """Orden de L_inf(h^i, s) en s=n, por fórmula y factor a factor."""
    formula = sum(
        h for (p, q), h in H.hpq.items() if n <= p < q
    )
    if 2 * n <= H.weight:
        formula += _middle_plus_minus(H, n)
    formula = -formula

    by_factors, _ = gamma_factor(H).leading_at(n, 64)
    if formula != by_factors:
        message = (
            f"Orden de L_inf en s={n}: fórmula {formula}, "
            f"factores Gamma {by_factors}"
        )
        raise OrderMismatchError(message, by_factors, formula)
    return formula


def _deligne_invariants(H: HodgeStructure, n: int) -> tuple[int, int]:
    # dim (H^i(C)/F^n)^{G_R}, dim H^i(R(n))^{G_R}
    quotient = sum(h for (p, q), h in H.hpq.items() if p < n)
    invariants = sum(h for (p, q), h in H.hpq.items() if p < q)
    invariants += _middle_plus_minus(H, n)
    return quotient, invariants


def deligne_dims(H: HodgeStructure, n: int) -> dict[int, int]:
    """Dimensiones reales de H^m_D(X/R, R(n)) aportadas por el peso i.

    Para i <= 2n-2 el peso i alimenta H^{i+1}_D; para i >= 2n alimenta
    H^i_D; para i = 2n-1 la comparación es biyectiva y no aporta nada.
    """
    i = H.weight
    quotient, invariants = _deligne_invariants(H, n)
    if i <= 2 * n - 2:
        degree, dim = i + 1, quotient - invariants
    elif i >= 2 * n:
        degree, dim = i, invariants - quotient
    else:
        return {}
    if dim < 0:
        message = (
            f"Dimensión negativa {dim} para H^{degree}_D(R({n})): "
            "datos de Hodge inconsistentes"
        )
        raise InvariantViolationError(message)
    return {degree: dim} if dim else {}


def deligne_dims_total(structures: Iterable[HodgeStructure], n: int) -> dict[int, int]:
    total: Counter = Counter()
    for H in structures:
        total.update(deligne_dims(H, n))
    return {m: dim for m, dim in sorted(total.items()) if dim}


def deligne_duality_defects(
    structures: list[HodgeStructure],
    d: int,
    n: int
) -> list[tuple[int, int, int]]:
    """Grados m con dim H^m_D(n) != dim H^{2d-1-m}_D(d-n)."""
    lhs = deligne_dims_total(structures, n)
    rhs = deligne_dims_total(structures, d - n)
    defects = []
    for m in range(0, 2 * d):
        a, b = lhs.get(m, 0), rhs.get(2 * d - 1 - m, 0)
        if a != b:
            defects.append((m, a, b))
    return defects


def number_ring_hodge(F: NumberFieldRecord) -> list[HodgeStructure]:
    """Paquete arquimediano de Spec O_F: r1 lugares reales y r2 complejos.

    Cada lugar real aporta h^{0,0}=1 con desdoblamiento (1, 0); cada lugar
    complejo h^{0,0}=2 con (1, 1), de modo que Gamma_R(s) Gamma_R(s+1)
    reproduce Gamma_C(s).
    """
    return [
        HodgeStructure(
            weight=0,
            hpq={(0, 0): F.degree},
            middle_split=(F.r1 + F.r2, F.r2),
        )
    ]


def completed_zeta_leading(
    F: NumberFieldRecord,
    n: int,
    prec: Optional[int] = None
) -> LeadingTaylor:
    """Datos principales de zeta(X, s) = zeta_F(s) prod_i L_inf(h^i, s)^{(-1)^i}."""
    prec = prec or get_settings().default_precision
    analytic = dedekind_zeta_leading(F, n, prec)
    order = analytic.order
    exact = sympy.Integer(1)
    expected = F.rho(n)
    for H in number_ring_hodge(F):
        sign = (-1) ** H.weight
        gamma_order, coefficient = gamma_factor(H).leading_at(n, prec)
        order += sign * gamma_order
        exact *= coefficient ** sign
        expected += sign * linfty_order(H, n)
    if order != expected:
        message = (
            f"{F.label}: orden de la zeta completada {order} en s={n}, "
            f"esperado {expected}"
        )
        raise OrderMismatchError(message, order, expected)
    coefficient = scale_by_exact(exact, analytic.coefficient, prec)
    return LeadingTaylor(n, order, coefficient)


@dataclass(frozen=True)
class CompletedFunctionalEquation:
    n: int
    order: int
    dual_order: int
    ratio: BallReal
    sign: int
    passed: bool


def _ball(value, prec: int) -> BallReal:
    if isinstance(value, BallReal):
        return value
    if isinstance(value, Fraction):
        return BallReal.exact(value, prec)
    return fold(value, prec)


def completed_functional_equation(
    F: NumberFieldRecord,
    n: int,
    prec: Optional[int] = None,
    tolerance: Optional[float] = None
) -> CompletedFunctionalEquation:
    """Compara |D|^{n/2} xi*(n) con |D|^{(1-n)/2} xi*(1-n).

    Sólo se afirma la igualdad de módulos; el signo se informa aparte.
    """
    settings = get_settings()
    prec = prec or settings.default_precision
    tolerance = tolerance or settings.tolerance
    left = completed_zeta_leading(F, n, prec)
    right = completed_zeta_leading(F, 1 - n, prec)
    scale = fold(
        sympy.Integer(F.abs_disc) ** sympy.Rational(2 * n - 1, 2), prec + 16
    )
    ratio = scale * _ball(left.coefficient, prec) / _ball(right.coefficient, prec)
    magnitude = abs(ratio)
    passed = left.order == right.order and (magnitude - 1).upper <= tolerance \
        and (1 - magnitude).upper <= tolerance
    sign = 1 if ratio.is_positive() else -1
    logger.debug(
        "Ecuación funcional completada de %s en n=%d: razón %s",
        F.label, n, ratio
    )
    return CompletedFunctionalEquation(
        n, left.order, right.order, ratio, sign, passed
    )

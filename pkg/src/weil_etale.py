"""Tablas de cohomología Weil-étale de Spec O_F y predicciones de valores.

Las tablas son simbólicas: cada entrada es un ``GroupDescriptor`` con rango y
factores de torsión con nombre. Los órdenes numéricos sólo se resuelven con
datos de teoría K explícitos (o con w_n calculado de los caracteres).
"""
import logging
import math
from collections import Counter
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import Optional

import sympy

from .dirichlet import dedekind_zeta_leading, gamma_star, torsion_w_n
from .errors import (
    DomainError,
    DualityViolationError,
    InconsistencyError,
    OrderMismatchError,
    PredictionMismatchError,
)
from .models import KTheoryData, NumberFieldRecord
from .numeric import BallReal, fold, rational_reconstruction
from .settings import get_settings


logger = logging.getLogger(__name__)


def delta(i: int, n: int) -> int:
    return 1 if (i - n) % 2 == 0 else 0


def epsilon(i: int, n: int) -> int:
    if 1 <= i <= n or n < i < 0:
        return delta(i, n)
    return 0


def epsilon_symmetry_defects(
    degrees: range = range(-6, 9),
    twists: range = range(-6, 7)
) -> set[tuple[int, int]]:
    """Pares (i, n) con eps_{i,n} != eps_{3-i,1-n}."""
    return {
        (i, n)
        for i in degrees
        for n in twists
        if epsilon(i, n) != epsilon(3 - i, 1 - n)
    }


# Descriptores de grupos

class Theory(str, Enum):
    W = "W-compactified"
    AR = "ar-compactified"
    AR_C = "ar-compact-support"


@dataclass(frozen=True)
class GroupDescriptor:
    """Grupo finitamente generado (o localmente compacto) descrito por nombre.

    ``torsion`` es una tupla de pares (símbolo, multiplicidad); un sufijo
    "^D" marca el dual de Pontryagin. ``real_dim`` es la dimensión real de
    la parte real cuando difiere del rango.
    """
    rank: int = 0
    torsion: tuple[tuple[str, int], ...] = ()
    label: str = ""
    real_dim: Optional[int] = None
    named_order: Optional[int] = None

    def __post_init__(self):
        if self.rank < 0 or any(k < 0 for _, k in self.torsion):
            message = "Rango y multiplicidades deben ser no negativos"
            raise ValueError(message)

    @property
    def real_dimension(self) -> int:
        return self.rank if self.real_dim is None else self.real_dim

    def is_zero(self) -> bool:
        return (
            self.rank == 0
            and self.real_dimension == 0
            and not any(k for _, k in self.torsion)
        )

    def torsion_key(self) -> Counter:
        # El emparejamiento ignora la marca de dual
        key: Counter = Counter()
        for symbol, k in self.torsion:
            if k:
                key[symbol.removesuffix("^D")] += k
        return key

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        if self.label:
            parts.append(self.label)
        elif self.rank:
            parts.append("Z" if self.rank == 1 else f"Z^{self.rank}")
        for symbol, k in self.torsion:
            if k and not self.label:
                parts.append(symbol if k == 1 else f"({symbol})^{k}")
        text = " + ".join(parts) or "0"
        if self.named_order is not None:
            text += f" [orden {self.named_order}]"
        return text


ZERO = GroupDescriptor()


def _z2(k: int) -> GroupDescriptor:
    return GroupDescriptor(torsion=(("Z/2", k),)) if k else ZERO


@dataclass(frozen=True)
class CohomologyTable:
    theory: Theory
    n: int
    r1: int
    r2: int
    entries: dict[int, GroupDescriptor] = field(default_factory=dict)

    def entry(self, i: int) -> GroupDescriptor:
        return self.entries.get(i, ZERO)

    @property
    def window(self) -> range:
        return range(min(-1, self.n - 1), max(4, self.n + 1) + 1)

    def euler_order(self) -> int:
        # sum (-1)^i i dim_R H^i
        return sum(
            (-1) ** i * i * g.real_dimension for i, g in self.entries.items()
        )


def h1_rank(F: NumberFieldRecord, n: int) -> int:
    """dim prod_{v|inf} H^0(F_v, (2 pi i)^{n-1} R) = r2 + r1 delta_{1,n}."""
    return F.r2 + F.r1 * delta(1, n)


def _positive_twist_w(F: NumberFieldRecord, n: int) -> dict[int, GroupDescriptor]:
    if n == 1:
        return {
            1: GroupDescriptor(
                rank=F.r1 + F.r2 - 1, torsion=(("mu(F)", 1),), label="O_F^x"
            ),
            2: GroupDescriptor(torsion=(("Cl(O_F)", 1),), label="Cl(O_F)"),
            3: GroupDescriptor(rank=1, label="Z"),
        }
    entries = {
        1: GroupDescriptor(
            rank=h1_rank(F, n),
            torsion=((f"H^{{1,{n}}}_tor", 1),),
            label=f"H^{{1,{n}}}",
        ),
        2: GroupDescriptor(
            torsion=((f"H^{{2,{n}}}", 1),), label=f"H^{{2,{n}}}"
        ),
        3: _z2(F.r1 * epsilon(3, n)),
    }
    for i in range(4, n + 2):
        entries[i] = _z2(F.r1 * epsilon(i, n))
    return entries


def _nonpositive_twist_w(F: NumberFieldRecord, n: int) -> dict[int, GroupDescriptor]:
    if n == 0:
        return {
            0: GroupDescriptor(rank=1, label="Z"),
            2: GroupDescriptor(
                rank=F.r1 + F.r2 - 1,
                torsion=(("Cl(O_F)^D", 1),),
                label="(O_F^x)^* + Cl(O_F)^D",
            ),
            3: GroupDescriptor(torsion=(("mu(F)^D", 1),), label="(O_F^x)_tor^D"),
        }
    m = 1 - n
    entries = {
        2: GroupDescriptor(
            rank=h1_rank(F, m),
            torsion=((f"H^{{2,{m}}}^D", 1),),
            label=f"(H^{{1,{m}}})^* + (H^{{2,{m}}})^D",
        ),
        3: GroupDescriptor(
            torsion=((f"H^{{1,{m}}}_tor^D", 1),),
            label=f"(H^{{1,{m}}}_tor)^D",
        ),
    }
    for i in range(n + 1, 0):
        entries[i] = _z2(F.r1 * epsilon(i - 1, n))
    return entries


def _w_table(F: NumberFieldRecord, n: int) -> dict[int, GroupDescriptor]:
    if n >= 1:
        return _positive_twist_w(F, n)
    return _nonpositive_twist_w(F, n)


def _ar_table(F: NumberFieldRecord, n: int) -> dict[int, GroupDescriptor]:
    entries = _w_table(F, n)
    if n == 1:
        entries[1] = GroupDescriptor(torsion=(("mu(F)", 1),), label="(O_F^x)_tor")
        # Cl(X) grupo de clases de Arakelov: símbolo opaco
        entries[2] = GroupDescriptor(torsion=(("Cl(X)", 1),), label="Cl(X)")
    elif n > 1:
        entries[1] = GroupDescriptor(
            torsion=((f"H^{{1,{n}}}_tor", 1),), label=f"H^{{1,{n}}}_tor"
        )
        entries[2] = GroupDescriptor(
            torsion=((f"coker(r_{n})", 1), (f"H^{{2,{n}}}", 1)),
            label=f"coker(r_{n}) + H^{{2,{n}}}",
        )
    return entries


def _ar_compact_table(F: NumberFieldRecord, n: int) -> dict[int, GroupDescriptor]:
    rho = F.rho(n)
    if n <= 0:
        w = _nonpositive_twist_w(F, n)
        return {
            1: GroupDescriptor(rank=rho, label=f"Z^{rho}" if rho != 1 else "Z"),
            2: w[2] if n < 0 else replace(w[2], rank=rho),
            3: w[3],
        }
    if n == 1:
        return {
            # extensión de R por un grupo compacto
            2: GroupDescriptor(
                torsion=(("H^1_{ar,c}(R/Z(1))", 1),),
                label="H^2_{ar,c}(Z(1))",
                real_dim=1,
            ),
            3: GroupDescriptor(rank=1, label="Z"),
        }
    return {
        2: GroupDescriptor(
            torsion=((f"H^2_{{ar,c}}(Z({n}))", 1),),
            label=f"H^2_{{ar,c}}(Z({n}))",
        ),
        3: _z2(0) if not F.r1 * epsilon(2, n) else GroupDescriptor(
            torsion=((f"H^3_{{ar,c}}(Z({n}))", 1),),
            label=f"cociente de (Z/2)^{F.r1 * epsilon(2, n)}",
        ),
    }


def _resolve(
    group: GroupDescriptor,
    F: NumberFieldRecord,
    K: Optional[KTheoryData]
) -> GroupDescriptor:
    order = 1
    for symbol, k in group.torsion:
        base = symbol.removesuffix("^D")
        value = _symbol_order(base, F, K)
        if value is None:
            return group
        order *= value ** k
    if not group.torsion:
        return group
    return replace(group, named_order=order)


def _symbol_order(
    symbol: str,
    F: NumberFieldRecord,
    K: Optional[KTheoryData]
) -> Optional[int]:
    if symbol == "Z/2":
        return 2
    entry = None
    if symbol in ("mu(F)", "Cl(O_F)"):
        m = 1
    elif symbol.startswith("H^{1,") or symbol.startswith("H^{2,"):
        m = int(symbol[5:symbol.index("}")])
    else:
        return None
    if K is not None:
        entry = K.get(m)
    if symbol in ("Cl(O_F)",) or symbol.startswith("H^{2,"):
        return entry.h if entry else None
    if entry is not None:
        return entry.w
    if F.characters is not None:
        return torsion_w_n(F, m)
    return None


def cohomology_tables(
    F: NumberFieldRecord,
    n: int,
    K: Optional[KTheoryData] = None
) -> dict[Theory, CohomologyTable]:
    """Las tres tablas de Spec O_F en el twist n."""
    K = K if K is not None else F.invariants
    builders = {
        Theory.W: _w_table,
        Theory.AR: _ar_table,
        Theory.AR_C: _ar_compact_table,
    }
    tables = {}
    for theory, build in builders.items():
        entries = {
            i: _resolve(g, F, K)
            for i, g in build(F, n).items()
            if not g.is_zero()
        }
        tables[theory] = CohomologyTable(theory, n, F.r1, F.r2, entries)
    return tables


def vanishing_order_prediction(F: NumberFieldRecord, n: int) -> int:
    """rho_n por la forma cerrada y por la característica de Euler."""
    closed = F.rho(n)
    table = cohomology_tables(F, n)[Theory.AR_C]
    euler = table.euler_order()
    if closed != euler:
        message = (
            f"{F.label}: rho_{n} = {closed} pero la tabla compacta "
            f"da {euler}"
        )
        raise OrderMismatchError(message, euler, closed)
    return closed


@dataclass(frozen=True)
class DualityReport:
    n: int
    partner: int
    ranks: dict[int, tuple[int, int]]
    torsion: dict[int, tuple[str, str]]
    violations: tuple[int, ...]

    @property
    def passed(self) -> bool:
        return not self.violations


def duality_report(F: NumberFieldRecord, n: int) -> DualityReport:
    """Compara H^i_W(n) con H^{3-i}_W(1-n) (rangos) y H^{4-i}_W(1-n) (torsión)."""
    partner = 1 - n
    left = cohomology_tables(F, n)[Theory.W]
    right = cohomology_tables(F, partner)[Theory.W]
    lo = min(left.window.start, 4 - right.window.stop)
    hi = max(left.window.stop, 4 - right.window.start)
    ranks, torsion, violations = {}, {}, []
    for i in range(lo, hi + 1):
        a, b = left.entry(i).rank, right.entry(3 - i).rank
        ta, tb = left.entry(i).torsion_key(), right.entry(4 - i).torsion_key()
        if a or b:
            ranks[i] = (a, b)
        if ta or tb:
            torsion[i] = (_key_text(ta), _key_text(tb))
        if a != b or ta != tb:
            violations.append(i)
    return DualityReport(n, partner, ranks, torsion, tuple(violations))


def _key_text(key: Counter) -> str:
    return " + ".join(
        s if k == 1 else f"({s})^{k}" for s, k in sorted(key.items())
    ) or "0"


def duality_check(F: NumberFieldRecord, n: int) -> DualityReport:
    report = duality_report(F, n)
    if report.violations:
        message = (
            f"{F.label}: dualidad Weil-étale n={n} <-> {report.partner} "
            f"falla en grados {list(report.violations)}"
        )
        raise DualityViolationError(message, report.violations)
    return report


# Predicciones de valores especiales

def correction_factor(F: NumberFieldRecord, n: int) -> Fraction:
    """C(Spec O_F, n) = (n-1)!^{-[F:Q]} para n >= 1 y 1 para n <= 0."""
    if n <= 0:
        return Fraction(1)
    return Fraction(1, math.factorial(n - 1) ** F.degree)


@dataclass(frozen=True)
class DerivedDeRham:
    value: Fraction
    trivial: bool
    statement: str


def derived_derham_det(
    F: NumberFieldRecord,
    n: int,
    strict: bool = False
) -> DerivedDeRham:
    """|H^1(F^1/F^n)| = |D_F|^{n-1}."""
    if n <= 0:
        if strict:
            message = "RGamma_dR/F^n es nulo para n <= 0"
            raise DomainError(message)
        return DerivedDeRham(Fraction(1), True, "RGamma_dR/F^n = 0")
    value = Fraction(F.abs_disc ** (n - 1))
    statement = f"det_Z RGamma_dR/F^{n} = {value} * det_Z O_F"
    return DerivedDeRham(value, False, statement)


def kfree_factor(F: NumberFieldRecord, n: int) -> sympy.Expr:
    """Parte de la predicción independiente de h_n R_n / w_n."""
    if n <= 0:
        return sympy.Integer(1)
    C = correction_factor(F, n)
    derham = derived_derham_det(F, n).value
    d, r1, r2 = F.degree, F.r1, F.r2
    two_power = r1 * (delta(1, n) - delta(2, n))
    pi_power = d * n - r2 - r1 * delta(1, n)
    return (
        sympy.Rational(C.numerator, C.denominator)
        / sympy.Rational(derham.numerator, derham.denominator)
        * sympy.Integer(2) ** two_power
        * (2 * sympy.pi) ** pi_power
        / sympy.sqrt(F.abs_disc)
    )


@dataclass(frozen=True)
class FundamentalLineReport:
    label: str
    n: int
    correction: Fraction
    derham_det: Fraction
    closed_form: str
    kfree: sympy.Expr
    analytic_order: int
    analytic: BallReal
    predicted_value: Optional[BallReal] = None
    ratio: Optional[BallReal] = None
    sign: Optional[int] = None
    solved_ratio: Optional[BallReal] = None
    reconstructed: Optional[Fraction] = None

    @property
    def resolved(self) -> bool:
        return self.predicted_value is not None


def _abs_ball(value, prec: int) -> BallReal:
    if isinstance(value, Fraction):
        value = BallReal.exact(value, prec)
    elif not isinstance(value, BallReal):
        value = fold(value, prec)
    return abs(value)


def _within(ratio: BallReal, tolerance: float) -> bool:
    return (ratio - 1).upper <= tolerance and (1 - ratio).upper <= tolerance


def special_value_prediction(
    F: NumberFieldRecord,
    n: int,
    K: Optional[KTheoryData] = None,
    prec: Optional[int] = None,
    tolerance: Optional[float] = None
) -> FundamentalLineReport:
    """Predicción de zeta*_F(n) desde la línea fundamental.

    Con datos K compara |predicho| con |analítico|; sin ellos devuelve la
    razón implicada h R / w e intenta reconstruirla como racional.
    """
    settings = get_settings()
    prec = prec or settings.default_precision
    tolerance = tolerance or settings.tolerance
    K = K if K is not None else F.invariants
    m = n if n >= 1 else 1 - n

    kfree = kfree_factor(F, n)
    h, R, w = sympy.symbols(f"h_{m} R_{m} w_{m}", positive=True)
    closed = kfree * h * R / w
    closed_form = str(closed) if n >= 1 else f"+-{closed}"

    analytic = dedekind_zeta_leading(F, n, prec)
    magnitude = _abs_ball(analytic.coefficient, prec)
    report = FundamentalLineReport(
        label=F.label,
        n=n,
        correction=correction_factor(F, n),
        derham_det=derived_derham_det(F, n).value,
        closed_form=closed_form,
        kfree=kfree,
        analytic_order=analytic.order,
        analytic=magnitude,
    )

    entry = K.get(m) if K is not None else None
    if entry is None:
        solved = magnitude / fold(kfree, prec + 16)
        bound = settings.rational_denominator_bound
        logger.info(
            "%s n=%d: sin datos K, razón implicada %s", F.label, n, solved
        )
        return replace(
            report,
            solved_ratio=solved,
            reconstructed=rational_reconstruction(solved, bound),
        )

    predicted = fold(kfree, prec + 16) * entry.regulator(prec + 16) \
        * Fraction(entry.h, entry.w)
    ratio = magnitude / predicted
    report = replace(
        report,
        predicted_value=predicted,
        ratio=ratio,
        sign=_sign(analytic.coefficient, prec),
    )
    if not _within(ratio, tolerance):
        message = (
            f"{F.label} n={n}: |zeta*| / predicción = {ratio} fuera de la "
            f"tolerancia {tolerance}"
        )
        raise PredictionMismatchError(message, defect=str(ratio))
    return report


def _sign(value, prec: int) -> int:
    if isinstance(value, Fraction):
        return 1 if value > 0 else -1
    ball = value if isinstance(value, BallReal) else fold(value, prec)
    return 1 if ball.is_positive() else -1


@dataclass(frozen=True)
class FunctionalEquationReport:
    n: int
    predicted_ratio: sympy.Expr
    forced_ratio: sympy.Expr
    symbolic_quotient: sympy.Expr
    numeric_ratio: BallReal
    analytic_ratio: Optional[BallReal]


def fe_consistency_check(
    F: NumberFieldRecord,
    n: int,
    prec: Optional[int] = None,
    tolerance: Optional[float] = None
) -> FunctionalEquationReport:
    """Coherencia de las predicciones en n y 1-n con la ecuación funcional.

    h R / w se cancela: la razón predicha es la parte libre de K en n, y la
    forzada es |D|^{(1-2n)/2} Gamma*(1-n) / Gamma*(n). Se comparan en módulo.
    """
    settings = get_settings()
    prec = prec or settings.default_precision
    tolerance = tolerance or settings.tolerance
    if n < 1:
        message = "fe_consistency_check requiere n >= 1"
        raise DomainError(message)

    predicted = kfree_factor(F, n) / kfree_factor(F, 1 - n)
    _, c_dual = gamma_star(F, 1 - n, prec)
    _, c_here = gamma_star(F, n, prec)
    forced = sympy.Integer(F.abs_disc) ** sympy.Rational(1 - 2 * n, 2) \
        * c_dual / c_here
    quotient = sympy.simplify(predicted / forced)
    numeric = abs(fold(predicted, prec + 16) / fold(forced, prec + 16))

    analytic_ratio = None
    if F.characters is not None or F.zeta_values:
        here = dedekind_zeta_leading(F, n, prec)
        dual = dedekind_zeta_leading(F, 1 - n, prec)
        analytic_ratio = _abs_ball(here.coefficient, prec) \
            / _abs_ball(dual.coefficient, prec)
        expected = abs(fold(predicted, prec + 16))
        if not _within(analytic_ratio / expected, tolerance):
            message = (
                f"{F.label} n={n}: razón analítica {analytic_ratio} distinta "
                f"de la predicha {expected}"
            )
            raise InconsistencyError(message, defect=str(analytic_ratio / expected))

    if quotient not in (1, -1) and not _within(numeric, tolerance):
        message = (
            f"{F.label} n={n}: la predicción en n y en 1-n no es coherente "
            f"con la ecuación funcional (cociente {quotient})"
        )
        raise InconsistencyError(message, defect=str(quotient))
    return FunctionalEquationReport(
        n, predicted, forced, quotient, numeric, analytic_ratio
    )

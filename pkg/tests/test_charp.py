from fractions import Fraction

import pytest

from src.charp import (
    detstar_trivialization,
    milne_chi,
    order_leading_at,
    point_count_curve,
    poincare_duality_defects,
    riemann_hypothesis_check,
    root_multiplicities,
    weil_etale_rank_order,
    zeta_from_weil_polys,
    zeta_functional_equation,
)
from src.errors import (
    DomainError,
    InvariantViolationError,
    OverflowGuardError,
    SingularCurveError,
)
from src.models import CurveSpec, WeilPolySet


def _curve(p1, q):
    return WeilPolySet(
        label="curva", q=q, dim=1, polys={0: [1, -1], 1: list(p1), 2: [1, -q]}
    )


def test_zeta_of_projective_line(variety):
    P1 = variety("p1_f5")
    Z = zeta_from_weil_polys(P1)
    assert Z.numerator == (1,)
    assert Z.denominator == (1, -6, 5)
    assert Z.euler_characteristic == 2


def test_zeta_of_elliptic_curve(variety):
    E = variety("e_f5")
    Z = zeta_from_weil_polys(E)
    assert Z.numerator == (1, -2, 5)
    assert Z.euler_characteristic == 0
    assert "t" in str(Z)


def test_zeta_of_a_point():
    point = WeilPolySet(label="Spec F_5", q=5, dim=0, polys={0: [1, -1]})
    Z = zeta_from_weil_polys(point)
    assert Z.numerator == (1,)
    assert Z.denominator == (1, -1)


def test_functional_equation_sign(variety):
    for name in ("p1_f5", "e_f5"):
        sign, _ = zeta_functional_equation(variety(name))
        assert sign == 1


def test_riemann_hypothesis_rejects_bad_polynomial():
    bad = _curve((1, -7, 5), 5)
    # cumple la dualidad de Poincaré pero no la hipótesis de Riemann
    assert poincare_duality_defects(bad) == []
    assert not riemann_hypothesis_check(bad).passed
    with pytest.raises(InvariantViolationError):
        zeta_from_weil_polys(bad)

    # sin verificación se construye igualmente
    assert zeta_from_weil_polys(bad, verify=False).numerator == (1, -7, 5)


def test_poincare_duality_defect():
    broken = _curve((1, -2, 7), 5)
    assert 1 in poincare_duality_defects(broken)


def test_order_and_leading_value(variety):
    P1 = variety("p1_f5")
    at_one = order_leading_at(P1, 1)
    assert at_one.order == -1
    assert at_one.coefficient == Fraction(5, 4)

    E = variety("e_f5")
    assert order_leading_at(E, 1).order == -1
    assert order_leading_at(E, 1).coefficient == 1
    assert order_leading_at(E, 0).coefficient == -1

    # fuera de los polos Z es regular y no nula
    assert order_leading_at(E, 2).order == 0


def test_detstar_agrees_with_leading_value(variety):
    E = variety("e_f5")
    for n in (0, 1, 2):
        report = detstar_trivialization(E, n)
        assert report.semisimple_at_zero
        assert report.agrees
        assert report.correction_factor == 1


def test_detstar_with_jordan_block_is_not_asserted(variety):
    report = detstar_trivialization(variety("jordan_f3"), 1)
    assert report.semisimple[1] is False
    assert report.agrees is None


def test_milne_chi(variety):
    E = variety("e_f5")
    assert milne_chi(E.hodge, 1) == 0
    P1 = variety("p1_f5")
    assert milne_chi(P1.hodge, 1) == 1
    assert milne_chi(P1.hodge, 0) == 0


def test_rank_order_identity(variety):
    P1 = variety("p1_f5")
    report = weil_etale_rank_order(P1, 1)
    assert report.ranks == {2: 1, 3: 1}
    assert report.t_order == report.s_order == -1

    E = variety("e_f5")
    assert root_multiplicities(E, 0) == {0: 1, 1: 0, 2: 0}
    assert weil_etale_rank_order(E, 0).ranks == {0: 1, 1: 1}


def test_point_count_elliptic_curves():
    count = point_count_curve(CurveSpec(coefficients=(0, 1, 0, 1)), 5)
    assert count.counts == (4,)
    assert count.p1 == (1, -2, 5)

    count = point_count_curve(CurveSpec(coefficients=(0, -1, 0, 1)), 3)
    assert count.counts == (4,)
    assert count.p1 == (1, 0, 3)


def test_point_count_genus_two():
    curve = CurveSpec(coefficients=(1, 0, 0, 0, 0, 1))
    for q in (3, 7):
        count = point_count_curve(curve, q)
        assert count.genus == 2
        assert len(count.counts) == 2
        assert riemann_hypothesis_check(_curve(count.p1, q)).passed


def test_point_count_guards():
    with pytest.raises(SingularCurveError):
        point_count_curve(CurveSpec(coefficients=(1, 0, 0, 1)), 2)
    with pytest.raises(SingularCurveError):
        point_count_curve(CurveSpec(coefficients=(0, 0, 0, 1)), 5)
    with pytest.raises(DomainError):
        point_count_curve(CurveSpec(coefficients=(0, 1, 0, 1)), 9)
    with pytest.raises(OverflowGuardError):
        point_count_curve(CurveSpec(coefficients=(0, 1, 0, 1)), 10007)


def test_point_count_large_genus_two_prime_leaves_p1_open():
    count = point_count_curve(CurveSpec(coefficients=(1, 0, 0, 0, 0, 1)), 503)
    assert count.p1 is None
    assert count.notes


def test_projective_line_over_small_primes():
    for p in (2, 3, 5, 7):
        P1 = WeilPolySet(
            label=f"P1/F_{p}", q=p, dim=1, polys={0: [1, -1], 2: [1, -p]},
            hodge={"0,0": 1, "1,1": 1}
        )
        sign, _ = zeta_functional_equation(P1)
        assert sign == 1
        leading = order_leading_at(P1, 1)
        assert leading.order == -1
        assert leading.coefficient == Fraction(p, p - 1)
        for n in (0, 1):
            assert detstar_trivialization(P1, n).agrees
            report = weil_etale_rank_order(P1, n)
            assert report.euler_side == report.t_order

from fractions import Fraction

import pytest
import sympy

from src.dirichlet import (
    dedekind_zeta_leading,
    dirichlet_L_leading,
    euler_product_zeta,
    functional_equation_transfer,
    gamma_star,
    has_trivial_zero,
    root_number,
    torsion_w_n,
)
from src.errors import DomainError, OrderMismatchError
from src.models import DirichletCharacter, NumberFieldRecord
from src.numeric import BallComplex, BallReal, LeadingTaylor, fold


CHI_1 = DirichletCharacter(modulus=1, order=1, values=[(0, 0)])
CHI_4 = DirichletCharacter(modulus=4, order=2, values=[(1, 0), (3, 1)])
CHI_7 = DirichletCharacter(
    modulus=7, order=3,
    values=[(1, 0), (2, 2), (3, 1), (4, 1), (5, 2), (6, 0)]
)


def _q_table(zeta_values):
    return NumberFieldRecord(
        label="Q (tabla)", degree=1, r1=1, r2=0, disc=1,
        zeta_values=zeta_values
    )


def test_riemann_zeta_at_nonpositive_integers(field):
    Q = field("q")
    zero = dedekind_zeta_leading(Q, 0, 128)
    assert zero.order == 0
    assert zero.coefficient == Fraction(-1, 2)

    assert dedekind_zeta_leading(Q, -1, 128).coefficient == Fraction(-1, 12)

    # cero trivial: zeta'(-2) = -zeta(3) / (4 pi^2)
    trivial = dedekind_zeta_leading(Q, -2, 128)
    assert trivial.order == 1
    expected = fold(-sympy.zeta(3) / (4 * sympy.pi ** 2), 128)
    assert trivial.ball(128).overlaps(expected)


def test_riemann_zeta_pole_and_positive_values(field):
    Q = field("q")
    pole = dedekind_zeta_leading(Q, 1, 128)
    assert pole.order == -1
    assert pole.coefficient == 1

    two = dedekind_zeta_leading(Q, 2, 128)
    assert two.ball(128).overlaps(fold(sympy.pi ** 2 / 6, 128))


def test_l_function_of_odd_character():
    assert not has_trivial_zero(CHI_4, 0)
    assert has_trivial_zero(CHI_4, -1)

    assert dirichlet_L_leading(CHI_4, 0, 128).coefficient == Fraction(1, 2)
    one = dirichlet_L_leading(CHI_4, 1, 128)
    assert one.order == 0
    assert one.ball(128).overlaps(fold(sympy.pi / 4, 128))

    # L(3, chi_4) = pi^3 / 32
    three = dirichlet_L_leading(CHI_4, 3, 128)
    assert three.ball(128).overlaps(fold(sympy.pi ** 3 / 32, 128))


def test_root_number_has_modulus_one():
    assert root_number(CHI_4, 128).re.contains(1)
    w = root_number(CHI_7, 128)
    assert w.abs_squared().contains(1)


def test_gaussian_field(field):
    K = field("q_i")
    assert dedekind_zeta_leading(K, 0, 128).coefficient == Fraction(-1, 4)
    residue = dedekind_zeta_leading(K, 1, 128)
    assert residue.order == -1
    assert residue.ball(128).overlaps(fold(sympy.pi / 4, 128))

    assert dedekind_zeta_leading(K, -1, 128).order == 1
    assert dedekind_zeta_leading(K, -2, 128).order == 1


def test_cubic_field_with_complex_characters(field):
    F = field("cubic_7")
    assert dedekind_zeta_leading(F, 0, 128).order == 2
    assert dedekind_zeta_leading(F, -1, 128).order == 0
    assert dedekind_zeta_leading(F, 2, 128).ball(128).is_positive()


def test_gamma_star():
    Q = NumberFieldRecord(label="Q", degree=1, r1=1, r2=0, disc=1)
    order, coefficient = gamma_star(Q, 0, 128)
    assert order == -1
    assert coefficient == 2


def test_functional_equation_transfer_from_data_table():
    Q = _q_table({2: {"order": 0, "value": "1.6449340668482264364724151666460251892"}})
    leading = dedekind_zeta_leading(Q, -1, 128)
    assert leading.order == 0
    assert leading.coefficient == Fraction(-1, 12)

    with pytest.raises(DomainError):
        functional_equation_transfer(Q, -1, LeadingTaylor(3, 0, Fraction(1)), 128)

    with pytest.raises(DomainError):
        dedekind_zeta_leading(Q, 5, 128)


def test_order_mismatch_with_closed_form():
    Q = _q_table({0: {"order": 1, "value": "1"}})
    with pytest.raises(OrderMismatchError) as exc:
        dedekind_zeta_leading(Q, 0, 128)
    assert exc.value.predicted == 0


def test_euler_product_encloses_zeta_two(field):
    value = euler_product_zeta(field("q"), 2, 128)
    assert value.overlaps(fold(sympy.pi ** 2 / 6, 128))

    with pytest.raises(DomainError):
        euler_product_zeta(field("q"), 1, 128)


def test_torsion_w_n(field):
    Q = field("q")
    assert [torsion_w_n(Q, n) for n in (1, 2, 3, 4)] == [2, 24, 2, 240]
    assert torsion_w_n(field("q_i"), 1) == 4
    assert torsion_w_n(field("q_sqrt5"), 1) == 2
    assert torsion_w_n(field("cubic_7"), 1) == 2

    with pytest.raises(DomainError):
        torsion_w_n(Q, 0)


def test_riemann_zeta_trivial_zeros_from_principal_character():
    assert not has_trivial_zero(CHI_1, 0)
    assert not has_trivial_zero(CHI_1, -1)
    assert has_trivial_zero(CHI_1, -2)

    # zeta'(-2) = -zeta(3)/(4 pi^2), zeta'(-4) = 3 zeta(5)/(4 pi^4)
    expected = {
        -2: -sympy.zeta(3) / (4 * sympy.pi ** 2),
        -4: 3 * sympy.zeta(5) / (4 * sympy.pi ** 4),
    }
    for n, value in expected.items():
        leading = dirichlet_L_leading(CHI_1, n, 128)
        assert leading.order == 1
        assert leading.coefficient.overlaps(fold(value, 128))

    assert dirichlet_L_leading(CHI_1, 0, 128).coefficient == Fraction(-1, 2)


def test_product_of_l_functions_matches_euler_product(field):
    for name in ("q_i", "q_sqrt5", "cubic_7"):
        F = field(name)
        for n in (2, 3):
            product = BallComplex.from_real(BallReal.exact(1, 128))
            for chi in F.characters:
                product = product * dirichlet_L_leading(chi, n, 128).coefficient
            assert product.is_real(), (name, n)
            assert product.re.overlaps(euler_product_zeta(F, n, 128)), (name, n)

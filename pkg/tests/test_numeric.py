from fractions import Fraction

import pytest
import sympy
from mpmath import mp

from src.errors import DomainError, PoleError, SchemaError, UnverifiedOrderError
from src.numeric import (
    BallComplex,
    BallReal,
    GammaKind,
    LeadingTaylor,
    bernoulli,
    bernoulli_polynomial,
    fold,
    gamma_leading,
    hurwitz_zeta,
    hurwitz_zeta_constant,
    parse_real,
    rational_reconstruction,
    scale_by_exact,
)


def test_exact_balls_contain_their_value():
    third = BallReal.exact(Fraction(1, 3), 128)
    assert third.contains(Fraction(1, 3))
    assert not third.contains(Fraction(1, 3) + Fraction(1, 10 ** 30))

    total = third + third + third
    assert total.contains(1)
    assert (third * 3 - 1).contains_zero()


def test_division_by_ball_containing_zero():
    one = BallReal.exact(1, 64)
    with pytest.raises(DomainError):
        one / BallReal.exact(0, 64)


def test_zeta_two_matches_pi_squared_over_six():
    # ancho relativo <= 1e-28 a 128 bits
    value = hurwitz_zeta(2, 1, 128)
    assert value.overlaps(fold(sympy.pi ** 2 / 6, 128))
    assert value.relative_width() <= mp.mpf("1e-28")


def test_hurwitz_pole_and_domain():
    with pytest.raises(PoleError):
        hurwitz_zeta(1, 1, 128)
    with pytest.raises(DomainError):
        hurwitz_zeta(2, Fraction(3, 2), 128)


def test_hurwitz_at_nonpositive_integers_is_bernoulli():
    # zeta_H(-k, a) = -B_{k+1}(a) / (k+1)
    value = hurwitz_zeta(-2, Fraction(1, 3), 128)
    expected = -bernoulli_polynomial(3, Fraction(1, 3)) / 3
    assert value.contains(expected)

    assert hurwitz_zeta(-1, 1, 128).contains(Fraction(-1, 12))
    assert hurwitz_zeta(0, Fraction(1, 2), 128).contains(0)


@pytest.mark.parametrize("k", range(1, 21))
def test_riemann_zeta_at_negative_integers_is_bernoulli(k):
    # zeta(1-k) = -B_k(1)/k; B_k(1) = B_k salvo B_1(1) = 1/2
    expected = -bernoulli_polynomial(k, 1) / k
    assert hurwitz_zeta(1 - k, 1, 128).contains(expected)
    if k > 1:
        assert expected == -bernoulli(k) / k


def test_euler_constant_from_hurwitz():
    gamma = parse_real("0.5772156649015328606065120900824024310422", 128)
    assert hurwitz_zeta_constant(1, 128).overlaps(gamma)


def test_bernoulli_numbers():
    assert bernoulli(0) == 1
    assert bernoulli(1) == Fraction(-1, 2)
    assert bernoulli(2) == Fraction(1, 6)
    assert bernoulli(12) == Fraction(-691, 2730)
    assert all(bernoulli(k) == 0 for k in range(3, 20, 2))
    assert bernoulli_polynomial(2, Fraction(1, 2)) == Fraction(-1, 12)


def test_gamma_leading_data():
    # Gamma_R(s) tiene polo simple en 0 con residuo 2
    leading = gamma_leading(GammaKind.GAMMA_R, 0, 64)
    assert leading.order == -1
    assert sympy.sympify(leading.coefficient) == 2

    assert gamma_leading(GammaKind.GAMMA_R, 1, 64).coefficient == 1
    assert gamma_leading(GammaKind.GAMMA_R, -1, 64).order == 0

    complex_ = gamma_leading(GammaKind.GAMMA_C, 0, 64)
    assert complex_.order == -1
    assert sympy.sympify(complex_.coefficient) == 2

    gamma = gamma_leading(GammaKind.GAMMA, -2, 64)
    assert gamma.order == -1
    assert sympy.sympify(gamma.coefficient) == sympy.Rational(1, 2)


def test_leading_taylor_rejects_zero_coefficient():
    with pytest.raises(UnverifiedOrderError):
        LeadingTaylor(0, 0, Fraction(0))
    with pytest.raises(UnverifiedOrderError):
        LeadingTaylor(0, 0, BallReal.exact(0, 64))

    exact = LeadingTaylor(0, 0, Fraction(-1, 2))
    assert exact.is_exact()
    assert exact.ball(64).contains(Fraction(-1, 2))


def test_parse_real():
    assert parse_real("1/3", 128).contains(Fraction(1, 3))

    decimal = parse_real("1.25", 128)
    assert decimal.contains(Fraction(5, 4))
    assert decimal.contains(Fraction(1249, 1000))
    assert not decimal.contains(Fraction(126, 100))

    closed = parse_real("log((1 + sqrt(5))/2)", 128)
    assert closed.overlaps(parse_real("0.48121182505960344749775891342436842313", 128))

    with pytest.raises(SchemaError):
        parse_real("x + 1", 128)


def test_fold_trigonometric_regulator():
    # regulador del cuerpo cúbico de conductor 7
    text = "log(-2*cos(4*pi/7))**2 - log(2*cos(2*pi/7))*log(-2*cos(6*pi/7))"
    value = parse_real(text, 128)
    assert value.overlaps(parse_real("0.5255", 128))


def test_rational_reconstruction():
    ball = hurwitz_zeta(2, 1, 128) / fold(sympy.pi ** 2, 128)
    assert rational_reconstruction(ball, 10 ** 4) == Fraction(1, 6)
    assert rational_reconstruction(fold(sympy.pi, 128), 10 ** 4) is None


def test_scale_by_exact_keeps_exactness():
    assert scale_by_exact(2, Fraction(1, 4), 64) == Fraction(1, 2)
    assert scale_by_exact(sympy.pi, Fraction(1, 2), 64) == sympy.pi / 2

    ball = scale_by_exact(sympy.pi, BallReal.exact(2, 128), 128)
    assert isinstance(ball, BallReal)
    assert ball.overlaps(fold(2 * sympy.pi, 128))


def test_roots_of_unity():
    i = BallComplex.root_of_unity(1, 4, 128)
    assert i.re.contains_zero()
    assert i.im.contains(1)

    product = i * i
    assert product.re.contains(-1)
    assert product.is_real()

"""Core series arithmetic: frozen oracles and ring-law properties."""

from fractions import Fraction
import random

import pytest
from hypothesis import given, settings, strategies as st

from gpseries.series import (
    Series,
    Signature,
    SeriesError,
    SignatureMismatch,
    binomial_series,
    common_monomial,
    constant,
    divide_monomial,
    evaluate,
    insert_x,
    insert_y,
    invert_unit,
    min_support,
    monomial,
    mul_monomial,
    nth_root_rational,
    partial_y,
    render,
    set_x_to_zero,
    set_y_to_zero,
    substitute_y,
    total_degree,
    x_var,
    y_var,
    zero,
)
from conftest import ps, random_series, random_unit

SIG11 = Signature(1, 1)
SIG21 = Signature(2, 1)


# -- strategies ----------------------------------------------------------------

small_fracs = st.fractions(min_value=-5, max_value=5, max_denominator=3)
x_exps = st.fractions(min_value=0, max_value=4, max_denominator=2)
y_exps = st.integers(min_value=0, max_value=4)


def series_st(sig: Signature, prec=8):
    exps = st.tuples(
        st.tuples(*([x_exps] * sig.m)), st.tuples(*([y_exps] * sig.n))
    )
    return st.dictionaries(exps, small_fracs, max_size=5).map(
        lambda t: Series(sig, t, Fraction(prec))
    )


# -- construction and normalization ---------------------------------------------


def test_zero_coefficients_dropped():
    s = Series(SIG11, {((Fraction(1),), (0,)): Fraction(0)}, 8)
    assert s.is_zero()
    assert s.terms == {}


def test_terms_beyond_precision_dropped():
    s = Series(SIG11, {((Fraction(9),), (0,)): Fraction(1)}, 8)
    assert s.is_zero()


def test_precision_must_be_positive():
    with pytest.raises(SeriesError):
        Series(SIG11, {}, 0)


def test_negative_x_exponent_rejected():
    with pytest.raises(SeriesError):
        Series(SIG11, {((Fraction(-1),), (0,)): Fraction(1)}, 8)


def test_signature_mismatch_raises():
    with pytest.raises(SignatureMismatch):
        zero(SIG11, 8) + zero(SIG21, 8)


def test_immutability():
    s = x_var(SIG11, 1, 8)
    with pytest.raises(AttributeError):
        s.precision = 4


# -- ring laws -------------------------------------------------------------------


@settings(max_examples=60, deadline=None)
@given(series_st(SIG11), series_st(SIG11))
def test_addition_commutes(a, b):
    assert a + b == b + a


@settings(max_examples=60, deadline=None)
@given(series_st(SIG11), series_st(SIG11))
def test_multiplication_commutes(a, b):
    assert a * b == b * a


@settings(max_examples=40, deadline=None)
@given(series_st(SIG11), series_st(SIG11), series_st(SIG11))
def test_multiplication_associates_mod_precision(a, b, c):
    assert ((a * b) * c).eq_mod_precision(a * (b * c))


@settings(max_examples=40, deadline=None)
@given(series_st(SIG11), series_st(SIG11), series_st(SIG11))
def test_distributivity_mod_precision(a, b, c):
    assert (a * (b + c)).eq_mod_precision(a * b + a * c)


@settings(max_examples=40, deadline=None)
@given(series_st(SIG11))
def test_additive_inverse(a):
    assert (a + (-a)).is_zero()


def test_one_is_multiplicative_identity():
    rng = random.Random(7)
    one = constant(SIG21, 1, 8)
    for _ in range(20):
        a = random_series(rng, SIG21)
        assert (one * a).eq_mod_precision(a)


def test_mul_precision_gains_order():
    # multiplying by a series of order 2 pushes the certificate out by 2
    a = ps("x1^2", 1, 1, prec=8)
    b = ps("y1 + x1", 1, 1, prec=8)
    assert (a * b).precision == Fraction(10)


def test_pow_matches_repeated_mul():
    s = ps("1 + x1 + y1", 1, 1, prec=6)
    assert (s ** 3).eq_mod_precision(s * s * s)


# -- truncation and support -------------------------------------------------------


def test_truncate_takes_minimum():
    s = ps("x1 + x1^5", 1, 0, prec=8)
    t = s.truncate(3)
    assert t.precision == Fraction(3)
    assert list(t.terms) == [((Fraction(1),), ())]
    assert s.truncate(20).precision == Fraction(8)


def test_order_and_constant_term():
    s = ps("2 + x1^(1/2)", 1, 0)
    assert s.order() == Fraction(0)
    assert s.constant_term() == 2
    assert s.is_unit()
    assert zero(SIG11, 8).order() is None


def brute_min_support(s: Series):
    def leq(a, b):
        return all(u <= v for u, v in zip(a[0], b[0])) and all(
            u <= v for u, v in zip(a[1], b[1])
        )

    return {e for e in s.terms if not any(f != e and leq(f, e) for f in s.terms)}


def test_min_support_matches_bruteforce():
    rng = random.Random(31)
    for _ in range(50):
        s = random_series(rng, SIG21, nterms=6)
        assert min_support(s) == brute_min_support(s)


def test_common_monomial_roundtrip():
    rng = random.Random(5)
    for _ in range(30):
        s = random_series(rng, SIG21, nterms=5)
        if s.is_zero():
            continue
        beta = common_monomial(s)
        g = divide_monomial(s, beta)
        assert min(total_degree(e) for e in g.terms) >= 0
        back = mul_monomial(g, beta, precision=s.precision)
        assert back.eq_mod_precision(s)


# -- derivations ---------------------------------------------------------------


def test_partial_y_oracle():
    s = ps("y1^3 + x1*y1", 1, 1)
    d = partial_y(s, 1)
    assert d.eq_mod_precision(ps("3*y1^2 + x1", 1, 1, prec=7))
    assert d.precision == s.precision - 1


@settings(max_examples=40, deadline=None)
@given(series_st(SIG11), series_st(SIG11))
def test_partial_y_leibniz(a, b):
    lhs = partial_y(a * b, 1)
    rhs = partial_y(a, 1) * b + a * partial_y(b, 1)
    assert lhs.eq_mod_precision(rhs)


# -- units and roots -------------------------------------------------------------


def test_invert_unit_oracle():
    u = ps("1 - x1", 1, 0, prec=4)
    inv = invert_unit(u)
    assert inv.eq_mod_precision(ps("1 + x1 + x1^2 + x1^3", 1, 0, prec=4))


def test_invert_unit_property():
    rng = random.Random(11)
    one = constant(SIG11, 1, 8)
    for _ in range(20):
        u = random_unit(rng, SIG11)
        assert (u * invert_unit(u)).eq_mod_precision(one)


def test_invert_nonunit_rejected():
    with pytest.raises(SeriesError):
        invert_unit(x_var(SIG11, 1, 8))


def test_binomial_series_half():
    # (Y + 1)^(1/2) truncated at degree 3
    s = binomial_series(1, Fraction(1, 2), 3)
    expected = ps("1 + 1/2*y1 - 1/8*y1^2", 0, 1, prec=3)
    assert s == expected


def test_binomial_series_four():
    # (Y + 4)^(1/2) = 2 + Y/4 - Y^2/64 + ...
    s = binomial_series(4, Fraction(1, 2), 3)
    assert s.eq_mod_precision(ps("2 + 1/4*y1 - 1/64*y1^2", 0, 1, prec=3))


def test_binomial_series_squares_back():
    s = binomial_series(1, Fraction(1, 2), 6)
    one_plus_y = ps("1 + y1", 0, 1, prec=6)
    assert (s * s).eq_mod_precision(one_plus_y)


def test_nth_root_rational():
    assert nth_root_rational(Fraction(4), 2) == 2
    assert nth_root_rational(Fraction(8, 27), 3) == Fraction(2, 3)
    assert nth_root_rational(Fraction(2), 2) is None


# -- variable plumbing -----------------------------------------------------------


def test_insert_and_zero_roundtrip():
    s = ps("x1^2 + x1*y1", 1, 1)
    up = insert_x(s, 2)
    assert up.sig == Signature(2, 1)
    assert set_x_to_zero(up, 2).eq_mod_precision(s)
    up2 = insert_y(s, 2)
    assert up2.sig == Signature(1, 2)
    assert set_y_to_zero(up2, 2).eq_mod_precision(s)


def test_set_y_to_zero_kills_terms():
    s = ps("x1 + x1*y1^2", 1, 1)
    assert set_y_to_zero(s, 1).eq_mod_precision(ps("x1", 1, 0))


def test_substitute_y_oracle():
    # y1 -> x1 + y1 in y1^2
    s = ps("y1^2", 1, 1)
    rep = ps("x1 + y1", 1, 1)
    out = substitute_y(s, {1: rep})
    assert out.eq_mod_precision(ps("x1^2 + 2*x1*y1 + y1^2", 1, 1))


# -- evaluation -----------------------------------------------------------------


def test_evaluate_value_and_tail():
    s = ps("x1 + y1^2", 1, 1, prec=4)
    ev = evaluate(s, [Fraction(1, 4), Fraction(1, 2)])
    assert ev.value == Fraction(1, 4) + Fraction(1, 4)
    # tail bound is (sum |coeffs| style) * r^precision with r = max coord
    assert ev.tail_bound >= 0


def test_evaluate_is_multiplicative():
    rng = random.Random(3)
    for _ in range(20):
        a = random_series(rng, SIG11, nterms=3)
        b = random_series(rng, SIG11, nterms=3)
        p = [Fraction(1, 10), Fraction(-1, 10)]
        # y-coordinates may be negative; x must stay nonnegative
        p[0] = abs(p[0])
        va = evaluate(a, p)
        vb = evaluate(b, p)
        vab = evaluate(a * b, p)
        bound = (
            float(vab.tail_bound)
            + float(va.tail_bound) * abs(float(vb.value))
            + float(vb.tail_bound) * abs(float(va.value))
            + float(va.tail_bound) * float(vb.tail_bound)
        )
        assert abs(float(vab.value) - float(va.value) * float(vb.value)) <= bound + 1e-12


def test_render_parse_roundtrip():
    rng = random.Random(13)
    for _ in range(25):
        s = random_series(rng, SIG21, nterms=4)
        if s.is_zero():
            continue
        text = render(s)
        back = ps(text, 2, 1)
        assert back.eq_mod_precision(s)

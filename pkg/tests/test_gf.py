from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from surfcount.gf import (
    ZERO,
    GFError,
    NoFit,
    QuasiPolynomial,
    ShortGF,
    cyclotomic,
    denominator_ladder,
    fit_short_gf,
    gf_add,
    gf_expand,
    gf_normalize,
    gf_sum,
    is_integral,
    is_short,
    one_minus_xb,
    parse_gf,
    poly_divmod,
    poly_mul,
    quasipolynomial_from_values,
    smooth_asymptotics,
    to_quasipolynomial,
)

S = ShortGF.make([0, 6, 2, -2, 3, -1], {1: 3, 2: 1})


def test_cyclotomic_factorisation():
    for b in range(1, 13):
        prod = [Fraction(1)]
        for d in range(1, b + 1):
            if b % d == 0:
                prod = poly_mul(prod, cyclotomic(d))
        # x^b - 1 is the product of the cyclotomic polynomials of the divisors
        assert prod == [-c for c in one_minus_xb(b)]


def test_expand_simple_series():
    assert gf_expand(ShortGF.make([1], {1: 1}), 5) == [1] * 5
    assert gf_expand(ShortGF.make([1], {1: 2}), 5) == [1, 2, 3, 4, 5]
    assert gf_expand(ShortGF.make([1], {2: 1}), 6) == [1, 0, 1, 0, 1, 0]
    assert gf_expand(ZERO, 3) == [0, 0, 0]


def test_normalize_cancels():
    # (1 - x^2)/(1 - x)^2 = (1 + x)/(1 - x)
    g = gf_normalize(ShortGF.make(one_minus_xb(2), {1: 2}))
    assert g.denominator == ((1, 1),) and g.numerator == (1, 1)
    # (1 + x)/(1 - x^2) = 1/(1 - x) via the cyclotomic part
    g = gf_normalize(ShortGF.make([1, 1], {2: 1}))
    assert g.denominator == ((1, 1),) and g.numerator == (1,)


def test_add_and_equality():
    a = ShortGF.make([0, 1], {1: 1})
    b = ShortGF.make([0, 1], {2: 1})
    s = a + b
    assert s == ShortGF.make([0, 2, 1], {2: 1})
    assert gf_expand(s, 8) == [x + y for x, y in zip(gf_expand(a, 8), gf_expand(b, 8))]
    assert gf_sum([a, b, ZERO]) == s
    assert ShortGF.make([1, 1], {2: 1}) == ShortGF.make([1], {1: 1})
    assert hash(ShortGF.make([1, 1], {2: 1})) == hash(ShortGF.make([1], {1: 1}))


coeff_lists = st.lists(st.integers(-5, 5), min_size=1, max_size=5)
dens = st.dictionaries(st.integers(1, 4), st.integers(1, 2), max_size=3)
small_dens = dens.filter(lambda d: sum(b * m for b, m in d.items()) <= 8)


@settings(max_examples=60, deadline=None)
@given(coeff_lists, dens, coeff_lists, dens)
def test_add_matches_expansion(p1, d1, p2, d2):
    a, b = ShortGF.make(p1, d1), ShortGF.make(p2, d2)
    n = 30
    assert gf_expand(gf_add(a, b), n) == [x + y for x, y in zip(gf_expand(a, n), gf_expand(b, n))]
    assert gf_expand(gf_normalize(a), n) == gf_expand(a, n)


@settings(max_examples=40, deadline=None)
@given(coeff_lists, small_dens)
def test_fit_recovers_random_short_series(p, d):
    g = ShortGF.make(p, d)
    series = gf_expand(g, 60)
    # numerators here may exceed the denominator degree by up to 4
    fit = fit_short_gf(series, denominator_ladder(max_extra_degree=8, max_b=4), slack=4)
    assert fit == g


def test_text_roundtrip():
    assert parse_gf(S.to_text()) == S
    assert parse_gf("P = [1/2, 0, 3]; Q = []") == ShortGF.make([Fraction(1, 2), 0, 3])
    with pytest.raises(GFError):
        parse_gf("P = [1; Q = []")
    with pytest.raises(GFError):
        ShortGF.make([1], {0: 1})


def test_pretty_printing():
    assert S.pretty() == "(-x^5 + 3x^4 - 2x^3 + 2x^2 + 6x)/((1 - x)^3(1 - x^2))"


def test_conway_quasipolynomial():
    q = to_quasipolynomial(S)
    assert q.period == 2 and q.degree == 3
    even, odd = q.polys
    assert even == (1, Fraction(7, 3), Fraction(9, 4), Fraction(2, 3))
    assert odd == (Fraction(3, 4), Fraction(7, 3), Fraction(9, 4), Fraction(2, 3))
    assert q.transient == ((0, 0),)


def test_fit_short_gf_failure_and_zero():
    with pytest.raises(NoFit):
        fit_short_gf([2 ** n for n in range(40)])
    assert fit_short_gf([0] * 30) == ZERO


def test_fit_guard_rejects_early_agreement():
    # agrees with n + 1 for 25 terms, then departs
    series = [n + 1 for n in range(25)] + [0] * 5
    with pytest.raises(NoFit):
        fit_short_gf(series, denominator_ladder(max_extra_degree=2), guard=5)


def test_ladder_ordering():
    ladder = denominator_ladder(base=[1], max_extra_degree=2, max_b=2)
    degrees = [sum(b * m for b, m in d.items()) for d in ladder]
    assert degrees == sorted(degrees) and ladder[0] == {1: 1}


def test_is_short_and_integral():
    assert is_short([1], [1, -1])
    assert not is_short([1], [1, -2])
    assert is_integral(S)
    assert not is_integral(ShortGF.make([Fraction(1, 2)], {1: 1}))


def test_quasipolynomial_from_values():
    vals = [n // 2 + 1 if n % 2 == 0 else 0 for n in range(20)]
    q = quasipolynomial_from_values(vals, 2, 1)
    assert q(10) == 6 and q(11) == 0
    with pytest.raises(GFError):
        quasipolynomial_from_values([n * n for n in range(10)], 1, 1)


def test_smooth_asymptotics_polynomial_and_zero():
    q = to_quasipolynomial(ShortGF.make([1], {1: 2}))  # n + 1
    prof = smooth_asymptotics(q)
    assert (prof.exponent, prof.constant) == (2, Fraction(1, 2))
    assert smooth_asymptotics(QuasiPolynomial(1, ((),))).is_zero


def test_smooth_asymptotics_rejects_negative():
    with pytest.raises(GFError):
        smooth_asymptotics(QuasiPolynomial(1, ((Fraction(-1),),)))


def test_poly_divmod():
    q, r = poly_divmod([1, 0, -1], [1, -1])
    assert q == [1, 1] and not r

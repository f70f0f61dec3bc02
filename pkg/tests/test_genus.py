import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from surfcount.counting import UnsupportedFace
from surfcount.genus import (
    GenusError,
    analysis_report,
    areg_limit,
    dirichlet_convolve,
    divisor_sum,
    genus_counts,
    loglog_csv,
    loglog_svg,
    mobius,
    mobius_invert,
    mobius_table,
    read_indexed_csv,
    read_series_csv,
    regularity_test,
    slope_estimate,
    smooth,
    totient,
    write_series_csv,
    zeta_limit_value,
)
from surfcount.gf import QuasiPolynomial

PHI_VALUES = [2, 1, 2, 2, 4, 2, 6, 4, 6, 4, 10, 4, 12, 6, 8, 8, 16, 6, 18, 8, 12,
              10, 22, 8, 20, 12, 18, 12, 28, 8]


def test_smooth():
    assert smooth([1, 1, 1]) == [1, 2, 3]
    assert smooth([2, 1, 2, 2, 4]) == [2, 3, 5, 7, 11]
    assert smooth([]) == []


def test_mobius_and_totient_values():
    assert [mobius(n) for n in range(1, 7)] == [1, -1, -1, 0, -1, 1]
    assert mobius_table(30) == [mobius(n) for n in range(1, 31)]
    assert [totient(n) for n in range(1, 11)] == [1, 1, 2, 2, 4, 2, 6, 4, 6, 4]
    with pytest.raises(GenusError):
        mobius(0)


def test_divisor_sum_of_totient_is_identity():
    assert divisor_sum([totient(n) for n in range(1, 101)]) == list(range(1, 101))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-20, 20), min_size=1, max_size=60))
def test_mobius_roundtrip(values):
    assert mobius_invert(divisor_sum(values)) == values
    assert divisor_sum(mobius_invert(values)) == values


def test_mobius_invert_examples():
    assert mobius_invert(lambda n: n + 1, 6)[5] == 2
    assert mobius_invert([1] * 10) == [1] + [0] * 9
    assert mobius_invert(lambda n: n + 1, 30) == PHI_VALUES
    q = QuasiPolynomial(1, ((Fraction(1), Fraction(1)),))
    assert mobius_invert(q, 30) == PHI_VALUES
    with pytest.raises(GenusError):
        mobius_invert(lambda n: n)


def test_dirichlet_convolution_is_commutative():
    rng = random.Random(2)
    f = [rng.randint(-5, 5) for _ in range(40)]
    g = [rng.randint(-5, 5) for _ in range(40)]
    assert dirichlet_convolve(f, g) == dirichlet_convolve(g, f)


def test_genus_counts_gcd_edge(lw_gcd):
    gs = genus_counts(lw_gcd, 13)
    assert gs.values == PHI_VALUES[:12]
    assert gs.per_face["F"] == gs.per_face["G"] == [1] + [0] * 11
    assert gs.genus_table()[0] == (2, 2)


def test_genus_counts_disjoint_edge(lw_disjoint):
    assert genus_counts(lw_disjoint, 11).values == [2] + [0] * 9


def test_genus_counts_single_ray():
    from conftest import DATA
    from surfcount.counting import load_lw

    assert genus_counts(load_lw(DATA / "single_genus2.lw"), 8).values == [1] + [0] * 6


def test_genus_counts_bounded_by_all_surfaces(lw_gcd):
    from surfcount.counting import assemble_bm

    a = genus_counts(lw_gcd, 9).values
    b = assemble_bm(lw_gcd, 8).series
    assert all(0 <= x <= y for x, y in zip(a, b))


def test_genus_counts_refuse_w(lw_k13):
    with pytest.raises(UnsupportedFace):
        genus_counts(lw_k13, 4)


def test_regularity_of_phi_pattern():
    rep = regularity_test(PHI_VALUES)
    assert rep.regular
    assert [rep.p(n) for n in range(1, 31)] == [n + 1 for n in range(1, 31)]
    assert rep.p.transient == ()
    assert rep.lambert.expand(31)[1:] == [n + 1 for n in range(1, 31)]
    assert rep.summary() == "regular; p(n)=n+1; Lambert short"


def test_regularity_zero_and_irregular():
    assert regularity_test([0] * 30).regular
    # divisor counts are not eventually quasi-polynomial
    rep = regularity_test([sum(1 for d in range(1, n + 1) if n % d == 0) for n in range(1, 41)])
    assert not rep.regular
    with pytest.raises(GenusError):
        regularity_test([6, 4, 10, 14, 26, 26, 52])


def test_zeta_limits():
    import math

    assert zeta_limit_value(Fraction(1), 1) == pytest.approx(3 / math.pi ** 2, rel=1e-14)
    assert zeta_limit_value(Fraction(1), 2) == pytest.approx(1 / 3 / 1.2020569031595942, rel=1e-14)
    with pytest.raises(GenusError):
        zeta_limit_value(Fraction(1), 0)
    with pytest.raises(GenusError):
        areg_limit(QuasiPolynomial(1, ((Fraction(3),),)))
    with pytest.raises(GenusError):
        areg_limit(QuasiPolynomial(2, ((0, 1), (0, 2))))


def test_areg_limit_small_n():
    z = areg_limit(QuasiPolynomial(1, ((Fraction(1), Fraction(1)),)), 2000)
    assert z.relative_error < 0.02


@pytest.mark.parametrize("s", [1, 2, 3, 4, 5, 6])
def test_slope_exact_powers(s):
    est = slope_estimate([7 * n ** s for n in range(1, 201)])
    assert est.exponent == s
    assert est.constant == pytest.approx(7)


def test_slope_lower_order_and_phi():
    assert slope_estimate([5 * n ** 3 + n * n + 4 for n in range(1, 101)]).exponent == 3
    abar = smooth(mobius_invert(lambda n: n + 1, 200))
    est = slope_estimate(abar)
    assert est.exponent == 2
    with pytest.raises(GenusError):
        slope_estimate([0] * 20)


def test_series_csv_roundtrip():
    text = write_series_csv([3, Fraction(1, 2), 0])
    assert text.startswith("n,a\n")
    assert read_series_csv(text) == [3, Fraction(1, 2), 0]
    assert read_indexed_csv("n,a\n0,1\n1,2\n") == (0, [1, 2])
    with pytest.raises(GenusError):
        read_series_csv("n,a\n1,2\n3,4\n")
    with pytest.raises(GenusError):
        read_series_csv("n,a\n1,x\n")


def test_plot_outputs():
    abar = smooth(PHI_VALUES)
    lines = loglog_csv(abar).splitlines()
    assert lines[0] == "log_n,log_abar" and len(lines) == 31
    svg = loglog_svg(abar)
    assert svg.startswith("<svg") and svg.count("<circle") == 30


def test_analysis_report_on_phi():
    rep = analysis_report(PHI_VALUES)
    assert rep["regular"] == "yes"
    assert rep["summary"] == "regular; p(n)=n+1; Lambert short; s=2"

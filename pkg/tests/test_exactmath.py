from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from surfcount.exactmath import (
    DimensionError,
    clear_denominators,
    determinant,
    hermite_rows,
    in_lattice,
    integer_kernel_basis,
    lattice_complement,
    lattice_coordinates,
    linprog_exact,
    lp_feasible,
    matmul,
    matvec,
    primitive,
    rank,
    rational_kernel,
    smith_normal_form,
    solve_rational,
    unimodular_inverse,
)

small = st.integers(-4, 4)


def matrices(max_rows=4, max_cols=5):
    return st.integers(1, max_rows).flatmap(
        lambda m: st.integers(1, max_cols).flatmap(
            lambda n: st.lists(st.lists(small, min_size=n, max_size=n), min_size=m, max_size=m)))


@settings(max_examples=80, deadline=None)
@given(matrices())
def test_smith_normal_form_properties(a):
    u, s, v = smith_normal_form(a)
    assert matmul(matmul(u, a), v) == s
    assert abs(determinant(u)) == 1 and abs(determinant(v)) == 1
    diag = [s[i][i] for i in range(min(len(s), len(s[0])))]
    assert all(s[i][j] == 0 for i in range(len(s)) for j in range(len(s[0])) if i != j)
    assert all(d >= 0 for d in diag)
    nz = [d for d in diag if d]
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    assert len(nz) == rank(a)


def test_smith_normal_form_known():
    _, s, _ = smith_normal_form([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
    assert [s[i][i] for i in range(3)] == [2, 6, 12]


def test_smith_normal_form_rejects_empty():
    with pytest.raises(DimensionError):
        smith_normal_form([])


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_integer_kernel_is_saturated(a):
    n = len(a[0])
    basis = integer_kernel_basis(a, n)
    assert len(basis) == n - rank(a)
    for b in basis:
        assert matvec(a, b) == [0] * len(a)
    # any integer kernel vector is an integer combination of the basis
    for q in rational_kernel(a, n):
        v = clear_denominators(q)
        assert in_lattice(v, basis)


def test_kernel_saturation_example():
    # 2x = 2y: the lattice kernel is spanned by (1, 1), not (2, 2)
    assert integer_kernel_basis([[2, -2]]) == [(1, 1)]


def test_primitive_and_clear_denominators():
    assert primitive((4, -6, 0)) == (2, -3, 0)
    assert primitive((0, 0)) == (0, 0)
    assert clear_denominators([Fraction(1, 2), Fraction(1, 3)]) == (3, 2)


def test_solve_and_unimodular_inverse():
    assert solve_rational([[1, 1], [1, -1]], [3, 1]) == [2, 1]
    assert solve_rational([[1, 1], [1, 1]], [1, 2]) is None
    a = [[2, 1], [1, 1]]
    assert matmul(a, unimodular_inverse(a)) == [[1, 0], [0, 1]]


def test_hermite_rows_reduces():
    assert hermite_rows([(2, 0), (1, 1)]) == hermite_rows([(1, 1), (0, 2)])


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(small, min_size=4, max_size=4), min_size=1, max_size=2),
       st.lists(small, min_size=4, max_size=4))
def test_lattice_complement_splits(ws, x):
    ws = [w for w in ws if any(w)]
    if not ws or rank(ws) < len(ws):
        return
    dec = lattice_complement(ws, dim=4)
    assert len(dec.w_basis) + len(dec.l_basis) == 4
    # x = T(x) + w with w in the saturated W lattice
    diff = [a - b for a, b in zip(x, dec.project_vector(x))]
    assert rank(list(dec.w_basis) + [diff]) == len(dec.w_basis)
    assert in_lattice(diff, dec.w_basis) or not any(diff)
    # projection kills W
    for w in dec.w_basis:
        assert not any(dec.project(w))


def test_lattice_complement_saturates():
    dec = lattice_complement([(2, 2, 0)], dim=3)
    assert dec.saturated
    assert dec.w_basis in (((1, 1, 0),), ((-1, -1, 0),))


def test_lattice_coordinates():
    assert lattice_coordinates((3, 5), [(1, 1), (0, 1)]) == (3, 2)
    with pytest.raises(ValueError):
        lattice_coordinates((1, 0), [(2, 0), (0, 1)])


def test_linprog_small_problem():
    # max x + y, x + 2y <= 4, 3x + y <= 6
    r = linprog_exact([1, 1], a_ub=[[1, 2], [3, 1]], b_ub=[4, 6])
    assert r.status == "optimal" and r.value == Fraction(14, 5)
    assert r.x == [Fraction(8, 5), Fraction(6, 5)]


def test_linprog_infeasible_and_unbounded():
    assert linprog_exact([1], a_eq=[[1]], b_eq=[-1]).status == "infeasible"
    assert linprog_exact([1, 0], a_eq=[[1, -1]], b_eq=[0]).status == "unbounded"
    r = linprog_exact([-1], a_eq=[[1]], b_eq=[-2], free=[0])
    assert r.status == "optimal" and r.x == [-2]


def test_linprog_degenerate_cycling_example():
    # Beale's example cycles under the textbook rule; Bland's rule terminates
    c = [Fraction(3, 4), -150, Fraction(1, 50), -6]
    a = [[Fraction(1, 4), -60, Fraction(-1, 25), 9], [Fraction(1, 2), -90, Fraction(-1, 50), 3], [0, 0, 1, 0]]
    r = linprog_exact(c, a_ub=a, b_ub=[0, 0, 1])
    assert r.status == "optimal" and r.value == Fraction(1, 20)


def test_lp_feasible_strictness():
    # x - y = 0 with x, y >= 0: feasible, but x > 0 forces y > 0
    assert lp_feasible([[1, -1]], [0, 1], [[0]]) is not None
    # x + y = 0 with x, y >= 0 and x > 0 is infeasible
    assert lp_feasible([[1, 1]], [0, 1], [[0]]) is None
    with pytest.raises(DimensionError):
        lp_feasible([[1, 1]], [5])

"""Exact integer and rational linear algebra.

Everything here works on plain Python ``int`` and :class:`fractions.Fraction`
values; matrices are lists of rows.  No floating point is used anywhere in
this module.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

Matrix = list[list[int]]


class DimensionError(ValueError):
    pass


# ---------------------------------------------------------------------------
# small helpers


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> list[list]:
    if not a:
        return []
    inner = len(b)
    if any(len(row) != inner for row in a):
        raise DimensionError("matrix shapes do not agree")
    cols = len(b[0]) if b else 0
    return [[sum(row[k] * b[k][j] for k in range(inner)) for j in range(cols)] for row in a]


def matvec(a: Sequence[Sequence], v: Sequence) -> list:
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def transpose(a: Sequence[Sequence]) -> list[list]:
    return [list(col) for col in zip(*a)] if a else []


def vec_gcd(v: Iterable[int]) -> int:
    g = 0
    for x in v:
        g = gcd(g, int(x))
    return g


def primitive(v: Sequence[int]) -> tuple[int, ...]:
    """Divide an integer vector by the gcd of its entries."""
    g = vec_gcd(v)
    if g == 0:
        return tuple(int(x) for x in v)
    return tuple(int(x) // g for x in v)


def clear_denominators(v: Sequence[Fraction]) -> tuple[int, ...]:
    """Smallest positive integer multiple of a rational vector, made primitive."""
    den = 1
    for x in v:
        den = den * Fraction(x).denominator // gcd(den, Fraction(x).denominator)
    return primitive([int(Fraction(x) * den) for x in v])


def determinant(a: Sequence[Sequence]) -> Fraction:
    m = [[Fraction(x) for x in row] for row in a]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            if f:
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return det


def rref(a: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q; returns (rows, pivot columns)."""
    m = [[Fraction(x) for x in row] for row in a]
    rows = len(m)
    cols = len(m[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        m[r] = [x / p for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m[:r], pivots


def rank(a: Sequence[Sequence]) -> int:
    if not a:
        return 0
    return len(rref(a)[1])


def solve_rational(a: Sequence[Sequence], b: Sequence) -> list[Fraction] | None:
    """One solution of ``a x = b`` over Q, or None."""
    cols = len(a[0]) if a else 0
    aug = [list(row) + [rhs] for row, rhs in zip(a, b)]
    red, piv = rref(aug)
    if cols in piv:
        return None
    x = [Fraction(0)] * cols
    for row, c in zip(red, piv):
        x[c] = row[-1]
    return x


def rational_kernel(a: Sequence[Sequence], ncols: int | None = None) -> list[list[Fraction]]:
    if ncols is None:
        ncols = len(a[0]) if a else 0
    if not a:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    red, piv = rref(a)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, c in zip(red, piv):
            v[c] = -row[f]
        basis.append(v)
    return basis


# ---------------------------------------------------------------------------
# Smith normal form


def smith_normal_form(a: Sequence[Sequence[int]]) -> tuple[Matrix, Matrix, Matrix]:
    """Return ``(U, S, V)`` with ``U a V = S``, U and V unimodular.

    S is diagonal with nonnegative entries d_1 | d_2 | ...  Pivots are
    chosen by smallest absolute value.
    """
    if not a or not a[0]:
        raise DimensionError("smith_normal_form needs a nonempty matrix")
    m, n = len(a), len(a[0])
    if any(len(row) != n for row in a):
        raise DimensionError("ragged matrix")
    s = [[int(x) for x in row] for row in a]
    u = identity(m)
    v = identity(n)

    def swap_rows(i, j):
        s[i], s[j] = s[j], s[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in s:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, f):  # row dst += f * row src
        if f:
            s[dst] = [x + f * y for x, y in zip(s[dst], s[src])]
            u[dst] = [x + f * y for x, y in zip(u[dst], u[src])]

    def add_col(src, dst, f):
        if f:
            for row in s:
                row[dst] += f * row[src]
            for row in v:
                row[dst] += f * row[src]

    t = 0
    while t < min(m, n):
        nonzero = [(abs(s[i][j]), i, j) for i in range(t, m) for j in range(t, n) if s[i][j]]
        if not nonzero:
            break
        _, pi, pj = min(nonzero)
        swap_rows(t, pi)
        swap_cols(t, pj)
        while True:
            done = True
            for i in range(t + 1, m):
                if s[i][t]:
                    add_row(t, i, -(s[i][t] // s[t][t]))
                    if s[i][t]:
                        done = False
            for j in range(t + 1, n):
                if s[t][j]:
                    add_col(t, j, -(s[t][j] // s[t][t]))
                    if s[t][j]:
                        done = False
            if done:
                # divisibility: every later entry must be a multiple of the pivot
                bad = next(
                    ((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if s[i][j] % s[t][t]),
                    None,
                )
                if bad is None:
                    break
                add_row(bad[0], t, 1)
                continue
            # a remainder appeared; move the smallest entry of row/col t to the pivot
            cand = [(abs(s[i][t]), i, t) for i in range(t, m) if s[i][t]]
            cand += [(abs(s[t][j]), t, j) for j in range(t, n) if s[t][j]]
            _, pi, pj = min(cand)
            swap_rows(t, pi)
            swap_cols(t, pj)
        if s[t][t] < 0:
            s[t] = [-x for x in s[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return u, s, v


def unimodular_inverse(a: Sequence[Sequence[int]]) -> Matrix:
    n = len(a)
    aug = [list(row) + [int(i == j) for j in range(n)] for i, row in enumerate(a)]
    red, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise ValueError("matrix is singular")
    inv = [row[n:] for row in red]
    if any(x.denominator != 1 for row in inv for x in row):
        raise ValueError("matrix is not unimodular")
    return [[int(x) for x in row] for row in inv]


# ---------------------------------------------------------------------------
# integer kernels and lattice bases


def hermite_rows(vectors: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """Row-style Hermite normal form of the lattice spanned by ``vectors``.

    Returns a basis (zero rows dropped); pivots positive, entries above
    each pivot reduced into [0, pivot).
    """
    rows = [list(map(int, v)) for v in vectors if any(v)]
    if not rows:
        return []
    n = len(rows[0])
    out: list[list[int]] = []
    col = 0
    while rows and col < n:
        nz = [r for r in rows if r[col]]
        zero = [r for r in rows if not r[col]]
        if not nz:
            col += 1
            continue
        while len(nz) > 1:
            nz.sort(key=lambda r: abs(r[col]))
            p = nz[0]
            rest = []
            for r in nz[1:]:
                q = r[col] // p[col]
                r = [x - q * y for x, y in zip(r, p)]
                if r[col]:
                    rest.append(r)
                elif any(r):
                    zero.append(r)
            nz = [p] + rest
        p = nz[0]
        if p[col] < 0:
            p = [-x for x in p]
        for k, r in enumerate(out):
            q = r[col] // p[col]
            if q:
                out[k] = [x - q * y for x, y in zip(r, p)]
        out.append(p)
        rows = [r for r in zero if any(r)]
        col += 1
    return [tuple(r) for r in out]


def integer_kernel_basis(a: Sequence[Sequence[int]], ncols: int | None = None) -> list[tuple[int, ...]]:
    """Lattice basis of ``ker(a) ∩ Z^n`` (not merely a Q-basis)."""
    if ncols is None:
        ncols = len(a[0]) if a else 0
    rows = [list(r) for r in a if any(r)]
    if not rows:
        return [tuple(int(i == j) for j in range(ncols)) for i in range(ncols)]
    if any(len(r) != ncols for r in rows):
        raise DimensionError("ragged matrix")
    _, s, v = smith_normal_form(rows)
    r = sum(1 for i in range(min(len(s), ncols)) if s[i][i])
    basis = [tuple(v[i][j] for i in range(ncols)) for j in range(r, ncols)]
    return hermite_rows(basis)


def in_lattice(v: Sequence[int], basis: Sequence[Sequence[int]]) -> bool:
    """Whether ``v`` is an integer combination of ``basis``."""
    if not basis:
        return not any(v)
    coeffs = solve_rational(transpose(basis), v)
    return coeffs is not None and all(c.denominator == 1 for c in coeffs)


def lattice_coordinates(v: Sequence[int], basis: Sequence[Sequence[int]]) -> tuple[int, ...]:
    coeffs = solve_rational(transpose(basis), v)
    if coeffs is None or any(c.denominator != 1 for c in coeffs):
        raise ValueError("vector is not in the lattice")
    return tuple(int(c) for c in coeffs)


@dataclass(frozen=True)
class LatticeDecomposition:
    """``V(Z) = W(Z) ⊕ L(Z)`` with the projection ``T`` onto L along W.

    ``projection`` is the integer matrix taking ambient-lattice coordinates
    to L-basis coordinates.  ``saturated`` records whether the supplied W
    generators had to be saturated.
    """

    ambient_basis: tuple[tuple[int, ...], ...]
    w_basis: tuple[tuple[int, ...], ...]
    l_basis: tuple[tuple[int, ...], ...]
    projection: tuple[tuple[int, ...], ...]
    saturated: bool = False
    _w_rank: int = field(default=0, repr=False)

    def coordinates(self, v: Sequence[int]) -> tuple[int, ...]:
        if self._standard:
            return tuple(int(x) for x in v)
        return lattice_coordinates(v, self.ambient_basis)

    @cached_property
    def _standard(self) -> bool:
        amb = self.ambient_basis
        return len(amb) == len(amb[0]) and all(
            x == (i == j) for i, b in enumerate(amb) for j, x in enumerate(b))

    def project(self, v: Sequence[int]) -> tuple[int, ...]:
        """T(v) in L-basis coordinates."""
        c = self.coordinates(v)
        return tuple(sum(row[j] * c[j] for j in range(len(c))) for row in self.projection)

    def project_vector(self, v: Sequence[int]) -> tuple[int, ...]:
        """T(v) as an ambient vector."""
        coords = self.project(v)
        n = len(v)
        return tuple(sum(k * b[i] for k, b in zip(coords, self.l_basis)) for i in range(n))


def lattice_complement(
    w_basis: Sequence[Sequence[int]],
    ambient_basis: Sequence[Sequence[int]] | None = None,
    dim: int | None = None,
) -> LatticeDecomposition:
    """Split the ambient lattice as W(Z) ⊕ L(Z).

    ``ambient_basis`` defaults to the standard basis of Z^dim.  Non-primitive
    W generators are saturated automatically and ``saturated`` is set.
    """
    if ambient_basis is None:
        if dim is None:
            if not w_basis:
                raise DimensionError("need dim or a nonempty basis")
            dim = len(w_basis[0])
        ambient_basis = [tuple(int(i == j) for j in range(dim)) for i in range(dim)]
    amb = [tuple(int(x) for x in b) for b in ambient_basis]
    m = len(amb)
    w_coords = [list(lattice_coordinates(w, amb)) for w in w_basis if any(w)]
    k = len(w_coords)
    if k == 0:
        ident = tuple(tuple(int(i == j) for j in range(m)) for i in range(m))
        return LatticeDecomposition(tuple(amb), (), tuple(amb), ident, False, 0)
    if rank(w_coords) < k:
        raise ValueError("W generators are linearly dependent")
    _, s, v = smith_normal_form(w_coords)
    saturated = any(s[i][i] != 1 for i in range(k))
    vinv = unimodular_inverse(v)

    def ambient(row):
        n = len(amb[0])
        return tuple(sum(row[j] * amb[j][i] for j in range(m)) for i in range(n))

    w_new = tuple(ambient(vinv[i]) for i in range(k))
    l_new = tuple(ambient(vinv[i]) for i in range(k, m))
    proj = tuple(tuple(v[r][c] for r in range(m)) for c in range(k, m))
    return LatticeDecomposition(tuple(amb), w_new, l_new, proj, saturated, k)


# ---------------------------------------------------------------------------
# linear programming


@dataclass
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: list[Fraction] | None = None
    value: Fraction | None = None


def _pivot(tab: list[list[Fraction]], basis: list[int], r: int, c: int) -> None:
    p = tab[r][c]
    row = tab[r]
    if p != 1:
        row = [x / p for x in row]
        tab[r] = row
    nz = [j for j, x in enumerate(row) if x]
    for i, other in enumerate(tab):
        if i != r:
            f = other[c]
            if f:
                for j in nz:
                    other[j] -= f * row[j]
    basis[r] = c


def _simplex(tab, basis, allowed: int) -> str:
    """Maximise the objective in the last tableau row (stored negated).

    Bland's rule: entering column is the lowest index with a negative reduced
    cost, leaving row breaks ratio ties by lowest basic index.
    """
    obj = tab[-1]
    while True:
        enter = next((j for j in range(allowed) if obj[j] < 0), None)
        if enter is None:
            return "optimal"
        best = None
        for i in range(len(tab) - 1):
            a = tab[i][enter]
            if a > 0:
                ratio = tab[i][-1] / a
                key = (ratio, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            return "unbounded"
        _pivot(tab, basis, best[1], enter)
        obj = tab[-1]


def linprog_exact(
    c: Sequence,
    a_eq: Sequence[Sequence] = (),
    b_eq: Sequence = (),
    a_ub: Sequence[Sequence] = (),
    b_ub: Sequence = (),
    free: Iterable[int] = (),
) -> LPResult:
    """Maximise ``c·x`` subject to ``a_eq x = b_eq``, ``a_ub x <= b_ub``.

    Variables are nonnegative unless listed in ``free``.  Exact two-phase
    simplex with Bland's rule.
    """
    n = len(c)
    for row in list(a_eq) + list(a_ub):
        if len(row) != n:
            raise DimensionError("constraint width does not match objective")
    if len(a_eq) != len(b_eq) or len(a_ub) != len(b_ub):
        raise DimensionError("right-hand side length mismatch")
    free = sorted(set(free))
    # column layout: x (n), x_minus for free vars, slacks for ub rows
    nf = len(free)
    nub = len(a_ub)
    ncol = n + nf + nub
    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    for row, b in zip(a_eq, b_eq):
        full = [Fraction(x) for x in row] + [-Fraction(row[j]) for j in free] + [Fraction(0)] * nub
        rows.append(full)
        rhs.append(Fraction(b))
    for k, (row, b) in enumerate(zip(a_ub, b_ub)):
        full = [Fraction(x) for x in row] + [-Fraction(row[j]) for j in free] + [Fraction(0)] * nub
        full[n + nf + k] = Fraction(1)
        rows.append(full)
        rhs.append(Fraction(b))
    m = len(rows)
    for i in range(m):
        if rhs[i] < 0:
            rows[i] = [-x for x in rows[i]]
            rhs[i] = -rhs[i]
    # phase 1: one artificial per row
    tab = [rows[i] + [Fraction(int(i == k)) for k in range(m)] + [rhs[i]] for i in range(m)]
    basis = [ncol + i for i in range(m)]
    obj = [Fraction(0)] * (ncol + m + 1)
    for i in range(m):
        for j in range(ncol):
            obj[j] -= tab[i][j]
        obj[-1] -= tab[i][-1]
    tab.append(obj)
    _simplex(tab, basis, ncol)
    if tab[-1][-1] != 0:
        return LPResult("infeasible")
    # drive artificials out of the basis, dropping redundant rows
    i = 0
    while i < len(tab) - 1:
        if basis[i] >= ncol:
            col = next((j for j in range(ncol) if tab[i][j] != 0), None)
            if col is None:
                del tab[i]
                del basis[i]
                continue
            _pivot(tab, basis, i, col)
        i += 1
    tab = [row[:ncol] + [row[-1]] for row in tab[:-1]]
    cost = [Fraction(x) for x in c] + [-Fraction(c[j]) for j in free] + [Fraction(0)] * nub
    obj = [-x for x in cost] + [Fraction(0)]
    for i, bcol in enumerate(basis):
        f = obj[bcol]
        if f:
            obj = [x - f * y for x, y in zip(obj, tab[i])]
    tab.append(obj)
    status = _simplex(tab, basis, ncol)
    if status == "unbounded":
        return LPResult("unbounded")
    z = [Fraction(0)] * ncol
    for i, bcol in enumerate(basis):
        z[bcol] = tab[i][-1]
    x = z[:n]
    for k, j in enumerate(free):
        x[j] -= z[n + k]
    return LPResult("optimal", x, tab[-1][-1])


def lp_feasible(
    equalities: Sequence[Sequence],
    nonneg_indices: Iterable[int],
    strict_positive_sums: Sequence[Iterable[int]] = (),
    rhs: Sequence | None = None,
    nvars: int | None = None,
) -> list[Fraction] | None:
    """Find x with ``A x = rhs`` (0 by default), ``x_i >= 0`` on the given
    indices and ``sum_{i in S} x_i > 0`` for every strict set S.

    Strictness is exact: maximise the smallest strict sum (capped at 1) and
    require the optimum to be positive.  Returns a rational witness or None.
    """
    if nvars is None:
        if not equalities:
            raise DimensionError("nvars required when there are no equalities")
        nvars = len(equalities[0])
    if any(len(row) != nvars for row in equalities):
        raise DimensionError("equality rows have the wrong width")
    if rhs is None:
        rhs = [0] * len(equalities)
    if len(rhs) != len(equalities):
        raise DimensionError("right-hand side length mismatch")
    nonneg = set(nonneg_indices)
    if any(i < 0 or i >= nvars for i in nonneg):
        raise DimensionError("nonnegativity index out of range")
    strict = [sorted(set(s)) for s in strict_positive_sums]
    if any(i < 0 or i >= nvars for s in strict for i in s):
        raise DimensionError("strict index out of range")
    free = [i for i in range(nvars) if i not in nonneg]
    if not strict:
        res = linprog_exact([0] * nvars, equalities, rhs, free=free)
        return res.x if res.status == "optimal" else None
    # variable t = nvars; maximise t with t <= 1 and t <= sum_S x
    width = nvars + 1
    a_eq = [list(row) + [0] for row in equalities]
    a_ub = []
    b_ub = []
    for s in strict:
        row = [0] * width
        for i in s:
            row[i] -= 1
        row[nvars] = 1
        a_ub.append(row)
        b_ub.append(0)
    cap = [0] * width
    cap[nvars] = 1
    a_ub.append(cap)
    b_ub.append(1)
    obj = [0] * width
    obj[nvars] = 1
    res = linprog_exact(obj, a_eq, list(rhs), a_ub, b_ub, free=free + [nvars])
    if res.status != "optimal" or res.value is None or res.value <= 0:
        return None
    return res.x[:nvars]

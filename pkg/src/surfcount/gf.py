"""Short generating functions P(x) / prod (1 - x^b)^m and quasi-polynomials."""
from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .exactmath import solve_rational

Poly = list  # ascending coefficients, Fractions


class GFError(ValueError):
    pass


class NoFit(GFError):
    pass


# ---------------------------------------------------------------------------
# dense polynomial helpers


def poly_trim(p: Sequence) -> list[Fraction]:
    out = [Fraction(c) for c in p]
    while out and out[-1] == 0:
        out.pop()
    return out


def poly_add(a: Sequence, b: Sequence) -> list[Fraction]:
    n = max(len(a), len(b))
    return poly_trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def poly_mul(a: Sequence, b: Sequence) -> list[Fraction]:
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return poly_trim(out)


def poly_divmod(a: Sequence, b: Sequence) -> tuple[list[Fraction], list[Fraction]]:
    b = poly_trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = poly_trim(a)
    if len(r) < len(b):
        return [], r
    q = [Fraction(0)] * (len(r) - len(b) + 1)
    lead = b[-1]
    while len(r) >= len(b) and r:
        k = len(r) - len(b)
        c = r[-1] / lead
        q[k] = c
        for i, y in enumerate(b):
            r[i + k] -= c * y
        r = poly_trim(r)
    return poly_trim(q), r


def poly_gcd(a: Sequence, b: Sequence) -> list[Fraction]:
    a, b = poly_trim(a), poly_trim(b)
    while b:
        a, b = b, poly_divmod(a, b)[1]
    if not a:
        return []
    return [c / a[-1] for c in a]


def one_minus_xb(b: int) -> list[Fraction]:
    p = [Fraction(0)] * (b + 1)
    p[0] = Fraction(1)
    p[b] = Fraction(-1)
    return p


def cyclotomic(m: int) -> list[Fraction]:
    p = [Fraction(-1)] + [Fraction(0)] * (m - 1) + [Fraction(1)]
    for d in range(1, m):
        if m % d == 0:
            p = poly_divmod(p, cyclotomic(d))[0]
    return p


def format_poly(p: Sequence, var: str = "x") -> str:
    terms = []
    for k in range(len(p) - 1, -1, -1):
        c = Fraction(p[k])
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if k == 0:
            body = str(a)
        else:
            mono = var if k == 1 else f"{var}^{k}"
            body = mono if a == 1 else f"{a}{mono}" if a.denominator == 1 else f"({a}){mono}"
        terms.append((sign, body))
    if not terms:
        return "0"
    s = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    for sign, body in terms[1:]:
        s += f" {sign} {body}"
    return s


# ---------------------------------------------------------------------------
# ShortGF


@dataclass(frozen=True)
class ShortGF:
    numerator: tuple[Fraction, ...]
    denominator: tuple[tuple[int, int], ...] = ()  # sorted (b, multiplicity)

    @staticmethod
    def make(numerator: Iterable, denominator: Iterable[tuple[int, int]] | dict = ()) -> "ShortGF":
        den = Counter()
        items = denominator.items() if isinstance(denominator, dict) else denominator
        for b, m in items:
            if b < 1 or m < 0:
                raise GFError("denominator factors need b >= 1")
            if m:
                den[b] += m
        return ShortGF(tuple(poly_trim(numerator)), tuple(sorted(den.items())))

    @property
    def den_poly(self) -> list[Fraction]:
        q = [Fraction(1)]
        for b, m in self.denominator:
            for _ in range(m):
                q = poly_mul(q, one_minus_xb(b))
        return q

    @property
    def period(self) -> int:
        return math.lcm(*[b for b, _ in self.denominator]) if self.denominator else 1

    def expand(self, n: int) -> list[Fraction]:
        return gf_expand(self, n)

    def __add__(self, other: "ShortGF") -> "ShortGF":
        return gf_add(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ShortGF):
            return NotImplemented
        return poly_mul(self.numerator, other.den_poly) == poly_mul(other.numerator, self.den_poly)

    def __hash__(self) -> int:
        n = gf_normalize(self)
        return hash((n.numerator, n.denominator))

    def to_text(self) -> str:
        nums = ",".join(str(c) for c in self.numerator)
        dens = ",".join(f"({b},{m})" for b, m in self.denominator)
        return f"P = [{nums}]; Q = [{dens}]"

    def pretty(self) -> str:
        num = format_poly(self.numerator)
        if not self.denominator:
            return num
        parts = []
        for b, m in self.denominator:
            f = "(1 - x)" if b == 1 else f"(1 - x^{b})"
            parts.append(f if m == 1 else f"{f}^{m}")
        return f"({num})/({''.join(parts)})"


ZERO = ShortGF((), ())

_TEXT_RE = re.compile(r"^\s*P\s*=\s*\[([^\]]*)\]\s*;\s*Q\s*=\s*\[(.*)\]\s*$")


def parse_gf(text: str) -> ShortGF:
    m = _TEXT_RE.match(text)
    if not m:
        raise GFError(f"cannot parse generating function {text!r}")
    nums = [Fraction(x.strip()) for x in m.group(1).split(",") if x.strip()]
    dens = [(int(b), int(k)) for b, k in re.findall(r"\(\s*(\d+)\s*,\s*(\d+)\s*\)", m.group(2))]
    return ShortGF.make(nums, dens)


def gf_expand(g: ShortGF, n: int) -> list[Fraction]:
    """First ``n`` coefficients; dividing by (1 - x^b) is a strided prefix sum."""
    c = [Fraction(0)] * n
    for i, a in enumerate(g.numerator[:n]):
        c[i] = Fraction(a)
    for b, m in g.denominator:
        for _ in range(m):
            for i in range(b, n):
                c[i] += c[i - b]
    return c


def gf_normalize(g: ShortGF) -> ShortGF:
    """Cancel denominator factors (whole or cyclotomic parts) dividing the numerator."""
    num = list(g.numerator)
    den = Counter(dict(g.denominator))
    if not num:
        return ZERO
    changed = True
    while changed:
        changed = False
        for b in sorted(den, reverse=True):
            if not den[b]:
                continue
            q, r = poly_divmod(num, one_minus_xb(b))
            if not r:
                num = q
                den[b] -= 1
                changed = True
                break
            # replace (1 - x^b) by (1 - x^d) when the quotient divides the numerator
            for d in sorted(x for x in range(1, b) if b % x == 0):
                part = poly_divmod(one_minus_xb(b), one_minus_xb(d))[0]
                q, r = poly_divmod(num, part)
                if not r:
                    num = q
                    den[b] -= 1
                    den[d] += 1
                    changed = True
                    break
            if changed:
                break
    den = Counter({b: m for b, m in den.items() if m})
    return ShortGF.make(num, den)


def gf_add(a: ShortGF, b: ShortGF) -> ShortGF:
    da, db = Counter(dict(a.denominator)), Counter(dict(b.denominator))
    common = da | db
    pa = list(a.numerator)
    for k, m in (common - da).items():
        for _ in range(m):
            pa = poly_mul(pa, one_minus_xb(k))
    pb = list(b.numerator)
    for k, m in (common - db).items():
        for _ in range(m):
            pb = poly_mul(pb, one_minus_xb(k))
    return gf_normalize(ShortGF.make(poly_add(pa, pb), common))


def gf_sum(items: Iterable[ShortGF]) -> ShortGF:
    total = ZERO
    for g in items:
        total = gf_add(total, g)
    return total


def is_integral(g: ShortGF) -> bool:
    return all(Fraction(c).denominator == 1 for c in g.numerator)


def is_short(numerator: Sequence, denominator: Sequence) -> bool:
    """Whether the reduced denominator is a product of cyclotomic polynomials."""
    den = poly_trim(denominator)
    if not den:
        raise GFError("zero denominator")
    num = poly_trim(numerator)
    if num:
        den = poly_divmod(den, poly_gcd(num, den))[0]
    deg = len(den) - 1
    if deg == 0:
        return True
    for m in range(1, 2 * deg * deg + 3):
        if _totient(m) > deg:
            continue
        phi = cyclotomic(m)
        while len(den) > 1:
            q, r = poly_divmod(den, phi)
            if r:
                break
            den = q
    return len(den) == 1


def _totient(n: int) -> int:
    out, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            out -= out // p
        p += 1
    if m > 1:
        out -= out // m
    return out


# ---------------------------------------------------------------------------
# fitting


def denominator_ladder(base: Sequence[int] = (), max_extra_degree: int = 6,
                       max_b: int = 6) -> list[dict[int, int]]:
    """Candidate denominators: ``base`` factors times every multiset of
    (1 - x^b), b <= max_b, of total extra degree <= max_extra_degree,
    ordered by total degree."""
    out = []

    def rec(start: int, left: int, acc: list[int]):
        out.append(list(acc))
        for b in range(start, max_b + 1):
            if b <= left:
                acc.append(b)
                rec(b, left - b, acc)
                acc.pop()

    rec(1, max_extra_degree, [])
    ladder = []
    seen = set()
    for extra in out:
        c = Counter(base)
        c.update(extra)
        key = tuple(sorted(c.items()))
        if key in seen:
            continue
        seen.add(key)
        ladder.append(dict(c))
    ladder.sort(key=lambda d: (sum(b * m for b, m in d.items()), sorted(d.items())))
    return ladder


def fit_short_gf(series: Sequence, ladder: Sequence[dict[int, int]] | None = None,
                 guard: int = 10, slack: int = 1) -> ShortGF:
    """Fit sum s(n) x^n (s given from n = 0) with P/Q, Q from the ladder.

    A candidate is accepted only if P = s * Q truncated has degree
    <= deg Q + slack and the remaining coefficients, which include the last
    ``guard`` supplied terms, all vanish.
    """
    s = [Fraction(x) for x in series]
    n = len(s)
    if ladder is None:
        ladder = denominator_ladder()
    if not any(s):
        return ZERO
    for den in ladder:
        g = ShortGF.make([1], den)
        q = g.den_poly
        degq = len(q) - 1
        degp = degq + slack
        if n < degp + 1 + guard or n < 2 * degq + guard:
            continue
        def coeff(i):
            return sum((s[i - j] * q[j] for j in range(len(q)) if 0 <= i - j), Fraction(0))

        if any(coeff(i) for i in range(degp + 1, n)):
            continue
        p = [coeff(i) for i in range(degp + 1)]
        fit = gf_normalize(ShortGF.make(p, den))
        if gf_expand(fit, n) != s:
            continue
        return fit
    raise NoFit("no short generating function within the denominator budget")


# ---------------------------------------------------------------------------
# quasi-polynomials


def _interpolate(xs: Sequence[int], ys: Sequence[Fraction]) -> list[Fraction]:
    k = len(xs)
    a = [[Fraction(x) ** j for j in range(k)] for x in xs]
    sol = solve_rational(a, list(ys))
    if sol is None:
        raise GFError("interpolation failed")
    return poly_trim(sol)


def _eval(p: Sequence, n) -> Fraction:
    v = Fraction(0)
    for c in reversed(p):
        v = v * n + c
    return v


@dataclass(frozen=True)
class QuasiPolynomial:
    period: int
    polys: tuple[tuple[Fraction, ...], ...]
    transient: tuple[tuple[int, Fraction], ...] = ()

    def __call__(self, n: int) -> Fraction:
        for m, v in self.transient:
            if m == n:
                return v
        return _eval(self.polys[n % self.period], n)

    @property
    def degree(self) -> int:
        return max((len(p) - 1 for p in self.polys), default=-1)

    def is_zero(self) -> bool:
        return not any(self.polys)

    def describe(self) -> str:
        parts = []
        for k, p in enumerate(self.polys):
            body = format_poly(p, "n")
            parts.append(body if self.period == 1 else f"n = {k} mod {self.period}: {body}")
        s = "; ".join(parts)
        if self.transient:
            s += " (except " + ", ".join(f"n={m}: {v}" for m, v in self.transient) + ")"
        return s


def to_quasipolynomial(g: ShortGF) -> QuasiPolynomial:
    g = gf_normalize(g)
    L = g.period
    maxdeg = max(sum(m for _, m in g.denominator) - 1, 0)
    degq = len(g.den_poly) - 1
    degp = len(g.numerator) - 1
    start = max(0, degp - degq + 1)
    depth = start + 3 * L * (maxdeg + 1) + max(degp, 0) + L
    vals = gf_expand(g, depth)
    polys = []
    for k in range(L):
        ns = [n for n in range(start, depth) if n % L == k]
        if len(ns) < maxdeg + 2:
            raise GFError("expansion too short for interpolation")
        p = _interpolate(ns[:maxdeg + 1], [vals[n] for n in ns[:maxdeg + 1]])
        for n in ns[maxdeg + 1:]:
            if _eval(p, n) != vals[n]:
                raise GFError("coefficients are not quasi-polynomial; input is not short")
        polys.append(tuple(p))
    transient = tuple((n, vals[n]) for n in range(start) if _eval(polys[n % L], n) != vals[n])
    return QuasiPolynomial(L, tuple(polys), transient)


def quasipolynomial_from_values(values: Sequence, period: int, degree: int, start: int = 0) -> QuasiPolynomial:
    """Interpolate a quasi-polynomial from values indexed from ``start``; all values must fit."""
    polys = []
    for k in range(period):
        ns = [n for n in range(start, start + len(values)) if n % period == k]
        p = _interpolate(ns[:degree + 1], [Fraction(values[n - start]) for n in ns[:degree + 1]])
        for n in ns[degree + 1:]:
            if _eval(p, n) != values[n - start]:
                raise GFError("values are not quasi-polynomial with this period and degree")
        polys.append(tuple(p))
    return QuasiPolynomial(period, tuple(polys))


@dataclass(frozen=True)
class AsymptoticProfile:
    exponent: int | None
    constant: Fraction

    @property
    def is_zero(self) -> bool:
        return self.exponent is None


def smooth_asymptotics(q: QuasiPolynomial, window: int | None = None) -> AsymptoticProfile:
    """Profile c n^d of the partial sums: d = e + 1, c = sum of leading coefficients / (d L)."""
    if q.is_zero():
        return AsymptoticProfile(None, Fraction(0))
    start = 1 + max((m for m, _ in q.transient), default=0)
    window = window or 2 * q.period * (q.degree + 2)
    for n in range(start, start + window):
        if q(n) < 0:
            raise GFError(f"quasi-polynomial is negative at n = {n}")
    e = q.degree
    lead = [Fraction(p[e]) if len(p) - 1 == e else Fraction(0) for p in q.polys]
    if any(c < 0 for c in lead) or sum(lead) <= 0:
        raise GFError("leading coefficients contradict nonnegativity")
    d = e + 1
    return AsymptoticProfile(d, sum(lead) / (d * q.period))

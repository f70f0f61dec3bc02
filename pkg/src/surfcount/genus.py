"""Connected-surface counts by genus and the arithmetic used to study them.

Counts are indexed by n = g - 1, so a surface of genus g has chi = -2n.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import mpmath
import numpy as np

from .counting import (
    DEFAULT_POINT_CAP,
    LWComplex,
    UnsupportedFace,
    connected_slice_count,
    dependence,
    parallel_map,
)
from .gf import NoFit, QuasiPolynomial, ShortGF, denominator_ladder, fit_short_gf, to_quasipolynomial
from .normal import DEFAULT_DISK_CAP


class GenusError(ValueError):
    pass


# ---------------------------------------------------------------------------
# genus counts


@dataclass
class GenusSeries:
    """a~(n) = a(n + 1) for n = 1..horizon, with per-face contributions."""

    values: list[int]
    per_face: dict[str, list[int]] = field(default_factory=dict)

    @property
    def horizon(self) -> int:
        return len(self.values)

    def genus_table(self) -> list[tuple[int, int]]:
        return [(n + 1, a) for n, a in enumerate(self.values, start=1)]


def _genus_job(args):
    lw, name, n, cap, disk_cap = args
    face = lw.face(name)
    return connected_slice_count(lw, face, n, cap, disk_cap, dependence(lw, face))


def genus_counts(lw: LWComplex, max_genus: int, cap: int = DEFAULT_POINT_CAP,
                 disk_cap: int = DEFAULT_DISK_CAP) -> GenusSeries:
    """Connected surfaces of genus 2..max_genus carried by the counted faces.

    With W = 0 the dep set of a face is its relative interior, so every
    interior slice point is its own isotopy class; connectivity is checked on
    the actual surface.
    """
    if max_genus < 2:
        raise GenusError("max_genus must be at least 2")
    faces = lw.counted_faces()
    bad = [f.name for f in faces if f.wbasis]
    if bad:
        raise UnsupportedFace("genus counts need W = 0; faces with W != 0: " + ", ".join(bad))
    horizon = max_genus - 1
    jobs = [(lw, f.name, n, cap, disk_cap) for f in faces for n in range(1, horizon + 1)]
    counts = parallel_map(_genus_job, jobs)
    per_face = {f.name: counts[i * horizon:(i + 1) * horizon] for i, f in enumerate(faces)}
    values = [sum(s[k] for s in per_face.values()) for k in range(horizon)]
    return GenusSeries(values, per_face)


# ---------------------------------------------------------------------------
# arithmetic functions (index 0 holds n = 1)


def smooth(values: Sequence) -> list:
    """Prefix sums a-bar(n) = sum_{k <= n} a~(k)."""
    out, acc = [], 0
    for v in values:
        acc += v
        out.append(acc)
    return out


def _factor(n: int) -> dict[int, int]:
    if n < 1:
        raise GenusError("arithmetic functions are defined for n >= 1")
    f: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            f[p] = f.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        f[n] = f.get(n, 0) + 1
    return f


def mobius(n: int) -> int:
    f = _factor(n)
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


def totient(n: int) -> int:
    out = n
    for p in _factor(n):
        out = out // p * (p - 1)
    return out


def mobius_table(n: int) -> list[int]:
    """mu(1..n) by a linear sieve."""
    mu = [0, 1] + [0] * (n - 1)
    primes: list[int] = []
    composite = bytearray(n + 1)
    for i in range(2, n + 1):
        if not composite[i]:
            primes.append(i)
            mu[i] = -1
        for p in primes:
            if i * p > n:
                break
            composite[i * p] = 1
            if i % p == 0:
                mu[i * p] = 0
                break
            mu[i * p] = -mu[i]
    return mu[1:]


def dirichlet_convolve(f: Sequence, g: Sequence) -> list:
    """(f * g)(n) = sum_{d | n} f(n/d) g(d) on the common horizon."""
    n = min(len(f), len(g))
    out = [0] * n
    for d in range(1, n + 1):
        gd = g[d - 1]
        if not gd:
            continue
        for m in range(d, n + 1, d):
            out[m - 1] += f[m // d - 1] * gd
    return out


def divisor_sum(values: Sequence) -> list:
    """1 * a, the coefficients of the Lambert series of a."""
    return dirichlet_convolve([1] * len(values), values)


def _as_values(p, horizon: int | None) -> list:
    if isinstance(p, (list, tuple)):
        return list(p) if horizon is None else list(p[:horizon])
    if horizon is None:
        raise GenusError("a horizon is needed to invert a function given by a formula")
    return [p(n) for n in range(1, horizon + 1)]


def _tidy(values: Iterable) -> list:
    out = list(values)
    if all(isinstance(v, Fraction) and v.denominator == 1 for v in out):
        return [int(v) for v in out]
    return out


def mobius_invert(p: QuasiPolynomial | Callable[[int], object] | Sequence, horizon: int | None = None) -> list:
    """(mu * p)(n) for n = 1..horizon."""
    vals = _as_values(p, horizon)
    return _tidy(dirichlet_convolve(mobius_table(len(vals)), vals))


# ---------------------------------------------------------------------------
# regularity


@dataclass
class RegularityReport:
    regular: bool
    divisor_sums: list
    p: QuasiPolynomial | None = None
    lambert: ShortGF | None = None

    def summary(self) -> str:
        if not self.regular:
            return "no short generating function within budget"
        return f"regular; p(n)={self.p.describe().replace(' ', '')}; Lambert short"


def _positive_only(q: QuasiPolynomial) -> QuasiPolynomial:
    return QuasiPolynomial(q.period, q.polys, tuple((m, v) for m, v in q.transient if m >= 1))


def regularity_test(values: Sequence, guard: int = 10, ladder: Sequence[dict[int, int]] | None = None,
                    min_horizon: int = 30) -> RegularityReport:
    """Fit 1 * a~ with a short generating function, holding out ``guard`` terms.

    Failure only means nothing in the denominator budget fits the supplied
    terms.
    """
    if len(values) < min_horizon:
        raise GenusError(f"regularity needs at least {min_horizon} terms, got {len(values)}")
    sums = divisor_sum(values)
    if ladder is None:
        ladder = denominator_ladder(max_extra_degree=8, max_b=8)
    try:
        gf = fit_short_gf([0] + list(sums), ladder, guard=guard)
    except NoFit:
        return RegularityReport(False, sums)
    q = _positive_only(to_quasipolynomial(gf))
    if any(q(n) != s for n, s in enumerate(sums, start=1)):
        raise GenusError("fitted quasi-polynomial does not reproduce the divisor sums")
    return RegularityReport(True, sums, q, gf)


# ---------------------------------------------------------------------------
# asymptotics


@dataclass(frozen=True)
class ZetaLimit:
    degree: int
    leading: Fraction
    limit: float
    n: int
    empirical: float

    @property
    def relative_error(self) -> float:
        return abs(self.empirical - self.limit) / self.limit


def zeta_limit_value(leading: Fraction, degree: int, digits: int = 30) -> float:
    """c_r / (r + 1) / zeta(r + 1)."""
    if degree < 1:
        raise GenusError("degree 0 puts zeta at its pole; the limit is not covered")
    with mpmath.workdps(digits):
        v = mpmath.mpf(leading.numerator) / leading.denominator / (degree + 1) / mpmath.zeta(degree + 1)
        return float(v)


def smoothed_inverse_at(p: Callable[[int], object], n: int) -> Fraction:
    """a-bar(n) for a~ = mu * p, as sum_m mu(m) P(n // m) with P the prefix sums of p."""
    prefix = [0] * (n + 1)
    acc = 0
    for k in range(1, n + 1):
        acc += p(k)
        prefix[k] = acc
    mu = mobius_table(n)
    return sum(m * prefix[n // i] for i, m in enumerate(mu, start=1) if m)


def areg_limit(p: QuasiPolynomial, n: int = 10**5) -> ZetaLimit:
    """Analytic limit of a-bar(n)/n^(r+1) for a~ = mu * p against the empirical ratio at n."""
    r = p.degree
    if r < 1:
        raise GenusError("degree 0 puts zeta at its pole; the limit is not covered")
    lead = {Fraction(q[r]) if len(q) - 1 == r else Fraction(0) for q in p.polys}
    if len(lead) != 1:
        raise GenusError("leading coefficient varies between residue classes")
    c = lead.pop()
    limit = zeta_limit_value(c, r)
    empirical = float(Fraction(smoothed_inverse_at(p, n)) / n ** (r + 1))
    return ZetaLimit(r, c, limit, n, empirical)


@dataclass(frozen=True)
class SlopeEstimate:
    exponent: int
    slope: float
    constant: float
    residual: float
    ratios: tuple[float, ...]


def slope_estimate(abar: Sequence, burn_in: int | None = None) -> SlopeEstimate:
    """Least-squares slope of log a-bar against log n over the tail, rounded.

    ``ratios`` lists a-bar(n)/n^s over the tail for stability inspection.
    """
    start = len(abar) // 2 if burn_in is None else burn_in
    tail = [(n, float(a)) for n, a in enumerate(abar, start=1) if n > start and a > 0]
    if len(tail) < 2:
        raise GenusError("tail has fewer than two positive terms")
    x = np.log([n for n, _ in tail])
    y = np.log([a for _, a in tail])
    slope, intercept = np.polyfit(x, y, 1)
    residual = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    s = int(round(slope))
    ratios = tuple(a / n ** s for n, a in tail)
    constant = float(np.exp(np.mean(y - s * x)))
    return SlopeEstimate(s, float(slope), constant, residual, ratios)


# ---------------------------------------------------------------------------
# reports and file formats


def analysis_report(values: Sequence, guard: int = 10, burn_in: int | None = None) -> dict[str, str]:
    """Key-value summary of a genus series a~(1..N)."""
    rep: dict[str, str] = {"terms": str(len(values))}
    reg = regularity_test(values, guard)
    rep["regular"] = "yes" if reg.regular else "no fit within budget"
    if reg.regular:
        rep["p"] = reg.p.describe()
        rep["lambert"] = reg.lambert.to_text()
    abar = smooth(values)
    try:
        est = slope_estimate(abar, burn_in)
        rep["s"] = str(est.exponent)
        rep["slope"] = f"{est.slope:.6f}"
        rep["constant"] = f"{est.constant:.6f}"
    except GenusError as e:
        rep["s"] = f"undetermined ({e})"
    if reg.regular and reg.p.degree >= 1:
        try:
            z = areg_limit(reg.p, len(values))
            rep["zeta_limit"] = f"{z.limit:.12f}"
            rep["empirical_ratio"] = f"{z.empirical:.12f}"
        except GenusError as e:
            rep["zeta_limit"] = f"not covered ({e})"
    summary = ["regular" if reg.regular else "no short generating function within budget"]
    if reg.regular:
        summary.append(f"p(n)={reg.p.describe().replace(' ', '')}")
        summary.append("Lambert short")
    if rep["s"].isdigit():
        summary.append(f"s={rep['s']}")
    rep["summary"] = "; ".join(summary)
    return rep


def format_report(rep: dict[str, str]) -> str:
    return "".join(f"{k}: {v}\n" for k, v in rep.items())


def _num(text: str):
    v = Fraction(text.strip())
    return int(v) if v.denominator == 1 else v


def write_series_csv(values: Sequence, name: str = "a", start: int = 1) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", name])
    for n, v in enumerate(values, start=start):
        w.writerow([n, v])
    return buf.getvalue()


def read_indexed_csv(text: str) -> tuple[int, list]:
    """(first n, values) of an ``n,<name>`` CSV with consecutive n."""
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    if rows and rows[0][0].strip() == "n":
        rows = rows[1:]
    if not rows:
        raise GenusError("empty series file")
    out = []
    first = None
    for i, r in enumerate(rows, start=1):
        if len(r) < 2:
            raise GenusError(f"row {i}: expected n,value")
        try:
            n = int(r[0])
            v = _num(r[1])
        except ValueError as e:
            raise GenusError(f"row {i}: {e}") from None
        if first is None:
            first = n
        elif n != first + i - 1:
            raise GenusError(f"row {i}: expected n = {first + i - 1}, got {n}")
        out.append(v)
    return first, out


def read_series_csv(text: str) -> list:
    """Values of an ``n,<name>`` CSV; n must run consecutively from 1."""
    first, values = read_indexed_csv(text)
    if first != 1:
        raise GenusError(f"series must start at n = 1, got {first}")
    return values


def loglog_points(abar: Sequence) -> list[tuple[float, float]]:
    return [(math.log(n), math.log(a)) for n, a in enumerate(abar, start=1) if a > 0]


def loglog_csv(abar: Sequence) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["log_n", "log_abar"])
    for x, y in loglog_points(abar):
        w.writerow([f"{x:.9f}", f"{y:.9f}"])
    return buf.getvalue()


def loglog_svg(abar: Sequence, width: int = 480, height: int = 360, margin: int = 40) -> str:
    """Scatter of log a-bar against log n with reference lines of slope 1..4."""
    pts = loglog_points(abar)
    if not pts:
        raise GenusError("nothing to plot")
    xmax = max(max(x for x, _ in pts), 1e-9)
    ymin = min(0.0, min(y for _, y in pts))
    ymax = max(max(y for _, y in pts), ymin + 1e-9)

    def sx(x):
        return margin + (width - 2 * margin) * x / xmax

    def sy(y):
        return height - margin - (height - 2 * margin) * (y - ymin) / (ymax - ymin)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           f'<rect width="{width}" height="{height}" fill="white"/>',
           f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" y2="{height - margin}" stroke="black"/>',
           f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}" stroke="black"/>']
    for s in range(1, 5):
        xe = min(xmax, (ymax - ymin) / s)
        out.append(f'<line x1="{sx(0):.2f}" y1="{sy(ymin):.2f}" x2="{sx(xe):.2f}" y2="{sy(ymin + s * xe):.2f}" '
                   f'stroke="#bbbbbb" stroke-dasharray="4 3"/>')
    for x, y in pts:
        out.append(f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="2" fill="#1f4e9a"/>')
    out.append(f'<text x="{width / 2:.0f}" y="{height - 8}" text-anchor="middle" font-size="12">log n</text>')
    out.append(f'<text x="12" y="{height / 2:.0f}" font-size="12" transform="rotate(-90 12 {height / 2:.0f})" '
               f'text-anchor="middle">log a-bar(n)</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


__all__ = [
    "GenusError", "GenusSeries", "RegularityReport", "SlopeEstimate", "ZetaLimit", "analysis_report",
    "areg_limit", "dirichlet_convolve", "divisor_sum", "format_report", "genus_counts", "loglog_csv",
    "loglog_points", "loglog_svg", "mobius", "mobius_invert", "mobius_table", "read_indexed_csv",
    "read_series_csv",
    "regularity_test", "slope_estimate", "smooth", "smoothed_inverse_at", "totient", "write_series_csv",
    "zeta_limit_value",
]

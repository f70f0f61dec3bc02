"""Counting isotopy classes of surfaces carried by an lw-complex.

Lattice points on the slices chi = -2n of each complete essential face are
filtered to dep(C), identified modulo W_C and summed over faces.  When
W_C = 0 the generating function is also computed exactly from a half-open
triangulation of the cone.
"""
from __future__ import annotations

import functools
import itertools
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .cones import (
    DependenceData,
    carries_vertex_link,
    classify_dependent_faces,
    enumerate_vertex_rays,
    AdmissibleFace,
)
from .exactmath import (
    integer_kernel_basis,
    lattice_complement,
    lattice_coordinates,
    linprog_exact,
    rank,
    rational_kernel,
    clear_denominators,
    primitive,
    smith_normal_form,
    solve_rational,
    unimodular_inverse,
)
from .gf import NoFit, ShortGF, ZERO, denominator_ladder, fit_short_gf, gf_add, gf_expand, gf_normalize, gf_sum
from .normal import (
    STD,
    NonorientableSurface,
    NormalVector,
    SurfaceComplex,
    euler_coefficients,
    format_vector,
    is_admissible,
    is_connected,
    matching_equations,
    parse_vector,
    vertex_link_vectors,
    weight_coefficients,
)
from .triangulation import Triangulation, homology_f2_check, load_triangulation

DEFAULT_POINT_CAP = 10**6


class CountingError(ValueError):
    pass


class LWError(CountingError):
    pass


class PointCapExceeded(CountingError):
    pass


class UnsupportedFace(CountingError):
    pass


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("SURFCOUNT_THREADS", "1")))
    except ValueError:
        return 1


def parallel_map(fn: Callable, items: Sequence) -> list:
    """Ordered map; uses worker processes when SURFCOUNT_THREADS > 1."""
    n = thread_count()
    if n <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# lattice points


@functools.lru_cache(maxsize=256)
def _support_kernel(rows: tuple, s: tuple) -> list[tuple[int, ...]]:
    sub = [[r[j] for j in s] for r in rows]
    sub = [r for r in sub if any(r)]
    if sub:
        return integer_kernel_basis(sub, len(s))
    return [tuple(1 if i == j else 0 for i in range(len(s))) for j in range(len(s))]


def lattice_points(rows: Sequence[Sequence[int]], ncols: int, support: Iterable[int],
                   costs: Sequence, low, high, cap: int = DEFAULT_POINT_CAP) -> list[tuple[int, ...]]:
    """Integer x >= 0 with A x = 0, supp(x) inside ``support`` and
    low <= costs . x <= high.

    The integer solutions are parametrised by a lattice basis of the kernel,
    x = K z, and z is searched depth first; the range of each z_i is the
    exact LP range over the slice polytope with the earlier z fixed.
    """
    s = sorted(set(support))
    if not s:
        return []
    basis = _support_kernel(tuple(tuple(r) for r in rows), tuple(s))
    r = len(basis)
    if r == 0:
        return []
    xz = [[basis[i][j] for i in range(r)] for j in range(len(s))]
    cz = [sum((Fraction(costs[s[j]]) * basis[i][j] for j in range(len(s))), Fraction(0)) for i in range(r)]
    # x_j >= 0 rows, deduplicated up to positive scaling
    sign_rows = sorted({primitive([-a for a in row]) for row in xz if any(row)})
    g = [list(row) for row in sign_rows] + [cz, [-a for a in cz]]
    h = [Fraction(0)] * len(sign_rows) + [Fraction(high), -Fraction(low)]
    out: list[tuple[int, ...]] = []
    z: list[int] = []

    def bounds(i: int):
        a = [row[i:] for row in g]
        b = [h[k] - sum(g[k][t] * z[t] for t in range(i)) for k in range(len(g))]
        if r - i == 1:
            lo, hi = None, None
            for row, bb in zip(a, b):
                c = row[0]
                if c > 0:
                    v = bb / c
                    hi = v if hi is None or v < hi else hi
                elif c < 0:
                    v = bb / c
                    lo = v if lo is None or v > lo else lo
                elif bb < 0:
                    return None
            if lo is None or hi is None:
                raise CountingError("slice is unbounded; the Euler characteristic is not proper on this face")
            if lo > hi:
                return None
            return math.ceil(lo), math.floor(hi)
        free = range(r - i)
        obj = [1] + [0] * (r - i - 1)
        res = linprog_exact(obj, (), (), a, b, free)
        if res.status == "infeasible":
            return None
        if res.status == "unbounded":
            raise CountingError("slice is unbounded; the Euler characteristic is not proper on this face")
        hi = res.value
        res = linprog_exact([-x for x in obj], (), (), a, b, free)
        return math.ceil(-res.value), math.floor(hi)

    def rec(i: int):
        bd = bounds(i)
        if bd is None:
            return
        for v in range(bd[0], bd[1] + 1):
            z.append(v)
            if i + 1 == r:
                x = [0] * ncols
                for j in range(len(s)):
                    x[s[j]] = sum(xz[j][t] * z[t] for t in range(r))
                out.append(tuple(x))
                if len(out) > cap:
                    raise PointCapExceeded(f"more than {cap} lattice points in one slice")
            else:
                rec(i + 1)
            z.pop()

    rec(0)
    return sorted(out)


# ---------------------------------------------------------------------------
# LW complexes


@dataclass
class LWFace:
    name: str
    vertices: tuple[str, ...]
    complete: bool | None = None
    essential: bool | None = None
    lw: bool | None = None
    wbasis: list[tuple[int, ...]] = field(default_factory=list)
    saturated: bool = False


@dataclass
class LWComplex:
    triangulation: Triangulation
    triangulation_source: str
    system: str
    surfaces: dict[str, tuple[int, ...]]
    faces: list[LWFace]
    provenance: str = ""
    notes: list[str] = field(default_factory=list)

    def face(self, name: str) -> LWFace:
        for f in self.faces:
            if f.name == name:
                return f
        raise KeyError(name)

    def rays(self, face: LWFace) -> list[tuple[int, ...]]:
        return [self.surfaces[v] for v in face.vertices]

    def support(self, face: LWFace) -> frozenset[int]:
        return frozenset(j for r in self.rays(face) for j, x in enumerate(r) if x)

    def counted_faces(self) -> list[LWFace]:
        return [f for f in self.faces if f.complete and f.essential]

    @functools.cached_property
    def chi(self) -> list[Fraction]:
        return euler_coefficients(self.triangulation)

    @functools.cached_property
    def rows(self):
        return matching_equations(self.triangulation, STD).rows


def _parse_bool(text: str, where: str) -> bool | None:
    t = text.strip().lower()
    if t in ("true", "yes", "1"):
        return True
    if t in ("false", "no", "0"):
        return False
    if t in ("unknown", "?"):
        return None
    raise LWError(f"{where}: cannot read boolean {text!r}")


def parse_lw(text: str, base_dir: str | Path | None = None) -> LWComplex:
    lines = []
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append((no, line))
    if not lines or lines[0][1] != "lw-complex v1":
        raise LWError("line 1: expected header 'lw-complex v1'")
    tri_source = None
    system = None
    surfaces: dict[str, tuple[int, ...]] = {}
    faces: list[LWFace] = []
    wlines: list[tuple[int, str, str]] = []
    provenance = []
    for no, line in lines[1:]:
        key, _, rest = line.partition(" ")
        rest = rest.strip()
        if key == "triangulation":
            tri_source = rest
        elif key == "coords":
            if rest != STD:
                raise LWError(f"line {no}: only std7t coordinates are supported")
            system = rest
        elif key == "surface":
            name, _, vec = rest.partition(" ")
            sysname, entries = parse_vector(vec)
            if sysname != STD:
                raise LWError(f"line {no}: surface {name} is not in std7t coordinates")
            if name in surfaces:
                raise LWError(f"line {no}: surface {name} defined twice")
            surfaces[name] = entries
        elif key == "face":
            parts = rest.split()
            if not parts:
                raise LWError(f"line {no}: face needs a name")
            name = parts[0]
            attrs = {}
            for p in parts[1:]:
                k, eq, v = p.partition("=")
                if not eq:
                    raise LWError(f"line {no}: malformed attribute {p!r}")
                attrs[k] = v
            if "vertices" not in attrs:
                raise LWError(f"line {no}: face {name} lists no vertices")
            verts = tuple(v for v in attrs["vertices"].split(",") if v)
            faces.append(LWFace(
                name, verts,
                _parse_bool(attrs.get("complete", "unknown"), f"line {no}"),
                _parse_bool(attrs.get("essential", "unknown"), f"line {no}"),
                _parse_bool(attrs.get("lw", "unknown"), f"line {no}"),
            ))
        elif key == "wbasis":
            name, _, vec = rest.partition(" ")
            wlines.append((no, name, vec))
        elif key == "provenance":
            provenance.append(rest)
        else:
            raise LWError(f"line {no}: unknown record {key!r}")
    if tri_source is None:
        raise LWError("missing 'triangulation' line")
    if system is None:
        raise LWError("missing 'coords' line")
    source = tri_source
    if base_dir is not None and not any(c.isspace() for c in source) and (Path(base_dir) / source).exists():
        source = str(Path(base_dir) / source)
    tri = load_triangulation(source)
    lw = LWComplex(tri, tri_source, system, surfaces, faces, " ".join(provenance))
    for no, name, vec in wlines:
        try:
            face = lw.face(name)
        except KeyError:
            raise LWError(f"line {no}: wbasis for unknown face {name}") from None
        sysname, entries = parse_vector(vec)
        if sysname != STD:
            raise LWError(f"line {no}: wbasis vector is not in std7t coordinates")
        face.wbasis.append(entries)
    validate_lw(lw)
    return lw


def load_lw(path: str | Path) -> LWComplex:
    p = Path(path)
    return parse_lw(p.read_text(encoding="utf-8"), base_dir=p.parent)


def _local_rays(rows, support: Sequence[int], ncols: int) -> list[tuple[int, ...]]:
    s = sorted(support)
    sub = [[r[j] for j in s] for r in rows]
    sub = [r for r in sub if any(r)]
    out = []
    for ray in enumerate_vertex_rays(sub, len(s), ()):
        e = [0] * ncols
        for j, x in zip(s, ray):
            e[j] = x
        out.append(tuple(e))
    return sorted(out)


def validate_lw(lw: LWComplex) -> None:
    tri = lw.triangulation
    if not tri.is_ideal:
        raise LWError("the counting pipeline needs an ideal triangulation")
    ms = matching_equations(tri, STD)
    n = ms.ncols
    chi = euler_coefficients(tri)
    wt = weight_coefficients(tri)
    for name, v in lw.surfaces.items():
        if len(v) != n:
            raise LWError(f"surface {name}: expected {n} entries, got {len(v)}")
        if any(x < 0 for x in v):
            raise LWError(f"surface {name}: negative entry")
        if not ms.satisfied_by(v):
            raise LWError(f"surface {name}: does not satisfy the matching equations")
        if not is_admissible(v):
            raise LWError(f"surface {name}: not admissible")
    links = vertex_link_vectors(tri)
    names = set()
    for face in lw.faces:
        if face.name in names:
            raise LWError(f"face {face.name}: defined twice")
        names.add(face.name)
        for v in face.vertices:
            if v not in lw.surfaces:
                raise LWError(f"face {face.name}: unknown vertex surface {v}")
        rays = lw.rays(face)
        if not rays:
            raise LWError(f"face {face.name}: no vertices")
        supp = lw.support(face)
        if not is_admissible(tuple(1 if j in supp else 0 for j in range(n))):
            raise LWError(f"face {face.name}: support is not admissible")
        if sorted(set(rays)) != _local_rays(ms.rows, sorted(supp), n):
            raise LWError(f"face {face.name}: listed vertices are not the rays of the face with that support")
        if face.essential and carries_vertex_link(AdmissibleFace(supp, ()), links):
            raise LWError(
                f"face {face.name}: flagged essential but carries a vertex link; no surface carried "
                "by dep of a face carrying a vertex link is essential")
        if face.complete and face.essential:
            for v in face.vertices:
                c = sum(a * x for a, x in zip(chi, lw.surfaces[v]))
                if c >= 0:
                    raise LWError(f"face {face.name}: Euler characteristic of {v} is {c}, not negative")
                if c.denominator != 1 or c % 2:
                    raise LWError(f"face {face.name}: {v} has odd Euler characteristic (nonorientable)")
        if face.wbasis:
            r0 = rank([list(x) for x in rays])
            for w in face.wbasis:
                if rank([list(x) for x in rays] + [list(w)]) != r0:
                    raise LWError(f"face {face.name}: W basis vector is not in the span of the face")
                if sum(a * x for a, x in zip(wt, w)) != 0:
                    raise LWError(f"face {face.name}: W basis vector is not in the kernel of the weight")
            if rank([list(w) for w in face.wbasis]) != len(face.wbasis):
                raise LWError(f"face {face.name}: W basis is linearly dependent")
            dec = lattice_complement(face.wbasis, dim=n)
            if dec.saturated:
                face.saturated = True
                lw.notes.append(f"face {face.name}: W basis saturated to its lattice")
                face.wbasis = [tuple(b) for b in dec.w_basis]
    for d in lw.faces:
        for c in lw.faces:
            if d is c or not set(d.vertices) < set(c.vertices):
                continue
            if d.wbasis:
                base = [list(w) for w in c.wbasis]
                if rank(base + [list(w) for w in d.wbasis]) != len(base):
                    raise LWError(f"faces {d.name} and {c.name}: W of a subface must lie in W of the face")


def write_lw(lw: LWComplex) -> str:
    out = ["lw-complex v1", f"triangulation {lw.triangulation_source}", f"coords {lw.system}"]
    if lw.provenance:
        out.append(f"provenance {lw.provenance}")
    for name, v in lw.surfaces.items():
        out.append(f"surface {name} {format_vector(v)}")

    def b(x):
        return "unknown" if x is None else str(x).lower()

    for f in lw.faces:
        out.append(f"face {f.name} vertices={','.join(f.vertices)} complete={b(f.complete)} "
                   f"essential={b(f.essential)} lw={b(f.lw)}")
    for f in lw.faces:
        for w in f.wbasis:
            out.append(f"wbasis {f.name} {format_vector(w)}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# slices, dep and quotients


def enumerate_slice(lw: LWComplex, face: LWFace, n: int, cap: int = DEFAULT_POINT_CAP) -> list[tuple[int, ...]]:
    """Admissible lattice points carried by the face with chi = -2n."""
    if n <= 0:
        return []
    chi = lw.chi
    for v in face.vertices:
        if sum(a * x for a, x in zip(chi, lw.surfaces[v])) >= 0:
            raise CountingError(f"face {face.name}: chi is not negative on {v}")
    negchi = [-c for c in chi]
    return lattice_points(lw.rows, len(chi), lw.support(face), negchi, 2 * n, 2 * n, cap)


def dependence(lw: LWComplex, face: LWFace) -> DependenceData:
    return classify_dependent_faces(lw.rays(face), face.wbasis, weight_coefficients(lw.triangulation))


def dep_filter(points: Iterable[Sequence[int]], active_sets: Sequence[Iterable[int]]) -> list[tuple[int, ...]]:
    sets = [sorted(s) for s in active_sets]
    out = []
    for x in points:
        if not any(x):
            continue
        if all(sum(x[i] for i in s) >= 1 for s in sets):
            out.append(tuple(x))
    return out


def quotient_count(points: Sequence[Sequence[int]], w_basis: Sequence[Sequence[int]],
                   ncols: int | None = None) -> tuple[int, list[tuple[int, ...]]]:
    """Classes of points modulo the lattice W(Z); lexicographically least representatives."""
    if not points:
        return 0, []
    if not w_basis:
        reps = sorted(set(tuple(p) for p in points))
        return len(reps), reps
    dim = ncols or len(points[0])
    dec = _decomposition(tuple(tuple(w) for w in w_basis), dim)
    classes: dict[tuple[int, ...], tuple[int, ...]] = {}
    for p in points:
        key = dec.project(p)
        p = tuple(p)
        if key not in classes or p < classes[key]:
            classes[key] = p
    reps = sorted(classes.values())
    return len(reps), reps


@functools.lru_cache(maxsize=64)
def _decomposition(w_basis: tuple[tuple[int, ...], ...], dim: int):
    return lattice_complement(w_basis, dim=dim)


def _check_two_sided(tri: Triangulation, x: Sequence[int], disk_cap: int) -> None:
    if not SurfaceComplex(NormalVector(tri, tuple(x)), disk_cap).is_two_sided():
        raise NonorientableSurface(f"nonorientable component in {format_vector(x)}")


def face_slice_classes(lw: LWComplex, face: LWFace, n: int, dep: DependenceData | None = None,
                       cap: int = DEFAULT_POINT_CAP, check_orientable: bool = True,
                       disk_cap: int = 10**7) -> list[tuple[int, ...]]:
    dep = dep or dependence(lw, face)
    pts = dep_filter(enumerate_slice(lw, face, n, cap), dep.active_sets)
    if check_orientable:
        for x in pts:
            _check_two_sided(lw.triangulation, x, disk_cap)
    return quotient_count(pts, face.wbasis, len(lw.chi))[1]


def face_count_series(lw: LWComplex, face: LWFace, horizon: int, cap: int = DEFAULT_POINT_CAP,
                      check_orientable: bool = True) -> list[int]:
    """b_C(-2n) for n = 1..horizon."""
    if not (face.complete and face.essential):
        raise CountingError(f"face {face.name} is not flagged complete and essential")
    dep = dependence(lw, face)
    # when H1(boundary) -> H1(M) is onto mod 2, every closed surface is orientable
    if check_orientable and homology_f2_check(lw.triangulation)["passes"]:
        check_orientable = False
    return [len(face_slice_classes(lw, face, n, dep, cap, check_orientable)) for n in range(1, horizon + 1)]


# ---------------------------------------------------------------------------
# exact Ehrhart series


def _saturated_basis(vectors: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """Lattice basis of Z^n intersected with the span of ``vectors``."""
    n = len(vectors[0])
    orth = rational_kernel([list(v) for v in vectors], n)
    if not orth:
        return [tuple(1 if i == j else 0 for i in range(n)) for j in range(n)]
    rows = [list(clear_denominators(o)) for o in orth]
    return integer_kernel_basis(rows, n)


def cone_faces(rays: Sequence[Sequence[int]]) -> list[frozenset[int]]:
    """All nonempty faces of the pointed cone spanned by ``rays`` (as ray-index
    sets), the whole cone included.  Assumes every ray is extreme."""
    m = len(rays)
    basis = _saturated_basis(rays)
    coords = [list(lattice_coordinates(r, basis)) for r in rays]
    k = len(basis)
    facets = set()
    if k == 1:
        return [frozenset([0])] if m == 1 else [frozenset(range(m))]
    for combo in itertools.combinations(range(m), k - 1):
        sub = [coords[i] for i in combo]
        if rank(sub) != k - 1:
            continue
        normal = rational_kernel(sub, k)
        if len(normal) != 1:
            continue
        h = normal[0]
        vals = [sum(a * b for a, b in zip(h, c)) for c in coords]
        if all(v >= 0 for v in vals) or all(v <= 0 for v in vals):
            facets.add(frozenset(i for i in range(m) if vals[i] == 0))
    faces = {frozenset(range(m))}
    frontier = set(facets)
    while frontier:
        faces |= frontier
        new = set()
        for f in frontier:
            for g in facets:
                x = f & g
                if x and x not in faces:
                    new.add(x)
        frontier = new
    return sorted(faces, key=lambda s: (len(s), sorted(s)))


def _triangulate(face: frozenset[int], faces: list[frozenset[int]], ranks: dict) -> list[tuple[int, ...]]:
    if ranks[face] == len(face):
        return [tuple(sorted(face))]
    apex = min(face)
    r = ranks[face]
    out = []
    for g in faces:
        if g < face and ranks[g] == r - 1 and apex not in g:
            # g must be a facet of face: not contained in a larger proper subface of the same rank
            for tau in _triangulate(g, faces, ranks):
                out.append(tuple(sorted(tau + (apex,))))
    return out


def _degree(coeffs: Sequence[Fraction], v: Sequence) -> Fraction:
    return sum((Fraction(c) * x for c, x in zip(coeffs, v)), Fraction(0))


def _relint_series(rays: Sequence[Sequence[int]], face: frozenset[int], faces, ranks,
                   deg_coeffs: Sequence[Fraction]) -> ShortGF:
    members = sorted(face)
    basis = _saturated_basis([rays[i] for i in members])
    simplices = _triangulate(face, faces, ranks)
    k = len(basis)
    coords = {i: [Fraction(x) for x in lattice_coordinates(rays[i], basis)] for i in members}
    for t in range(2, 200):
        w = [Fraction(0)] * k
        for pos, i in enumerate(members):
            c = 1 + Fraction(1, t ** (pos + 1))
            for j in range(k):
                w[j] -= c * coords[i][j]
        lams = []
        generic = True
        for sigma in simplices:
            r = [[coords[i][j] for i in sigma] for j in range(k)]
            lam = solve_rational(r, w)
            if lam is None or any(x == 0 for x in lam):
                generic = False
                break
            lams.append(lam)
        if generic:
            break
    else:
        raise CountingError("no generic direction found for the half-open decomposition")
    total = ZERO
    for sigma, lam in zip(simplices, lams):
        open_ = [x < 0 for x in lam]
        r = [[int(coords[i][j]) for i in sigma] for j in range(k)]
        degs = []
        for i in sigma:
            d = _degree(deg_coeffs, rays[i])
            if d.denominator != 1 or d <= 0:
                raise CountingError(f"ray has degree {d}; -chi must be a positive even integer")
            degs.append(int(d))
        u, s, v = smith_normal_form(r)
        uinv = unimodular_inverse(u)
        diag = [s[i][i] for i in range(k)]
        num = {}
        for a in itertools.product(*[range(d) for d in diag]):
            z = [sum(uinv[i][j] * a[j] for j in range(k)) for i in range(k)]
            lam_z = solve_rational([[Fraction(x) for x in row] for row in r], z)
            frac = []
            for x, op in zip(lam_z, open_):
                f = x - math.floor(x)
                if f == 0 and op:
                    f = Fraction(1)
                frac.append(f)
            point = [Fraction(0)] * len(rays[0])
            for f, i in zip(frac, sigma):
                for j, x in enumerate(rays[i]):
                    point[j] += f * x
            d = _degree(deg_coeffs, point)
            if d.denominator != 1:
                raise CountingError("lattice point with odd -chi: the face carries a nonorientable surface")
            num[int(d)] = num.get(int(d), 0) + 1
        p = [0] * (max(num) + 1)
        for d, c in num.items():
            p[d] += c
        den = {}
        for d in degs:
            den[d] = den.get(d, 0) + 1
        total = gf_add(total, ShortGF.make(p, den))
    return total


def ehrhart_series_exact(rays: Sequence[Sequence[int]], deg_coeffs: Sequence,
                         removed_faces: Iterable[Iterable[int]] = ()) -> ShortGF:
    """sum over lattice points x != 0 of the cone minus the removed faces of t^deg(x).

    ``deg_coeffs`` is a linear functional (for surfaces, -chi/2) that must
    take positive integer values on the rays.  Removed faces are given as
    sets of ray indices.
    """
    rays = [tuple(r) for r in rays]
    faces = cone_faces(rays)
    ranks = {f: rank([list(rays[i]) for i in f]) for f in faces}
    removed = [frozenset(x) for x in removed_faces]
    total = ZERO
    for f in faces:
        if any(f <= d for d in removed):
            continue
        total = gf_add(total, _relint_series(rays, f, faces, ranks, deg_coeffs))
    return gf_normalize(total)


def face_ehrhart(lw: LWComplex, face: LWFace) -> ShortGF:
    if face.wbasis:
        raise UnsupportedFace(f"face {face.name} has W != 0; use fitted counting")
    rays = lw.rays(face)
    dep = dependence(lw, face)
    deg = [-c / 2 for c in lw.chi]
    return ehrhart_series_exact(rays, deg, dep.maximal_independent)


# ---------------------------------------------------------------------------
# assembling B_M


@dataclass
class BMResult:
    """Counts b(-2n) for n = 1..horizon.  A generating function is None when
    a face with W != 0 has no fit within budget at this horizon."""

    series: list[int]
    gf: ShortGF | None
    per_face: dict[str, list[int]]
    per_face_gf: dict[str, ShortGF | None]
    disjointness: "DisjointnessReport | None" = None


@dataclass
class DisjointnessReport:
    horizon: int
    overlaps: list[tuple[tuple[int, ...], list[str]]]
    missed: list[tuple[int, ...]]

    @property
    def ok(self) -> bool:
        return not self.overlaps and not self.missed


def _face_job(args):
    lw, name, horizon, cap, check = args
    face = lw.face(name)
    series = face_count_series(lw, face, horizon, cap, check)
    if face.wbasis:
        # the quotient has no closed form here, so fit its series; smallest
        # denominators come first and the budget is set by the ray degrees
        degs = [int(-sum(a * x for a, x in zip(lw.chi, r)) / 2) for r in lw.rays(face)]
        ladder = denominator_ladder(max_extra_degree=sum(degs) + 2, max_b=2 * max(degs))
        try:
            gf = fit_short_gf([0] + series, ladder, guard=min(10, max(2, horizon // 4)))
        except NoFit:
            gf = None
    else:
        gf = face_ehrhart(lw, face)
        expanded = [int(c) for c in gf_expand(gf, horizon + 1)[1:]]
        if expanded != series:
            raise CountingError(f"face {face.name}: exact series disagrees with pointwise counts")
    return series, gf


def assemble_bm(lw: LWComplex, horizon: int, cap: int = DEFAULT_POINT_CAP, check_orientable: bool = True,
                disjointness_horizon: int = 0) -> BMResult:
    faces = lw.counted_faces()
    results = parallel_map(_face_job, [(lw, f.name, horizon, cap, check_orientable) for f in faces])
    per_face = {f.name: r[0] for f, r in zip(faces, results)}
    per_gf = {f.name: r[1] for f, r in zip(faces, results)}
    total = [sum(s[i] for s in per_face.values()) for i in range(horizon)]
    gf = None if any(g is None for g in per_gf.values()) else gf_sum(per_gf.values())
    rep = check_dep_disjointness(lw, disjointness_horizon) if disjointness_horizon else None
    return BMResult(total, gf, per_face, per_gf, rep)


def check_dep_disjointness(lw: LWComplex, horizon: int, cap: int = DEFAULT_POINT_CAP) -> DisjointnessReport:
    """Every lattice point carried by the complex (slices n <= horizon) lies in
    dep of at most one complete essential face, and in at least one."""
    counted = lw.counted_faces()
    deps = {f.name: dependence(lw, f) for f in counted}
    owner: dict[tuple[int, ...], list[str]] = {}
    carried: set[tuple[int, ...]] = set()
    for n in range(1, horizon + 1):
        for f in lw.faces:
            carried.update(enumerate_slice(lw, f, n, cap))
        for f in counted:
            for x in dep_filter(enumerate_slice(lw, f, n, cap), deps[f.name].active_sets):
                owner.setdefault(x, []).append(f.name)
    overlaps = sorted((x, names) for x, names in owner.items() if len(names) > 1)
    missed = sorted(x for x in carried if x not in owner)
    return DisjointnessReport(horizon, overlaps, missed)


# ---------------------------------------------------------------------------
# connected counts


def connected_slice_count(lw: LWComplex, face: LWFace, n: int, cap: int = DEFAULT_POINT_CAP,
                          disk_cap: int = 10**7, dep: DependenceData | None = None) -> int:
    if face.wbasis:
        raise UnsupportedFace(f"face {face.name}: genus counts with W != 0 are not supported")
    dep = dep or dependence(lw, face)
    count = 0
    for x in dep_filter(enumerate_slice(lw, face, n, cap), dep.active_sets):
        v = NormalVector(lw.triangulation, x)
        sc = SurfaceComplex(v, disk_cap)
        if not sc.is_two_sided():
            raise NonorientableSurface(f"nonorientable component in {format_vector(x)}")
        if len(sc.components()) == 1:
            count += 1
    return count

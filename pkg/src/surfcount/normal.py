"""Normal surfaces in standard (7t) and quad (3t) coordinates.

Standard coordinates list, per tetrahedron, the four triangle types (one per
vertex) followed by the three quad types.  Quad type ``k`` separates vertex
pair ``{0, k+1}`` from the complementary pair.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph

from .exactmath import hermite_rows, rational_kernel, rref, transpose
from .triangulation import (
    AngleStructure,
    EDGE_VERTICES,
    Triangulation,
    TriangulationError,
    quad_type,
)

STD = "std7t"
QUAD = "quad3t"
DEFAULT_DISK_CAP = 10**7


class NormalSurfaceError(ValueError):
    pass


class IncompatibleSum(NormalSurfaceError):
    def __init__(self, tet: int):
        super().__init__(f"surfaces carry different quad types in tetrahedron {tet}")
        self.tet = tet


class DiskCapExceeded(NormalSurfaceError):
    def __init__(self, required: int, cap: int):
        super().__init__(f"surface has {required} disks, cap is {cap}")
        self.required = required


class NonorientableSurface(NormalSurfaceError):
    pass


def tri_index(tet: int, vertex: int) -> int:
    return 7 * tet + vertex


def quad_index(tet: int, k: int) -> int:
    return 7 * tet + 4 + k


def _quad_side_a(k: int) -> tuple[int, int]:
    return (0, k + 1)


@dataclass(frozen=True)
class NormalVector:
    tri: Triangulation
    entries: tuple[int, ...]
    system: str = STD

    def __post_init__(self):
        width = 7 if self.system == STD else 3
        if self.system not in (STD, QUAD):
            raise NormalSurfaceError(f"unknown coordinate system {self.system!r}")
        if len(self.entries) != width * self.tri.size:
            raise NormalSurfaceError(f"{self.system} vector needs {width * self.tri.size} entries")

    def __add__(self, other: "NormalVector") -> "NormalVector":
        return haken_sum(self, other)

    def scale(self, k: int) -> "NormalVector":
        return NormalVector(self.tri, tuple(k * x for x in self.entries), self.system)

    def quads(self, tet: int) -> tuple[int, int, int]:
        if self.system == STD:
            return self.entries[7 * tet + 4: 7 * tet + 7]  # type: ignore[return-value]
        return self.entries[3 * tet: 3 * tet + 3]  # type: ignore[return-value]

    @property
    def support(self) -> frozenset[int]:
        return frozenset(i for i, x in enumerate(self.entries) if x)

    def is_zero(self) -> bool:
        return not any(self.entries)

    def __str__(self) -> str:
        return format_vector(self.entries, self.system)


def format_vector(entries: Sequence[int], system: str = STD) -> str:
    return f"{system}[{','.join(str(int(x)) for x in entries)}]"


_VEC_RE = re.compile(r"^\s*(std7t|quad3t)\[([^\]]*)\]\s*$")


def parse_vector(text: str) -> tuple[str, tuple[int, ...]]:
    m = _VEC_RE.match(text)
    if not m:
        raise NormalSurfaceError(f"cannot parse normal vector {text!r}")
    body = m.group(2).strip()
    entries = tuple(int(x) for x in body.split(",")) if body else ()
    return m.group(1), entries


# ---------------------------------------------------------------------------
# matching equations


@dataclass(frozen=True)
class MatchingSystem:
    rows: tuple[tuple[int, ...], ...]
    system: str
    ncols: int

    @property
    def admissibility_groups(self) -> tuple[tuple[int, int, int], ...]:
        t = self.ncols // (7 if self.system == STD else 3)
        if self.system == STD:
            return tuple((7 * i + 4, 7 * i + 5, 7 * i + 6) for i in range(t))
        return tuple((3 * i, 3 * i + 1, 3 * i + 2) for i in range(t))

    def satisfied_by(self, v: Sequence[int]) -> bool:
        return all(sum(a * x for a, x in zip(row, v)) == 0 for row in self.rows)


def matching_equations(tri: Triangulation, system: str = STD) -> MatchingSystem:
    """Standard: one row per (glued face pair, arc type).  Quad: one row per edge class."""
    if system == STD:
        rows = []
        n = 7 * tri.size
        for (t, f), other in tri.face_classes:
            if other is None:
                continue
            u, p = tri.gluings[t][f]
            g = p[f]
            for v in range(4):
                if v == f:
                    continue
                row = [0] * n
                row[tri_index(t, v)] += 1
                row[quad_index(t, quad_type(v, f))] += 1
                row[tri_index(u, p[v])] -= 1
                row[quad_index(u, quad_type(p[v], g))] -= 1
                rows.append(tuple(row))
        return MatchingSystem(tuple(rows), STD, n)
    if system == QUAD:
        if not tri.is_ideal:
            raise TriangulationError("quad coordinates need an ideal triangulation")
        n = 3 * tri.size
        rows = []
        for cls in tri.edges:
            row = [0] * n
            for t, (a, b, c, d) in cls.embeddings:
                row[3 * t + quad_type(a, c)] += 1
                row[3 * t + quad_type(a, d)] -= 1
            rows.append(tuple(row))
        return MatchingSystem(tuple(rows), QUAD, n)
    raise NormalSurfaceError(f"unknown coordinate system {system!r}")


def closed_quad_equations(tri: Triangulation) -> MatchingSystem:
    """Quad rows cutting out exactly the quad vectors that lift to closed
    surfaces: the quad matching equations plus the cusp-consistency rows
    obtained by eliminating triangle coordinates from the standard system."""
    std = matching_equations(tri, STD)
    t = tri.size
    tri_cols = [7 * i + v for i in range(t) for v in range(4)]
    quad_cols = [7 * i + 4 + k for i in range(t) for k in range(3)]
    mt = [[row[c] for c in tri_cols] for row in std.rows]
    mq = [[row[c] for c in quad_cols] for row in std.rows]
    left = rational_kernel(transpose(mt), len(mt)) if mt else []
    derived = []
    for y in left:
        r = [sum(y[i] * mq[i][j] for i in range(len(mq))) for j in range(3 * t)]
        if any(r):
            derived.append(r)
    base = list(matching_equations(tri, QUAD).rows)
    rows: list[tuple[int, ...]] = []
    basis: list[list[Fraction]] = []
    for cand in base + derived:
        trial = basis + [list(map(Fraction, cand))]
        if len(rref(trial)[1]) > len(basis):
            basis = trial
            den = 1
            for x in cand:
                den = den * Fraction(x).denominator // __import__("math").gcd(den, Fraction(x).denominator)
            rows.append(tuple(int(Fraction(x) * den) for x in cand))
    return MatchingSystem(tuple(rows), QUAD, 3 * t)


# ---------------------------------------------------------------------------
# functionals


def is_admissible(v: NormalVector | Sequence[int], system: str | None = None) -> bool:
    if isinstance(v, NormalVector):
        entries, system = v.entries, v.system
    else:
        entries = tuple(v)
        system = system or STD
    width, off = (7, 4) if system == STD else (3, 0)
    for t in range(len(entries) // width):
        q = entries[width * t + off: width * t + off + 3]
        if sum(1 for x in q if x) > 1:
            return False
    return True


def _corner_edges(tet: int, disk: int) -> list[tuple[int, int]]:
    if disk < 4:
        return [(disk, x) for x in range(4) if x != disk]
    k = disk - 4
    a = _quad_side_a(k)
    return [e for e in EDGE_VERTICES if set(e) != set(a) and set(e) != set(range(4)) - set(a)]


def weight_coefficients(tri: Triangulation) -> list[Fraction]:
    out = []
    for t in range(tri.size):
        for disk in range(7):
            out.append(sum((Fraction(1, tri.edge_valence(t, a, b)) for a, b in _corner_edges(t, disk)), Fraction(0)))
    return out


def euler_coefficients(tri: Triangulation) -> list[Fraction]:
    """Per-disk Euler characteristic contribution 1 - sides/2 + sum 1/valence."""
    w = weight_coefficients(tri)
    out = []
    for i, c in enumerate(w):
        sides = 3 if i % 7 < 4 else 4
        out.append(1 - Fraction(sides, 2) + c)
    return out


def _std_entries(v: NormalVector) -> tuple[int, ...]:
    if v.system != STD:
        raise NormalSurfaceError("standard coordinates required")
    return v.entries


def weight(v: NormalVector) -> Fraction:
    coeffs = weight_coefficients(v.tri)
    return sum((c * x for c, x in zip(coeffs, _std_entries(v))), Fraction(0))


def euler_char_standard(v: NormalVector) -> Fraction:
    coeffs = euler_coefficients(v.tri)
    return sum((c * x for c, x in zip(coeffs, _std_entries(v))), Fraction(0))


def quad_euler_coefficients(tri: Triangulation, angles: AngleStructure) -> list[Fraction]:
    """chi(e_i) = -1 + (sum of the angles on the four edges the quad meets) / 2pi.

    Angles are stored in units of pi, so dividing by 2pi is dividing by 2.
    """
    out = []
    for t in range(tri.size):
        for k in range(3):
            met = [e for e in EDGE_VERTICES if quad_type(*e) != k]
            total = sum((angles.angles[t][quad_type(*e)] for e in met), Fraction(0))
            out.append(-1 + total / 2)
    return out


def euler_char_quad(v: NormalVector, angles: AngleStructure) -> Fraction:
    entries = v.entries if v.system == QUAD else to_quad(v).entries
    coeffs = quad_euler_coefficients(v.tri, angles)
    return sum((c * x for c, x in zip(coeffs, entries)), Fraction(0))


def haken_sum(a: NormalVector, b: NormalVector) -> NormalVector:
    if a.tri is not b.tri and a.tri != b.tri:
        raise NormalSurfaceError("surfaces live in different triangulations")
    if a.system != b.system:
        raise NormalSurfaceError("coordinate systems differ")
    for t in range(a.tri.size):
        qa, qb = a.quads(t), b.quads(t)
        ka = {k for k in range(3) if qa[k]}
        kb = {k for k in range(3) if qb[k]}
        if ka and kb and ka != kb:
            raise IncompatibleSum(t)
    return NormalVector(a.tri, tuple(x + y for x, y in zip(a.entries, b.entries)), a.system)


# ---------------------------------------------------------------------------
# vertex links and coordinate conversion


def vertex_link_vectors(tri: Triangulation) -> list[NormalVector]:
    out = []
    for cls in tri.vertex_classes:
        e = [0] * (7 * tri.size)
        for t, v in cls:
            e[tri_index(t, v)] += 1
        out.append(NormalVector(tri, tuple(e), STD))
    return out


def vertex_links(tri: Triangulation) -> list[tuple[NormalVector, int]]:
    """Each vertex-link vector with the Euler characteristic of the link."""
    if not tri.is_ideal:
        raise TriangulationError("vertex links are reported for ideal triangulations")
    return [(vec, tri.link_euler_characteristic(i)) for i, vec in enumerate(vertex_link_vectors(tri))]


def strip_vertex_links(v: NormalVector) -> tuple[NormalVector, dict[int, int]]:
    """Split ``v = canonical + sum m_x H_x`` with the multiplicities maximal."""
    e = list(_std_entries(v))
    mult = {}
    for x, cls in enumerate(v.tri.vertex_classes):
        m = min(e[tri_index(t, w)] for t, w in cls)
        if m:
            mult[x] = m
            for t, w in cls:
                e[tri_index(t, w)] -= m
    return NormalVector(v.tri, tuple(e), STD), mult


def is_vertex_link(v: NormalVector) -> bool:
    canon, mult = strip_vertex_links(v)
    return canon.is_zero() and sorted(mult.values()) == [1]


def to_quad(v: NormalVector) -> NormalVector:
    if v.system == QUAD:
        return v
    e = v.entries
    return NormalVector(v.tri, tuple(e[7 * t + 4 + k] for t in range(v.tri.size) for k in range(3)), QUAD)


def quad_to_standard(tri: Triangulation, q: Sequence[int]) -> NormalVector | None:
    """Canonical closed surface with the given quads (no vertex-link
    components), or None when the quads do not lift to a closed surface."""
    t = tri.size
    if len(q) != 3 * t:
        raise NormalSurfaceError("quad vector has the wrong length")
    # triangle (t, v) versus its neighbour across face f: equal arc counts
    value: dict[tuple[int, int], int] = {}
    out = [0] * (7 * t)
    for i in range(t):
        for k in range(3):
            out[quad_index(i, k)] = q[3 * i + k]
    for cls in tri.vertex_classes:
        start = cls[0]
        value[start] = 0
        stack = [start]
        comp = [start]
        while stack:
            tet, v = stack.pop()
            for f in range(4):
                if f == v:
                    continue
                g = tri.gluings[tet][f]
                if g is None:
                    continue
                u, p = g
                other = (u, p[v])
                # t_a + q_a = t_b + q_b across the face
                want = value[(tet, v)] + q[3 * tet + quad_type(v, f)] - q[3 * u + quad_type(p[v], p[f])]
                if other in value:
                    if value[other] != want:
                        return None
                else:
                    value[other] = want
                    comp.append(other)
                    stack.append(other)
        low = min(value[c] for c in comp)
        for tet, v in comp:
            out[tri_index(tet, v)] = value[(tet, v)] - low
    return NormalVector(tri, tuple(out), STD)


# ---------------------------------------------------------------------------
# the explicit surface complex


class SurfaceComplex:
    """Disk copies of a standard vector glued along arcs in nested order.

    Parallel copies of a disk type are numbered from the vertex (triangles)
    or from the side containing vertex 0 (quads); the arcs at a face corner
    are listed from the corner outwards, so matching across a glued face is
    forced.
    """

    def __init__(self, v: NormalVector, cap: int = DEFAULT_DISK_CAP):
        e = _std_entries(v)
        if not is_admissible(v):
            raise NormalSurfaceError("surface complex needs an admissible vector")
        total = sum(e)
        if total > cap:
            raise DiskCapExceeded(total, cap)
        self.vector = v
        tri = v.tri
        self.tri = tri
        self.offsets: list[int] = []
        acc = 0
        for x in e:
            self.offsets.append(acc)
            acc += x
        self.ndisks = acc
        self.disk_type = [0] * acc
        for i, x in enumerate(e):
            for j in range(x):
                self.disk_type[self.offsets[i] + j] = i
        # arcs as parallel arrays: disk, disk, relation (0 keeps the
        # transverse orientation, 1 flips it)
        arcs_a, arcs_b, arcs_rel = [], [], []
        self.boundary_arcs = 0
        self._analysis = None
        for t in range(tri.size):
            for f in range(4):
                g = tri.gluings[t][f]
                for w in range(4):
                    if w == f:
                        continue
                    ids1, sg1 = self._corner_sequence(t, f, w)
                    if g is None:
                        self.boundary_arcs += len(ids1)
                        continue
                    u, p = g
                    if (t, f) > (u, p[f]):
                        continue
                    ids2, sg2 = self._corner_sequence(u, p[f], p[w])
                    if len(ids1) != len(ids2):
                        raise NormalSurfaceError("vector does not satisfy the matching equations")
                    arcs_a.append(ids1)
                    arcs_b.append(ids2)
                    arcs_rel.append(sg1 ^ sg2)
        empty = np.zeros(0, dtype=np.int64)
        self.arc_a = np.concatenate(arcs_a) if arcs_a else empty
        self.arc_b = np.concatenate(arcs_b) if arcs_b else empty
        self.arc_rel = np.concatenate(arcs_rel) if arcs_rel else empty

    @property
    def narcs(self) -> int:
        return len(self.arc_a)

    def _copies(self, t: int, disk: int) -> range:
        i = 7 * t + disk
        return range(self.offsets[i], self.offsets[i] + self.vector.entries[i])

    def _corner_sequence(self, t: int, f: int, w: int) -> tuple[np.ndarray, np.ndarray]:
        """Disk sides at corner ``w`` of face ``f`` in tet ``t``, from the corner out.

        The flag is 0 when the disk's reference normal points away from the
        corner and 1 when it points towards it.
        """
        tri_range = self._copies(t, w)
        k = quad_type(w, f)
        quads = self._copies(t, 4 + k)
        ids = np.arange(tri_range.start, tri_range.stop, dtype=np.int64)
        flags = np.zeros(len(tri_range), dtype=np.int64)
        if quads:
            if w in _quad_side_a(k):
                q = np.arange(quads.start, quads.stop, dtype=np.int64)
                qf = np.zeros(len(quads), dtype=np.int64)
            else:
                q = np.arange(quads.stop - 1, quads.start - 1, -1, dtype=np.int64)
                qf = np.ones(len(quads), dtype=np.int64)
            ids = np.concatenate([ids, q])
            flags = np.concatenate([flags, qf])
        return ids, flags

    def _points(self) -> int:
        """Number of intersection points with the 1-skeleton."""
        parent: dict = {}

        def find(x):
            parent.setdefault(x, x)
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        e = self.vector.entries
        tri = self.tri
        count = {}
        for t in range(tri.size):
            for a, b in EDGE_VERTICES:
                k_ab = quad_type(a, b)
                q = sum(e[quad_index(t, k)] for k in range(3) if k != k_ab)
                n = e[tri_index(t, a)] + q + e[tri_index(t, b)]
                count[(t, a, b)] = n
                for j in range(n):
                    find((t, a, b, j))
        for t in range(tri.size):
            for f in range(4):
                g = tri.gluings[t][f]
                if g is None:
                    continue
                u, p = g
                for a, b in EDGE_VERTICES:
                    if f in (a, b):
                        continue
                    pa, pb = p[a], p[b]
                    n = count[(t, a, b)]
                    for j in range(n):
                        if pa < pb:
                            other = (u, pa, pb, j)
                        else:
                            other = (u, pb, pa, n - 1 - j)
                        ra, rb = find((t, a, b, j)), find(other)
                        if ra != rb:
                            parent[ra] = rb
        return len({find(x) for x in list(parent)})

    def euler_characteristic(self) -> int:
        if self.boundary_arcs:
            edges = self.narcs + self.boundary_arcs
        else:
            edges = self.narcs
        return self._points() - edges + self.ndisks

    def _analyse(self):
        """Components, and two-sidedness via the orientation double cover:
        disk d with orientation o is node 2d + o, and an arc with flip bit r
        joins 2a + o to 2b + (o xor r)."""
        if self._analysis is not None:
            return self._analysis
        n = self.ndisks
        a, b, r = self.arc_a, self.arc_b, self.arc_rel
        base = sp.coo_matrix((np.ones(len(a), dtype=np.int8), (a, b)), shape=(n, n))
        ncomp, labels = csgraph.connected_components(base, directed=False)
        src = np.concatenate([2 * a, 2 * a + 1])
        dst = np.concatenate([2 * b + r, 2 * b + (1 - r)])
        cover = sp.coo_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(2 * n, 2 * n))
        ncover, _ = csgraph.connected_components(cover, directed=False)
        # relabel components by their smallest disk for a deterministic order
        first = {}
        for d, lab in enumerate(labels.tolist()):
            first.setdefault(lab, d)
        roots = [first[lab] for lab in labels.tolist()]
        self._analysis = (roots, ncover == 2 * ncomp, ncomp)
        return self._analysis

    def components(self) -> list[list[int]]:
        roots = self._analyse()[0]
        groups: dict[int, list[int]] = {}
        for d, r in enumerate(roots):
            groups.setdefault(r, []).append(d)
        return [groups[k] for k in sorted(groups)]

    def component_count(self) -> int:
        return self._analyse()[2]

    def is_two_sided(self) -> bool:
        """False when some cycle of arc gluings reverses the transverse orientation."""
        return self._analyse()[1]


def connected_components(v: NormalVector, cap: int = DEFAULT_DISK_CAP) -> list[NormalVector]:
    sc = SurfaceComplex(v, cap)
    out = []
    for comp in sc.components():
        e = [0] * len(v.entries)
        for d in comp:
            e[sc.disk_type[d]] += 1
        out.append(NormalVector(v.tri, tuple(e), STD))
    out.sort(key=lambda x: x.entries)
    return out


def is_connected(v: NormalVector, cap: int = DEFAULT_DISK_CAP) -> bool:
    if v.is_zero():
        return False
    return SurfaceComplex(v, cap).component_count() == 1


def is_orientable(v: NormalVector, cap: int = DEFAULT_DISK_CAP) -> bool:
    """Orientability of a connected surface via transverse orientation.

    In an orientable 3-manifold a surface is orientable iff it is two-sided.
    """
    if not v.tri.is_orientable:
        raise NormalSurfaceError("orientability test assumes an orientable triangulation")
    return SurfaceComplex(v, cap).is_two_sided()


def genus(v: NormalVector, cap: int = DEFAULT_DISK_CAP) -> int:
    chi = euler_char_standard(v)
    if chi.denominator != 1 or chi % 2 or not is_orientable(v, cap):
        raise NonorientableSurface("surface is nonorientable; report it instead of a genus")
    return int((2 - chi) // 2)


def has_obvious_compression(v: NormalVector) -> bool:
    """Some edge is encircled by quads disjoint from it in every incident tetrahedron."""
    e = _std_entries(v)
    for cls in v.tri.edges:
        if cls.boundary:
            continue
        if all(e[quad_index(t, quad_type(a, b))] > 0 for t, (a, b, _, _) in cls.embeddings):
            return True
    return False

"""Ideal and finite triangulations of 3-manifolds.

A triangulation is a list of tetrahedra whose faces are glued in pairs.
Face ``f`` of a tetrahedron is the face opposite vertex ``f``; a gluing of
face ``f`` of tetrahedron ``t`` is a pair ``(u, p)`` where ``p`` is a
permutation of ``{0,1,2,3}`` sending vertex ``i`` of ``t`` to vertex
``p[i]`` of ``u`` (so face ``f`` lands on face ``p[f]``).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Iterator, Optional, Sequence

from .exactmath import lp_feasible, rank, smith_normal_form

Perm = tuple[int, int, int, int]
Gluing = Optional[tuple[int, Perm]]

IDENTITY: Perm = (0, 1, 2, 3)
# tetrahedron edge numbering (Regina's convention)
EDGE_VERTICES: tuple[tuple[int, int], ...] = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
EDGE_NUMBER = {frozenset(e): i for i, e in enumerate(EDGE_VERTICES)}


def quad_type(a: int, b: int) -> int:
    """Index (0, 1, 2) of the quad type separating vertices {a, b} from the others.

    Quad type k is disjoint from the k-th pair of opposite edges
    {01, 23}, {02, 13}, {03, 12}; angles use the same indexing.
    """
    s = frozenset((a, b))
    if s in (frozenset((0, 1)), frozenset((2, 3))):
        return 0
    if s in (frozenset((0, 2)), frozenset((1, 3))):
        return 1
    return 2


def invert(p: Sequence[int]) -> Perm:
    inv = [0, 0, 0, 0]
    for i, x in enumerate(p):
        inv[x] = i
    return tuple(inv)  # type: ignore[return-value]


def compose(p: Sequence[int], q: Sequence[int]) -> Perm:
    """``p ∘ q``: apply q first."""
    return tuple(p[q[i]] for i in range(4))  # type: ignore[return-value]


def perm_sign(p: Sequence[int]) -> int:
    sign = 1
    for i in range(4):
        for j in range(i + 1, 4):
            if p[i] > p[j]:
                sign = -sign
    return sign


class TriangulationError(ValueError):
    pass


class _UnionFind:
    def __init__(self):
        self.parent: dict = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # keep the smaller representative as root for deterministic output
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


@dataclass(frozen=True)
class EdgeClass:
    index: int
    # cyclic sequence of (tet, vertex ordering a,b,c,d) with ab the edge; face
    # (a, b, d) of one embedding is glued to face (a, b, c) of the next
    embeddings: tuple[tuple[int, Perm], ...]
    boundary: bool = False

    @property
    def valence(self) -> int:
        return len(self.embeddings)


@dataclass(frozen=True)
class AngleStructure:
    """Angles in units of pi, ``angles[tet][k]`` on the k-th opposite-edge pair."""

    angles: tuple[tuple[Fraction, Fraction, Fraction], ...]

    def is_strict(self) -> bool:
        return all(a > 0 for row in self.angles for a in row)


@dataclass(frozen=True)
class Triangulation:
    size: int
    gluings: tuple[tuple[Gluing, Gluing, Gluing, Gluing], ...]
    kind: str = "ideal"

    def __post_init__(self):
        if self.size < 1:
            raise TriangulationError("a triangulation needs at least one tetrahedron")
        if self.kind not in ("ideal", "finite"):
            raise TriangulationError(f"unknown kind {self.kind!r}")
        if len(self.gluings) != self.size:
            raise TriangulationError("gluing table has the wrong number of tetrahedra")
        for t, row in enumerate(self.gluings):
            if len(row) != 4:
                raise TriangulationError(f"tetrahedron {t} needs four face entries")
            for f, g in enumerate(row):
                if g is None:
                    if self.kind == "ideal":
                        raise TriangulationError(f"face {f} of tetrahedron {t} is unglued in an ideal triangulation")
                    continue
                u, p = g
                if not 0 <= u < self.size:
                    raise TriangulationError(f"tetrahedron index {u} out of range")
                if sorted(p) != [0, 1, 2, 3]:
                    raise TriangulationError(f"invalid permutation {p}")
                if u == t and p[f] == f:
                    raise TriangulationError(f"face {f} of tetrahedron {t} is glued to itself")
                back = self.gluings[u][p[f]]
                if back is None or back[0] != t or tuple(back[1]) != invert(p):
                    raise TriangulationError(f"gluing of tetrahedron {t} face {f} is not involutive")

    # -- basic access ---------------------------------------------------

    def adjacent(self, tet: int, face: int) -> Gluing:
        return self.gluings[tet][face]

    @property
    def is_ideal(self) -> bool:
        return self.kind == "ideal"

    @cached_property
    def face_classes(self) -> tuple[tuple[tuple[int, int], tuple[int, int] | None], ...]:
        """Face pairs ``((t, f), (u, g))`` ordered by their first member;
        boundary faces appear as ``((t, f), None)``."""
        out = []
        for t in range(self.size):
            for f in range(4):
                g = self.gluings[t][f]
                if g is None:
                    out.append(((t, f), None))
                    continue
                u, p = g
                if (t, f) < (u, p[f]):
                    out.append(((t, f), (u, p[f])))
        return tuple(out)

    # -- skeleta --------------------------------------------------------

    @cached_property
    def vertex_classes(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        uf = _UnionFind()
        for t in range(self.size):
            for v in range(4):
                uf.find((t, v))
        for t in range(self.size):
            for f in range(4):
                g = self.gluings[t][f]
                if g is None:
                    continue
                u, p = g
                for v in range(4):
                    if v != f:
                        uf.union((t, v), (u, p[v]))
        groups: dict = {}
        for t in range(self.size):
            for v in range(4):
                groups.setdefault(uf.find((t, v)), []).append((t, v))
        return tuple(tuple(groups[k]) for k in sorted(groups))

    @cached_property
    def vertex_index(self) -> dict[tuple[int, int], int]:
        return {corner: i for i, cls in enumerate(self.vertex_classes) for corner in cls}

    def _walk(self, tet: int, order: Perm, face_slot: int) -> Iterator[tuple[int, Perm]]:
        """Step around an edge through face ``order[face_slot]`` repeatedly."""
        while True:
            g = self.gluings[tet][order[face_slot]]
            if g is None:
                return
            u, p = g
            a, b, c, d = order
            order = (p[a], p[b], p[d], p[c])
            tet = u
            yield tet, order

    @cached_property
    def edges(self) -> tuple[EdgeClass, ...]:
        uf = _UnionFind()
        for t in range(self.size):
            for e in range(6):
                uf.find((t, e))
        for t in range(self.size):
            for f in range(4):
                g = self.gluings[t][f]
                if g is None:
                    continue
                u, p = g
                verts = [v for v in range(4) if v != f]
                for a, b in itertools.combinations(verts, 2):
                    uf.union((t, EDGE_NUMBER[frozenset((a, b))]), (u, EDGE_NUMBER[frozenset((p[a], p[b]))]))
        groups: dict = {}
        for t in range(self.size):
            for e in range(6):
                groups.setdefault(uf.find((t, e)), []).append((t, e))
        out = []
        for idx, key in enumerate(sorted(groups)):
            t, e = key
            a, b = EDGE_VERTICES[e]
            c, d = [v for v in range(4) if v not in (a, b)]
            start = (t, (a, b, c, d))
            # rewind to a boundary face if the edge meets the boundary
            boundary = False
            seen = {start}
            cur = start
            for nxt in self._walk(cur[0], cur[1], 3):
                if nxt in seen:
                    break
                seen.add(nxt)
            else:
                boundary = True
            if boundary:
                cur = start
                while True:
                    g = self.gluings[cur[0]][cur[1][3]]
                    if g is None:
                        break
                    u, p = g
                    a2, b2, c2, d2 = cur[1]
                    cur = (u, (p[a2], p[b2], p[d2], p[c2]))
                    if cur == start:
                        raise TriangulationError("inconsistent edge walk")
                start = cur
            emb = [start]
            for nxt in self._walk(start[0], start[1], 2):
                if nxt == start:
                    break
                emb.append(nxt)
                if len(emb) > 12 * self.size:
                    raise TriangulationError("edge walk did not close up")
            out.append(EdgeClass(idx, tuple(emb), boundary))
        return tuple(out)

    @cached_property
    def edge_index(self) -> dict[tuple[int, int], int]:
        """Map (tet, tetrahedron edge number) to edge class index."""
        out = {}
        for cls in self.edges:
            for t, order in cls.embeddings:
                out[(t, EDGE_NUMBER[frozenset(order[:2])])] = cls.index
        return out

    @cached_property
    def valences(self) -> tuple[int, ...]:
        return tuple(e.valence for e in self.edges)

    def edge_valence(self, tet: int, a: int, b: int) -> int:
        return self.edges[self.edge_index[(tet, EDGE_NUMBER[frozenset((a, b))])]].valence

    def is_valid(self) -> bool:
        """No edge identified with itself in reverse."""
        for cls in self.edges:
            seen = {}
            for t, order in cls.embeddings:
                key = (t, EDGE_NUMBER[frozenset(order[:2])])
                if key in seen and seen[key] != order[0]:
                    return False
                seen[key] = order[0]
        total = sum(e.valence for e in self.edges)
        return total == 6 * self.size

    @cached_property
    def is_orientable(self) -> bool:
        sign: dict[int, int] = {0: 1}
        stack = [0]
        while stack:
            t = stack.pop()
            for f in range(4):
                g = self.gluings[t][f]
                if g is None:
                    continue
                u, p = g
                want = -sign[t] * perm_sign(p)
                if u in sign:
                    if sign[u] != want:
                        return False
                else:
                    sign[u] = want
                    stack.append(u)
        return True

    # -- vertex links ----------------------------------------------------

    def link_euler_characteristic(self, vertex: int) -> int:
        corners = self.vertex_classes[vertex]
        faces = len(corners)
        glued = 0
        unglued = 0
        for t, v in corners:
            for f in range(4):
                if f == v:
                    continue
                if self.gluings[t][f] is None:
                    unglued += 1
                else:
                    glued += 1
        link_edges = glued // 2 + unglued
        ends = 0
        for cls in self.edges:
            t, order = cls.embeddings[0]
            for end in order[:2]:
                if self.vertex_index[(t, end)] == vertex:
                    ends += 1
        return ends - link_edges + faces

    def link_is_orientable(self, vertex: int) -> bool:
        corners = set(self.vertex_classes[vertex])
        start = next(iter(sorted(corners)))
        sign = {start: 1}
        stack = [start]
        while stack:
            t, v = stack.pop()
            for f in range(4):
                if f == v:
                    continue
                g = self.gluings[t][f]
                if g is None:
                    continue
                u, p = g
                other = (u, p[v])
                want = -sign[(t, v)] * perm_sign(p)
                if other in sign:
                    if sign[other] != want:
                        return False
                else:
                    sign[other] = want
                    stack.append(other)
        return True

    def link_is_closed(self, vertex: int) -> bool:
        return all(self.gluings[t][f] is not None for t, v in self.vertex_classes[vertex] for f in range(4) if f != v)


# ---------------------------------------------------------------------------
# homology


def _f2_rank(rows: list[list[int]]) -> int:
    rows = [int("".join(str(x & 1) for x in r), 2) for r in rows if any(x & 1 for x in r)]
    basis: list[int] = []
    for r in rows:
        for b in basis:
            r = min(r, r ^ b)
        if r:
            basis.append(r)
    return len(basis)


def _dual_boundaries(tri: Triangulation) -> tuple[list[list[int]], list[list[int]]]:
    """Integer boundary maps of the dual spine: d1 (tets x faces), d2 (faces x edges)."""
    faces = [fc for fc in tri.face_classes if fc[1] is not None]
    face_of = {}
    for k, (a, b) in enumerate(faces):
        face_of[a] = (k, 1)
        face_of[b] = (k, -1)
    d1 = [[0] * len(faces) for _ in range(tri.size)]
    for k, ((t, _), (u, _)) in enumerate(faces):
        d1[u][k] += 1
        d1[t][k] -= 1
    d2 = [[0] * len(tri.edges) for _ in range(len(faces))]
    for cls in tri.edges:
        if cls.boundary:
            continue
        for t, order in cls.embeddings:
            k, s = face_of[(t, order[2])]
            d2[k][cls.index] += s
    return d1, d2


def homology_f2_check(tri: Triangulation) -> dict:
    """Mod-2 ranks of H1(M) and H1(boundary M) for an ideal triangulation.

    M deformation retracts to the dual 2-complex, so H1(M; F2) comes from
    its chain complex; the boundary is the union of the closed vertex links.
    """
    if not tri.is_ideal:
        raise TriangulationError("homology check needs an ideal triangulation")
    d1, d2 = _dual_boundaries(tri)
    nfaces = len(d1[0]) if d1 else 0
    h1 = nfaces - _f2_rank(d1) - _f2_rank(d2)
    h1_boundary = 0
    for v in range(len(tri.vertex_classes)):
        h1_boundary += 2 - tri.link_euler_characteristic(v)
    return {
        "h1_f2": h1,
        "h1_boundary_f2": h1_boundary,
        "passes": 2 * h1 == h1_boundary,
    }


def homology_h1_integral(tri: Triangulation) -> tuple[int, list[int]]:
    """H1(M; Z) as (free rank, torsion invariant factors) via Smith normal form."""
    d1, d2 = _dual_boundaries(tri)
    nfaces = len(d1[0]) if d1 else 0
    r1 = rank(d1) if nfaces else 0
    if nfaces == 0:
        return 0, []
    if not d2 or not d2[0]:
        return nfaces - r1, []
    _, s, _ = smith_normal_form(d2)
    diag = [s[i][i] for i in range(min(len(s), len(s[0]))) if s[i][i]]
    return nfaces - r1 - len(diag), [d for d in diag if d > 1]


# ---------------------------------------------------------------------------
# angle structures


def angle_equations(tri: Triangulation) -> tuple[list[list[int]], list[int]]:
    """Rows and right-hand sides (units of pi) of the angle-structure system."""
    n = 3 * tri.size
    rows, rhs = [], []
    for t in range(tri.size):
        row = [0] * n
        row[3 * t: 3 * t + 3] = [1, 1, 1]
        rows.append(row)
        rhs.append(1)
    for cls in tri.edges:
        if cls.boundary:
            continue
        row = [0] * n
        for t, order in cls.embeddings:
            row[3 * t + quad_type(order[0], order[1])] += 1
        rows.append(row)
        rhs.append(2)
    return rows, rhs


def find_angle_structure(tri: Triangulation, strictness: str = "strict") -> AngleStructure | None:
    """A rational angle structure found by exact LP, or None when infeasible.

    ``strictness`` is ``"strict"`` (all angles positive) or
    ``"partially_flat"`` (all angles nonnegative).
    """
    if not tri.is_ideal:
        raise TriangulationError("angle structures need an ideal triangulation")
    if strictness not in ("strict", "partially_flat"):
        raise ValueError(f"unknown strictness {strictness!r}")
    rows, rhs = angle_equations(tri)
    n = 3 * tri.size
    strict = [[i] for i in range(n)] if strictness == "strict" else []
    x = lp_feasible(rows, range(n), strict, rhs=rhs, nvars=n)
    if x is None:
        return None
    return AngleStructure(tuple(tuple(x[3 * t: 3 * t + 3]) for t in range(tri.size)))  # type: ignore[misc]


def check_angle_structure(tri: Triangulation, angles: AngleStructure) -> bool:
    rows, rhs = angle_equations(tri)
    flat = [a for row in angles.angles for a in row]
    if any(a < 0 for a in flat):
        return False
    return all(sum(c * a for c, a in zip(row, flat)) == b for row, b in zip(rows, rhs))


# ---------------------------------------------------------------------------
# gluing file format


def parse_gluing_file(text: str) -> Triangulation:
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append((lineno, line))
    if not lines:
        raise TriangulationError("empty gluing file")
    lineno, header = lines[0]
    parts = header.split()
    if len(parts) < 2 or parts[0] != "tets":
        raise TriangulationError(f"line {lineno}: expected 'tets N kind=...'")
    try:
        n = int(parts[1])
    except ValueError:
        raise TriangulationError(f"line {lineno}: bad tetrahedron count {parts[1]!r}") from None
    kind = "ideal"
    for opt in parts[2:]:
        if opt.startswith("kind="):
            kind = opt[5:]
        else:
            raise TriangulationError(f"line {lineno}: unknown option {opt!r}")
    body = lines[1:]
    if len(body) != n:
        raise TriangulationError(f"header declares {n} tetrahedra but {len(body)} gluing lines follow")
    table: list[list[Gluing]] = []
    for t, (lineno, line) in enumerate(body):
        entries = line.split()
        if len(entries) != 4:
            raise TriangulationError(f"line {lineno}: expected 4 face entries, got {len(entries)}")
        row: list[Gluing] = []
        for entry in entries:
            if entry == "-":
                row.append(None)
                continue
            try:
                tgt, perm = entry.split(":")
                u = int(tgt)
                p = tuple(int(ch) for ch in perm)
            except ValueError:
                raise TriangulationError(f"line {lineno}: malformed entry {entry!r}") from None
            if len(p) != 4 or sorted(p) != [0, 1, 2, 3]:
                raise TriangulationError(f"line {lineno}: bad permutation {perm!r}")
            if not 0 <= u < n:
                raise TriangulationError(f"line {lineno}: tetrahedron index {u} out of range")
            row.append((u, p))  # type: ignore[arg-type]
        table.append(row)
    # each face may be the target of only one gluing
    targets: dict = {}
    for t, row in enumerate(table):
        for f, g in enumerate(row):
            if g is None:
                continue
            key = (g[0], g[1][f])
            if key in targets:
                raise TriangulationError(f"face {key[1]} of tetrahedron {key[0]} is glued twice")
            targets[key] = (t, f)
    return Triangulation(n, tuple(tuple(r) for r in table), kind)  # type: ignore[arg-type]


def to_gluing_text(tri: Triangulation) -> str:
    out = [f"tets {tri.size} kind={tri.kind}"]
    for row in tri.gluings:
        out.append(" ".join("-" if g is None else f"{g[0]}:{''.join(map(str, g[1]))}" for g in row))
    return "\n".join(out) + "\n"


def load_triangulation(source: str) -> Triangulation:
    """Accept an isomorphism signature, gluing-file text, or a file path."""
    from .isosig import decode_isosig

    s = source.strip()
    if s and not any(ch.isspace() for ch in s):
        path = Path(s)
        if path.suffix and path.exists():
            return load_triangulation(path.read_text(encoding="utf-8"))
        return decode_isosig(s)
    return parse_gluing_file(source)

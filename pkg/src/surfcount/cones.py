"""Solution cones, vertex rays by double description, and admissible faces."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import networkx as nx

from .exactmath import clear_denominators, lp_feasible, primitive, rank, rational_kernel
from .normal import MatchingSystem, NormalVector, is_admissible

DEFAULT_RAY_CAP = 2_000_000


class ConeError(ValueError):
    pass


class RayCapExceeded(ConeError):
    pass


def _mask(v: Sequence[int]) -> int:
    m = 0
    for i, x in enumerate(v):
        if x:
            m |= 1 << i
    return m


def _group_masks(groups: Sequence[Sequence[int]]) -> list[list[int]]:
    return [[1 << i for i in g] for g in groups]


def _admissible_mask(m: int, gm: list[list[int]]) -> bool:
    for g in gm:
        hit = 0
        for b in g:
            if m & b:
                hit += 1
        if hit > 1:
            return False
    return True


@dataclass
class SolutionCone:
    """{x >= 0 : A x = 0} with optional admissibility groups."""

    rows: tuple[tuple[int, ...], ...]
    ncols: int
    groups: tuple[tuple[int, ...], ...] = ()
    _rays: dict = field(default_factory=dict, repr=False)

    @classmethod
    def from_system(cls, ms: MatchingSystem) -> "SolutionCone":
        return cls(ms.rows, ms.ncols, ms.admissibility_groups)

    def rays(self, require_admissible: bool = True, prune: bool = True) -> list[tuple[int, ...]]:
        key = (require_admissible, prune)
        if key not in self._rays:
            self._rays[key] = enumerate_vertex_rays(
                self.rows, self.ncols, self.groups if require_admissible else (), prune=prune)
        return self._rays[key]


def _order_rows(rows: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    # sparse rows first keeps intermediate ray sets small
    return sorted((tuple(r) for r in rows if any(r)), key=lambda r: (sum(1 for x in r if x), r))


def enumerate_vertex_rays(rows: Sequence[Sequence[int]], ncols: int,
                          groups: Sequence[Sequence[int]] = (), prune: bool = True,
                          cap: int = DEFAULT_RAY_CAP) -> list[tuple[int, ...]]:
    """Extreme rays of {x >= 0, A x = 0}, inserting one equation at a time.

    With ``groups`` given, only admissible rays are returned; ``prune``
    discards inadmissible intermediate rays early, which is sound because
    any ray blocking an admissible pair has support inside the pair's
    (admissible) union.
    """
    gm = _group_masks(groups)
    rays: list[tuple[tuple[int, ...], int]] = []
    for i in range(ncols):
        v = tuple(1 if j == i else 0 for j in range(ncols))
        rays.append((v, 1 << i))
    for row in _order_rows(rows):
        nz = [j for j, a in enumerate(row) if a]
        pos, neg, zero = [], [], []
        for v, m in rays:
            s = sum(row[j] * v[j] for j in nz)
            if s > 0:
                pos.append((v, m, s))
            elif s < 0:
                neg.append((v, m, s))
            else:
                zero.append((v, m))
        masks = [m for _, m in rays]
        new = list(zero)
        for vp, mp, sp in pos:
            for vn, mn, sn in neg:
                u = mp | mn
                if gm and prune and not _admissible_mask(u, gm):
                    continue
                blocked = False
                for m in masks:
                    if m != mp and m != mn and (m & ~u) == 0:
                        blocked = True
                        break
                if blocked:
                    continue
                w = primitive([sp * b - sn * a for a, b in zip(vp, vn)])
                new.append((tuple(w), _mask(w)))
                if len(new) > cap:
                    raise RayCapExceeded(f"more than {cap} intermediate rays")
        rays = new
    out = [v for v, m in rays if not gm or _admissible_mask(m, gm)]
    return sorted(set(out))


def brute_force_rays(rows: Sequence[Sequence[int]], ncols: int,
                     groups: Sequence[Sequence[int]] = ()) -> list[tuple[int, ...]]:
    """Oracle: a ray is extreme iff its support S gives a 1-dimensional
    kernel of A restricted to S, spanned by a strictly positive vector.

    Supports that break admissibility are skipped outright.
    """
    gm = _group_masks(groups)
    found = set()
    for size in range(1, ncols + 1):
        for supp in itertools.combinations(range(ncols), size):
            if gm and not _admissible_mask(_mask([int(j in supp) for j in range(ncols)]), gm):
                continue
            sub = [[row[j] for j in supp] for row in rows] or [[0] * size]
            ker = rational_kernel(sub, size)
            if len(ker) != 1:
                continue
            k = ker[0]
            if all(x > 0 for x in k) or all(x < 0 for x in k):
                v = [0] * ncols
                for j, x in zip(supp, clear_denominators([abs(x) for x in k])):
                    v[j] = x
                found.add(tuple(v))
    return sorted(found)


def is_extreme(rows: Sequence[Sequence[int]], ncols: int, ray: Sequence[int]) -> bool:
    """Rank test: tight constraints (equations plus x_i = 0 off the support) have rank ncols - 1."""
    tight = [list(r) for r in rows]
    for j in range(ncols):
        if not ray[j]:
            e = [0] * ncols
            e[j] = 1
            tight.append(e)
    ok = all(sum(a * x for a, x in zip(r, ray)) == 0 for r in rows) and all(x >= 0 for x in ray)
    return ok and any(ray) and rank(tight) == ncols - 1


# ---------------------------------------------------------------------------
# faces


@dataclass(frozen=True)
class AdmissibleFace:
    support: frozenset[int]
    rays: tuple[int, ...]
    least_weight: bool | None = None
    complete: bool | None = None
    essential: bool | None = None

    def contains(self, v: Sequence[int]) -> bool:
        return all(i in self.support for i, x in enumerate(v) if x)


def _compatible(ma: int, mb: int, gm: list[list[int]]) -> bool:
    return _admissible_mask(ma | mb, gm)


def maximal_admissible_faces(rays: Sequence[Sequence[int]],
                             groups: Sequence[Sequence[int]]) -> list[AdmissibleFace]:
    """Maximal sets of pairwise compatible rays; pairwise compatibility is
    enough since admissibility is a condition on pairs of quad types."""
    gm = _group_masks(groups)
    masks = [_mask(r) for r in rays]
    g = nx.Graph()
    g.add_nodes_from(range(len(rays)))
    for i in range(len(rays)):
        for j in range(i + 1, len(rays)):
            if _compatible(masks[i], masks[j], gm):
                g.add_edge(i, j)
    faces = {}
    for clique in nx.find_cliques(g):
        supp = 0
        for i in clique:
            supp |= masks[i]
        members = tuple(i for i in range(len(rays)) if masks[i] & ~supp == 0)
        faces[supp] = members
    out = []
    for supp in sorted(faces, key=lambda m: sorted(_bits(m))):
        out.append(AdmissibleFace(frozenset(_bits(supp)), faces[supp]))
    return out


def _bits(m: int) -> list[int]:
    out = []
    i = 0
    while m:
        if m & 1:
            out.append(i)
        m >>= 1
        i += 1
    return out


def carrier(v: Sequence[int] | NormalVector, rays: Sequence[Sequence[int]],
            rows: Sequence[Sequence[int]] | None = None) -> AdmissibleFace:
    """Minimal face containing ``v``: support(v) with the rays it contains."""
    entries = v.entries if isinstance(v, NormalVector) else tuple(v)
    if any(x < 0 for x in entries):
        raise ConeError("vector has negative entries")
    if rows is not None and any(sum(a * x for a, x in zip(r, entries)) for r in rows):
        raise ConeError("vector does not satisfy the equations")
    supp = frozenset(i for i, x in enumerate(entries) if x)
    members = tuple(i for i, r in enumerate(rays) if all(j in supp for j, x in enumerate(r) if x))
    return AdmissibleFace(supp, members)


def carries_vertex_link(face: AdmissibleFace, links: Iterable[NormalVector]) -> bool:
    return any(face.contains(h.entries) for h in links)


# ---------------------------------------------------------------------------
# dependent faces


@dataclass(frozen=True)
class DependenceData:
    dependent: tuple[frozenset[int], ...]
    independent: tuple[frozenset[int], ...]
    maximal_independent: tuple[frozenset[int], ...]
    active_sets: tuple[frozenset[int], ...]


def _subfaces(face_rays: Sequence[Sequence[int]]) -> list[frozenset[int]]:
    """Proper nonempty faces of the cone spanned by face_rays, each as the
    set of ray positions it contains (faces are support-closed)."""
    n = len(face_rays)
    masks = [_mask(r) for r in face_rays]
    seen = set()
    out = []
    for size in range(1, n):
        for combo in itertools.combinations(range(n), size):
            supp = 0
            for i in combo:
                supp |= masks[i]
            members = frozenset(i for i in range(n) if masks[i] & ~supp == 0)
            if len(members) == n or members in seen:
                continue
            seen.add(members)
            out.append(members)
    return out


def _in_relint_plus_w(face_rays, sub: frozenset[int], w_basis, ncols) -> bool:
    """Is there x in relint(D), w in W with x + w in relint(C)?

    Variables: lambda_i >= 0 for rays of D, mu_j free for W, y = x + w
    expressed in coordinates; relint via strict positivity on supports.
    """
    sub = sorted(sub)
    k = len(sub)
    m = len(w_basis)
    supp_c = sorted({j for r in face_rays for j, x in enumerate(r) if x})
    nvars = k + 2 * m  # mu split into positive and negative parts
    eqs = []
    for j in range(ncols):
        if j in supp_c:
            continue
        # (x + w)_j = 0 outside C's support
        row = [face_rays[i][j] for i in sub] + [b[j] for b in w_basis] + [-b[j] for b in w_basis]
        if any(row):
            eqs.append(row)
    # relint(D) is lambda > 0 since D is generated by its rays; (x+w)_j > 0
    # on supp(C) is a linear form, so each distinct form gets a slack
    forms = []
    for j in supp_c:
        f = [face_rays[i][j] for i in sub] + [b[j] for b in w_basis] + [-b[j] for b in w_basis]
        f = list(primitive(f))
        if f not in forms:
            forms.append(f)
    total = nvars + len(forms)
    rows = [r + [0] * len(forms) for r in eqs]
    strict = [[i] for i in range(k)]
    for idx, f in enumerate(forms):
        r = f + [0] * len(forms)
        r[nvars + idx] = -1
        rows.append(r)
        strict.append([nvars + idx])
    nonneg = list(range(total))
    return lp_feasible(rows, nonneg, strict, nvars=total) is not None


def classify_dependent_faces(face_rays: Sequence[Sequence[int]], w_basis: Sequence[Sequence[int]],
                             weight_coeffs: Sequence[Fraction] | None = None) -> DependenceData:
    """Split the proper faces of C into dependent and independent ones.

    Face D is C-dependent iff some x in relint(D) has x + W meeting relint(C).
    The active set I_D of an independent face lists the coordinates of
    supp(C) outside supp(D); a lattice point of C lies in dep(C) iff it has
    sum over I_D at least 1 for every maximal independent D.
    """
    if not face_rays:
        raise ConeError("face has no rays")
    ncols = len(face_rays[0])
    if w_basis:
        span_rank = rank([list(r) for r in face_rays])
        for b in w_basis:
            if rank([list(r) for r in face_rays] + [list(b)]) != span_rank:
                raise ConeError("W is not inside the span of the face")
            if weight_coeffs is not None and sum(c * x for c, x in zip(weight_coeffs, b)) != 0:
                raise ConeError("W is not inside the kernel of the weight")
    subs = _subfaces(face_rays)
    dependent, independent = [], []
    for d in subs:
        if w_basis and _in_relint_plus_w(face_rays, d, w_basis, ncols):
            dependent.append(d)
        else:
            independent.append(d)
    maximal = [d for d in independent if not any(d < e for e in independent)]
    supp_c = {j for r in face_rays for j, x in enumerate(r) if x}
    active = []
    for d in maximal:
        supp_d = {j for i in d for j, x in enumerate(face_rays[i]) if x}
        active.append(frozenset(supp_c - supp_d))
    key = lambda s: sorted(s)
    return DependenceData(tuple(sorted(dependent, key=key)), tuple(sorted(independent, key=key)),
                          tuple(sorted(maximal, key=key)), tuple(active))


def interior_point(face_rays: Sequence[Sequence[int]]) -> tuple[int, ...]:
    """Sum of the vertex rays (a relative-interior point)."""
    return tuple(sum(col) for col in zip(*face_rays))


def admissible_filter(v: Sequence[int], groups: Sequence[Sequence[int]]) -> bool:
    return _admissible_mask(_mask(v), _group_masks(groups))


__all__ = [
    "AdmissibleFace", "ConeError", "DependenceData", "RayCapExceeded", "SolutionCone",
    "brute_force_rays", "carrier", "carries_vertex_link", "classify_dependent_faces",
    "enumerate_vertex_rays", "interior_point", "is_admissible", "is_extreme",
    "maximal_admissible_faces", "admissible_filter",
]

"""Census of connected closed normal surfaces down to a given Euler characteristic.

Surfaces with quads are canonical (no vertex-linking components), so they are
enumerated in quad coordinates over the cone of quad vectors that lift to
closed surfaces, with chi read off an angle structure.  The cusp links are
added separately.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

from .cones import enumerate_vertex_rays, maximal_admissible_faces
from .counting import DEFAULT_POINT_CAP, lattice_points, parallel_map
from .normal import (
    DEFAULT_DISK_CAP,
    NormalVector,
    SurfaceComplex,
    closed_quad_equations,
    euler_char_standard,
    quad_euler_coefficients,
    quad_to_standard,
    vertex_links,
)
from .triangulation import AngleStructure, Triangulation, find_angle_structure


class CensusError(ValueError):
    pass


@dataclass(frozen=True)
class CensusSurface:
    vector: NormalVector
    euler: int
    orientable: bool
    vertex_link: bool = False

    @property
    def genus(self) -> int | None:
        return (2 - self.euler) // 2 if self.orientable else None


@dataclass
class CensusResult:
    min_euler: int
    surfaces: list[CensusSurface]
    rays: int
    faces: int
    lattice_points: int
    notes: list[str] = field(default_factory=list)

    def genus_tally(self, include_links: bool = False) -> Counter:
        c = Counter()
        for s in self.surfaces:
            if s.vertex_link and not include_links:
                continue
            if s.orientable:
                c[s.genus] += 1
        return c

    @property
    def nonorientable(self) -> list[CensusSurface]:
        return [s for s in self.surfaces if not s.orientable]

    def total(self, include_links: bool = False) -> int:
        return sum(1 for s in self.surfaces if include_links or not s.vertex_link)


def _face_points(args):
    rows, ncols, support, costs, bound, cap = args
    return lattice_points(rows, ncols, support, costs, 0, bound, cap)


def surface_census(tri: Triangulation, min_euler: int, angles: AngleStructure | None = None,
                   point_cap: int = DEFAULT_POINT_CAP, disk_cap: int = DEFAULT_DISK_CAP) -> CensusResult:
    if min_euler > 0:
        raise CensusError("min_euler must be <= 0")
    if not tri.is_ideal:
        raise CensusError("census needs an ideal triangulation")
    if angles is None:
        angles = find_angle_structure(tri, "strict") or find_angle_structure(tri, "partially_flat")
        if angles is None:
            raise CensusError("triangulation has no angle structure")
    system = closed_quad_equations(tri)
    rays = enumerate_vertex_rays(system.rows, system.ncols, system.admissibility_groups)
    faces = maximal_admissible_faces(rays, system.admissibility_groups)
    costs = [-c for c in quad_euler_coefficients(tri, angles)]
    jobs = [(system.rows, system.ncols, sorted(f.support), costs, -min_euler, point_cap) for f in faces]
    points = set()
    for chunk in parallel_map(_face_points, jobs):
        points.update(chunk)
    points.discard(tuple([0] * system.ncols))
    found: dict[tuple[int, ...], CensusSurface] = {}
    for q in sorted(points):
        v = quad_to_standard(tri, q)
        if v is None:
            raise CensusError("quad point does not lift to a closed surface")
        sc = SurfaceComplex(v, disk_cap)
        for comp in sc.components():
            e = [0] * len(v.entries)
            for d in comp:
                e[sc.disk_type[d]] += 1
            cv = NormalVector(tri, tuple(e))
            if cv.entries in found:
                continue
            chi = euler_char_standard(cv)
            if chi < min_euler:
                continue
            two_sided = SurfaceComplex(cv, disk_cap).is_two_sided()
            found[cv.entries] = CensusSurface(cv, int(chi), two_sided)
    surfaces = sorted(found.values(), key=lambda s: (-s.euler, s.vector.entries))
    links = []
    if min_euler <= 0:
        for vec, chi in vertex_links(tri):
            if chi >= min_euler:
                links.append(CensusSurface(vec, chi, tri.link_is_orientable(len(links)), True))
    return CensusResult(min_euler, links + surfaces, len(rays), len(faces), len(points))

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_triangulation
from surfcount.cones import (
    ConeError,
    RayCapExceeded,
    SolutionCone,
    brute_force_rays,
    carrier,
    carries_vertex_link,
    classify_dependent_faces,
    enumerate_vertex_rays,
    interior_point,
    is_extreme,
    maximal_admissible_faces,
)
from surfcount.normal import QUAD, STD, closed_quad_equations, matching_equations, vertex_link_vectors, weight_coefficients


def systems(max_cols=8):
    return st.integers(2, max_cols).flatmap(
        lambda n: st.lists(st.lists(st.integers(-2, 2), min_size=n, max_size=n), min_size=1, max_size=4)
        .map(lambda rows: (rows, n)))


@settings(max_examples=120, deadline=None)
@given(systems())
def test_double_description_matches_brute_force(system):
    rows, n = system
    rays = enumerate_vertex_rays(rows, n)
    assert rays == brute_force_rays(rows, n)
    assert all(is_extreme(rows, n, r) for r in rays)


@settings(max_examples=60, deadline=None)
@given(systems(6), st.sampled_from([((0, 1, 2),), ((0, 1), (2, 3)), ((1, 2, 3), (4, 5))]))
def test_admissible_pruning_matches_brute_force(system, groups):
    rows, n = system
    groups = tuple(g for g in groups if max(g) < n)
    pruned = enumerate_vertex_rays(rows, n, groups, prune=True)
    assert pruned == enumerate_vertex_rays(rows, n, groups, prune=False)
    assert pruned == brute_force_rays(rows, n, groups)


def test_figure_eight_standard_cone(fig8):
    ms = matching_equations(fig8, STD)
    rays = enumerate_vertex_rays(ms.rows, ms.ncols, ms.admissibility_groups)
    assert rays == brute_force_rays(ms.rows, ms.ncols, ms.admissibility_groups)
    # the only admissible vertex surface is the cusp torus
    assert rays == [vertex_link_vectors(fig8)[0].entries]


def test_random_triangulation_quad_cones():
    rng = random.Random(5)
    done = 0
    while done < 12:
        tri = random_triangulation(rng, rng.randint(1, 3))
        if not tri.is_valid():
            continue
        ms = matching_equations(tri, QUAD)
        assert enumerate_vertex_rays(ms.rows, ms.ncols, ms.admissibility_groups) == \
            brute_force_rays(ms.rows, ms.ncols, ms.admissibility_groups)
        done += 1


def test_ray_cap():
    with pytest.raises(RayCapExceeded):
        enumerate_vertex_rays([[1, 1, 1, -1, -1, -1]], 6, cap=3)


def test_solution_cone_caches(fig8):
    cone = SolutionCone.from_system(matching_equations(fig8, QUAD))
    assert cone.rays() is cone.rays()


def test_k13n585_closed_quad_faces(k13):
    system = closed_quad_equations(k13)
    rays = enumerate_vertex_rays(system.rows, system.ncols, system.admissibility_groups)
    faces = maximal_admissible_faces(rays, system.admissibility_groups)
    assert len(rays) == 24 and len(faces) == 27
    for f in faces:
        # faces are support closed and admissible
        assert all(f.contains(rays[i]) for i in f.rays)
        p = interior_point([rays[i] for i in f.rays])
        assert carrier(p, rays, system.rows).rays == f.rays


def test_carrier_rejects_bad_vectors():
    with pytest.raises(ConeError):
        carrier((1, -1), [(1, 0)])
    with pytest.raises(ConeError):
        carrier((1, 1), [(1, 1)], rows=[(1, 0)])


def test_carries_vertex_link(fig8):
    ms = matching_equations(fig8, STD)
    rays = enumerate_vertex_rays(ms.rows, ms.ncols, ms.admissibility_groups)
    [face] = maximal_admissible_faces(rays, ms.admissibility_groups)
    assert carries_vertex_link(face, vertex_link_vectors(fig8))


def test_dependence_on_triangle_face(lw_k13):
    face = lw_k13.face("C")
    rays = lw_k13.rays(face)
    dep = classify_dependent_faces(rays, face.wbasis, weight_coefficients(lw_k13.triangulation))
    names = face.vertices
    maximal = sorted(sorted(names[i] for i in d) for d in dep.maximal_independent)
    assert maximal == [["N23"], ["N4", "N7"]]
    # N4 and N7 alone sit inside the independent edge; the edges through N23
    # can be pushed into the interior along N4 - N7
    dependent = sorted(sorted(names[i] for i in d) for d in dep.dependent)
    assert dependent == [["N23", "N4"], ["N23", "N7"]]


def test_dependence_without_w_is_everything_independent():
    rays = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
    dep = classify_dependent_faces(rays, [])
    assert not dep.dependent
    assert len(dep.maximal_independent) == 3
    assert sorted(map(sorted, dep.active_sets)) == [[0], [1], [2]]


def test_dependence_rejects_w_outside_span():
    with pytest.raises(ConeError):
        classify_dependent_faces([(1, 0, 0), (0, 1, 0)], [(0, 0, 1)])
    with pytest.raises(ConeError):
        classify_dependent_faces([(1, 0), (0, 1)], [(1, -1)], weight_coeffs=[1, 2])

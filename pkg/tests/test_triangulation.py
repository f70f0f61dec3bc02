import random

import pytest

from conftest import FIGURE_EIGHT, K13N585, random_triangulation
from surfcount.isosig import IsoSigError, decode_isosig, encode_isosig
from surfcount.triangulation import (
    TriangulationError,
    check_angle_structure,
    find_angle_structure,
    homology_f2_check,
    homology_h1_integral,
    load_triangulation,
    parse_gluing_file,
    quad_type,
    to_gluing_text,
)


def test_quad_type_pairs_opposite_edges():
    for a in range(4):
        for b in range(4):
            if a != b:
                c, d = sorted(set(range(4)) - {a, b})
                assert quad_type(a, b) == quad_type(b, a) == quad_type(c, d)
    assert sorted({quad_type(0, k) for k in (1, 2, 3)}) == [0, 1, 2]


def test_figure_eight_facts(fig8):
    assert fig8.size == 2
    assert sorted(fig8.valences) == [6, 6]
    assert len(fig8.vertex_classes) == 1
    assert fig8.link_euler_characteristic(0) == 0
    assert fig8.link_is_orientable(0)
    assert fig8.is_orientable and fig8.is_valid()
    assert homology_h1_integral(fig8) == (1, [])
    assert homology_f2_check(fig8)["passes"]


def test_figure_eight_symmetric_angles(fig8):
    ang = find_angle_structure(fig8, "strict")
    assert ang is not None and ang.is_strict()
    assert check_angle_structure(fig8, ang)


def test_k13n585_signature_decodes(k13):
    assert k13.size == 13
    assert k13.is_orientable and k13.is_valid()
    assert len(k13.vertex_classes) == 1 and k13.link_euler_characteristic(0) == 0
    assert sum(k13.valences) == 6 * k13.size
    assert find_angle_structure(k13, "strict") is not None
    assert homology_f2_check(k13)["passes"]
    assert homology_h1_integral(k13) == (1, [])


@pytest.mark.parametrize("sig", [FIGURE_EIGHT, K13N585])
def test_canonical_signatures_roundtrip(sig):
    assert encode_isosig(decode_isosig(sig)) == sig


def test_random_signature_roundtrip():
    rng = random.Random(7)
    for _ in range(40):
        tri = random_triangulation(rng, rng.randint(1, 4))
        sig = encode_isosig(tri)
        again = decode_isosig(sig)
        assert again.size == tri.size
        assert encode_isosig(again) == sig
        assert sorted(again.valences) == sorted(tri.valences)


def test_gluing_file_roundtrip(fig8):
    text = to_gluing_text(fig8)
    assert parse_gluing_file(text) == fig8
    assert load_triangulation(text) == fig8


def test_gluing_file_errors():
    with pytest.raises(TriangulationError, match="expected 'tets"):
        parse_gluing_file("tet 1\n0:0123 0:0123 0:0123 0:0123\n")
    with pytest.raises(TriangulationError, match="declares 2"):
        parse_gluing_file("tets 2\n0:1023 0:1023 0:0132 0:0132\n")
    with pytest.raises(TriangulationError, match="bad permutation"):
        parse_gluing_file("tets 1\n0:1123 0:1023 0:0132 0:0132\n")
    with pytest.raises(TriangulationError, match="unglued"):
        parse_gluing_file("tets 1\n- - - -\n")


def test_bad_signature():
    with pytest.raises(IsoSigError):
        decode_isosig("garbage!!")


def test_angle_structure_needs_ideal():
    tri = parse_gluing_file("tets 1 kind=finite\n- - - -\n")
    with pytest.raises(TriangulationError):
        find_angle_structure(tri)
    with pytest.raises(ValueError):
        find_angle_structure(load_triangulation(FIGURE_EIGHT), "loose")

"""Regenerate the LW fixtures in tests/data from the K13n585 triangulation.

The surfaces are found by the census; the face flags and W bases written to
the files reproduce the lw-complex reported for this triangulation and are
modelling input, not certified output.
"""
from __future__ import annotations

import itertools
import math
import sys
from pathlib import Path

from surfcount.cones import carrier, enumerate_vertex_rays
from surfcount.isosig import decode_isosig
from surfcount.normal import (
    IncompatibleSum, closed_quad_equations, format_vector, is_connected, to_quad, weight,
)
from surfcount.surfaces import surface_census

SIG = "nvLAAvAPQkcdfgfhkmjlmklmwcadtfaaoaedrg"
OUT = Path(__file__).resolve().parent.parent / "tests" / "data"


def compatible(a, b):
    try:
        a + b
        return True
    except IncompatibleSum:
        return False


def main() -> int:
    tri = decode_isosig(SIG)
    census = surface_census(tri, -8)
    system = closed_quad_equations(tri)
    rays = enumerate_vertex_rays(system.rows, system.ncols, system.admissibility_groups)
    rayset = set(rays)

    def face_size(*vs):
        s = tuple(sum(x) for x in zip(*[to_quad(v).entries for v in vs]))
        return len(carrier(s, rays).rays)

    vertex = [s.vector for s in census.surfaces if not s.vertex_link and to_quad(s.vector).entries in rayset]
    g2 = [v for v in vertex if census_euler(census, v) == -2]
    g3 = [v for v in vertex if census_euler(census, v) == -4]

    triangle = None
    for c in g3:
        for a, b in itertools.combinations(g2, 2):
            if not (compatible(a, b) and compatible(a, c) and compatible(b, c)):
                continue
            if weight(a) != weight(b) or face_size(a, b, c) != 3:
                continue
            if is_connected(a + b) or not (is_connected(a + c) and is_connected(b + c)):
                continue
            if all(is_connected(x) for x in (a.scale(2) + c, a + b + c, b.scale(2) + c)):
                triangle = (a, b, c)
                break
        if triangle:
            break
    n4, n7, n23 = triangle
    partners = [d for d in g2 if d not in (n4, n7) and compatible(d, n23) and face_size(d, n23) == 2
                and is_connected(d + n23) and is_connected(d.scale(2) + n23)]
    n12 = partners[-1]
    print(f"edge partners for the genus-3 vertex: {len(partners)}; using the last in census order")

    gcd_pair = disjoint_pair = None
    for a, b in itertools.combinations(g2, 2):
        if not compatible(a, b) or face_size(a, b) != 2:
            continue
        pattern = [(is_connected(a.scale(u) + b.scale(n - u)), math.gcd(u, n - u) == 1)
                   for n in range(2, 9) for u in range(1, n)]
        if gcd_pair is None and all(x == y for x, y in pattern):
            gcd_pair = (a, b)
        if disjoint_pair is None and not any(x for x, _ in pattern):
            disjoint_pair = (a, b)

    head = ["lw-complex v1", f"triangulation {SIG}", "coords std7t"]
    OUT.mkdir(parents=True, exist_ok=True)

    def write(name, surfaces, faces, wb=(), note=""):
        lines = list(head)
        if note:
            lines.append(f"provenance {note}")
        lines += [f"surface {k} {format_vector(v.entries)}" for k, v in surfaces]
        lines += faces
        lines += [f"wbasis {f} {format_vector(w)}" for f, w in wb]
        (OUT / name).write_text("\n".join(lines) + "\n", encoding="utf-8")

    diff = tuple(x - y for x, y in zip(n4.entries, n7.entries))
    write("k13n585.lw", [("N4", n4), ("N7", n7), ("N12", n12), ("N23", n23)], [
        "face C vertices=N23,N4,N7 complete=true essential=true lw=true",
        "face E vertices=N4,N7 complete=true essential=true lw=true",
        "face B vertices=N12,N23 complete=true essential=true lw=true",
        "face N12 vertices=N12 complete=true essential=true lw=true",
        "face N23 vertices=N23 complete=true essential=true lw=true",
        "face N4 vertices=N4 complete=false essential=true lw=true",
        "face N7 vertices=N7 complete=false essential=true lw=true",
        "face D4 vertices=N23,N4 complete=false essential=true lw=true",
        "face D7 vertices=N23,N7 complete=false essential=true lw=true",
    ], [("C", diff), ("E", diff)], "triangle C and edge B with W_C = W_E spanned by N4 - N7")
    for name, (f, g), note in [("edge_gcd.lw", gcd_pair, "two genus-2 rays; uF + vG connected iff gcd(u,v) = 1"),
                               ("edge_disjoint.lw", disjoint_pair, "two genus-2 rays that are disjoint")]:
        write(name, [("F", f), ("G", g)], [
            "face C vertices=F,G complete=true essential=true lw=true",
            "face F vertices=F complete=true essential=true lw=true",
            "face G vertices=G complete=true essential=true lw=true",
        ], note=note)
    write("single_genus2.lw", [("F", gcd_pair[0])],
          ["face F vertices=F complete=true essential=true lw=true"], note="one genus-2 ray")
    write("single_genus3.lw", [("H", n23)],
          ["face H vertices=H complete=true essential=true lw=true"], note="one genus-3 ray")
    print("wrote", ", ".join(sorted(p.name for p in OUT.glob("*.lw"))))
    return 0


def census_euler(census, v):
    for s in census.surfaces:
        if s.vector.entries == v.entries:
            return s.euler
    raise KeyError(v)


if __name__ == "__main__":
    sys.exit(main())

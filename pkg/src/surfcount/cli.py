"""Command-line front end: ``surfcount <group> <command> ...``.

Exit codes: 0 success, 2 invalid input or unsupported request, 3 resource cap.
"""
from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .cones import RayCapExceeded, enumerate_vertex_rays, maximal_admissible_faces
from .counting import DEFAULT_POINT_CAP, PointCapExceeded, assemble_bm, load_lw
from .genus import (
    analysis_report,
    format_report,
    genus_counts,
    loglog_csv,
    loglog_svg,
    read_indexed_csv,
    read_series_csv,
    smooth,
    write_series_csv,
)
from .gf import (
    fit_short_gf,
    gf_expand,
    gf_normalize,
    parse_gf,
    smooth_asymptotics,
    to_quasipolynomial,
)
from .normal import (
    DEFAULT_DISK_CAP,
    QUAD,
    STD,
    DiskCapExceeded,
    closed_quad_equations,
    format_vector,
    matching_equations,
)
from .surfaces import surface_census
from .triangulation import (
    find_angle_structure,
    homology_f2_check,
    homology_h1_integral,
    load_triangulation,
)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_CAP = 3

CAP_ERRORS = (PointCapExceeded, DiskCapExceeded, RayCapExceeded)


def _emit(args, name: str, text: str) -> None:
    """Print, and also write to --out DIR when given."""
    sys.stdout.write(text)
    if getattr(args, "out", None):
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / name).write_text(text, encoding="utf-8")


def _read_source(text: str) -> str:
    p = Path(text)
    if p.exists() and p.is_file():
        return p.read_text(encoding="utf-8")
    return text


def _frac(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# tri


def cmd_tri_info(args) -> int:
    tri = load_triangulation(args.source)
    vals = sorted(tri.valences, reverse=True)
    cusps = len(tri.vertex_classes)
    chis = ",".join(str(tri.link_euler_characteristic(v)) for v in range(cusps))
    noun = "cusp" if cusps == 1 else "cusps"
    lines = [f"{tri.size} tetrahedra; {len(vals)} edges valence {','.join(map(str, vals))}; "
             f"{cusps} {noun}, link χ={chis}"]
    if tri.is_ideal:
        strict = find_angle_structure(tri, "strict") is not None
        f2 = homology_f2_check(tri)
        lines.append(f"{tri.size} tetrahedra; strict angle structure: {'yes' if strict else 'no'}; "
                     f"F₂ check: {'pass' if f2['passes'] else 'fail'}")
    lines.append(f"orientable: {'yes' if tri.is_orientable else 'no'}")
    _emit(args, "tri_info.txt", "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_tri_homology(args) -> int:
    tri = load_triangulation(args.source)
    free, torsion = homology_h1_integral(tri)
    parts = [f"Z^{free}" if free != 1 else "Z"] if free else []
    parts += [f"Z/{t}" for t in torsion]
    text = f"H1 = {' + '.join(parts) if parts else '0'}\n"
    if tri.is_ideal:
        f2 = homology_f2_check(tri)
        text += (f"dim H1(M; F2) = {f2['h1_f2']}; dim H1(boundary; F2) = {f2['h1_boundary_f2']}; "
                 f"F₂ check: {'pass' if f2['passes'] else 'fail'}\n")
    _emit(args, "homology.txt", text)
    return EXIT_OK


def cmd_tri_angles(args) -> int:
    tri = load_triangulation(args.source)
    kind = "partially_flat" if args.flat else "strict"
    ang = find_angle_structure(tri, kind)
    if ang is None:
        _emit(args, "angles.txt", f"no {kind.replace('_', ' ')} angle structure\n")
        return EXIT_OK
    lines = [f"{kind.replace('_', ' ')} angle structure (units of pi)"]
    for t, row in enumerate(ang.angles):
        lines.append(f"tet {t}: " + " ".join(_frac(a) for a in row))
    _emit(args, "angles.txt", "\n".join(lines) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# surfaces and cones


def cmd_surfaces(args) -> int:
    tri = load_triangulation(args.source)
    res = surface_census(tri, args.max_euler, point_cap=args.cap_points, disk_cap=args.cap_disks)
    if args.format == "csv":
        lines = ["euler,orientable,genus,vertex_link,vector"]
        for s in res.surfaces:
            g = "" if s.genus is None else str(s.genus)
            lines.append(f"{s.euler},{int(s.orientable)},{g},{int(s.vertex_link)},\"{s.vector}\"")
        _emit(args, "surfaces.csv", "\n".join(lines) + "\n")
        return EXIT_OK
    without = res.genus_tally(False)
    lines = [f"connected closed normal surfaces with chi >= {args.max_euler}"]
    for g in sorted(without):
        lines.append(f"genus {g}: {without[g]}")
    links = sum(1 for x in res.surfaces if x.vertex_link)
    lines.append(f"vertex links: {links}")
    lines.append(f"nonorientable: {len(res.nonorientable)}")
    lines.append(f"total (excluding vertex links): {res.total(False)}")
    lines.append(f"total (including vertex links): {res.total(True)}")
    lines.append(f"vertex rays: {res.rays}; maximal admissible faces: {res.faces}; lattice points: {res.lattice_points}")
    _emit(args, "surfaces.txt", "\n".join(lines) + "\n")
    return EXIT_OK


def _system(tri, coords: str):
    if coords == QUAD:
        return closed_quad_equations(tri)
    return matching_equations(tri, STD)


def cmd_cones_vertices(args) -> int:
    tri = load_triangulation(args.source)
    system = _system(tri, args.coords)
    rays = enumerate_vertex_rays(system.rows, system.ncols, system.admissibility_groups)
    lines = [f"{len(rays)} admissible vertex rays ({args.coords})"]
    for i, r in enumerate(rays):
        lines.append(f"{i}: {format_vector(r, args.coords)}")
    _emit(args, "vertices.txt", "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_cones_faces(args) -> int:
    tri = load_triangulation(args.source)
    system = _system(tri, args.coords)
    rays = enumerate_vertex_rays(system.rows, system.ncols, system.admissibility_groups)
    faces = maximal_admissible_faces(rays, system.admissibility_groups)
    lines = [f"{len(faces)} maximal admissible faces over {len(rays)} vertex rays ({args.coords})"]
    for i, f in enumerate(faces):
        lines.append(f"{i}: rays {','.join(map(str, f.rays))}")
    _emit(args, "faces.txt", "\n".join(lines) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# counting and analysis


def cmd_count_bm(args) -> int:
    lw = load_lw(args.lw)
    res = assemble_bm(lw, args.terms, cap=args.cap_points)
    csv_text = write_series_csv(res.series, "b")
    gf_text = f"GF: {res.gf.to_text() if res.gf else 'no fit within budget; try more --terms'}\n"
    if args.format == "csv":
        _emit(args, "bm.csv", csv_text)
        if args.out:
            (Path(args.out) / "bm_gf.txt").write_text(gf_text, encoding="utf-8")
        return EXIT_OK
    lines = [f"b(-2n) for n = 1..{args.terms}", ", ".join(map(str, res.series)), gf_text.rstrip()]
    if res.gf:
        lines.append(f"pretty: {res.gf.pretty()}")
    for name in sorted(res.per_face_gf):
        g = res.per_face_gf[name]
        lines.append(f"face {name}: {g.to_text() if g else 'no fit within budget'}")
    _emit(args, "bm.txt", "\n".join(lines) + "\n")
    if args.out:
        (Path(args.out) / "bm.csv").write_text(csv_text, encoding="utf-8")
    return EXIT_OK


def cmd_count_ag(args) -> int:
    lw = load_lw(args.lw)
    gs = genus_counts(lw, args.max_genus, cap=args.cap_points, disk_cap=args.cap_disks)
    if args.format == "csv":
        _emit(args, "ag.csv", write_series_csv(gs.values, "a"))
        return EXIT_OK
    lines = [f"connected surfaces by n = g - 1, n = 1..{gs.horizon}", ", ".join(map(str, gs.values))]
    for name in sorted(gs.per_face):
        lines.append(f"face {name}: {', '.join(map(str, gs.per_face[name]))}")
    _emit(args, "ag.txt", "\n".join(lines) + "\n")
    if args.out:
        (Path(args.out) / "ag.csv").write_text(write_series_csv(gs.values, "a"), encoding="utf-8")
    return EXIT_OK


def cmd_analyze_genus(args) -> int:
    values = read_series_csv(_read_source(args.series))
    rep = analysis_report(values, guard=args.guard, burn_in=args.burn_in)
    _emit(args, "analysis.txt", format_report(rep))
    if args.out:
        abar = smooth(values)
        out = Path(args.out)
        (out / "abar.csv").write_text(write_series_csv(abar, "abar"), encoding="utf-8")
        (out / "loglog.csv").write_text(loglog_csv(abar), encoding="utf-8")
        (out / "loglog.svg").write_text(loglog_svg(abar), encoding="utf-8")
    return EXIT_OK


# ---------------------------------------------------------------------------
# generating functions


def _load_gf(text: str):
    return parse_gf(_read_source(text).strip())


def cmd_gf_expand(args) -> int:
    g = _load_gf(args.gf)
    coeffs = gf_expand(g, args.terms + 1)[1:]
    if args.format == "csv":
        _emit(args, "expand.csv", write_series_csv([_frac(c) for c in coeffs], "a"))
    else:
        _emit(args, "expand.txt", ", ".join(_frac(c) for c in coeffs) + "\n")
    return EXIT_OK


def cmd_gf_fit(args) -> int:
    first, values = read_indexed_csv(_read_source(args.series))
    if first < 0:
        raise ValueError("series index must be nonnegative")
    series = [0] * first + list(values)
    g = fit_short_gf(series, guard=args.guard)
    _emit(args, "fit.txt", f"GF: {g.to_text()}\npretty: {g.pretty()}\n")
    return EXIT_OK


def cmd_gf_quasipoly(args) -> int:
    q = to_quasipolynomial(gf_normalize(_load_gf(args.gf)))
    _emit(args, "quasipoly.txt", f"period: {q.period}\ndegree: {q.degree}\n{q.describe()}\n")
    return EXIT_OK


def cmd_gf_asymp(args) -> int:
    q = to_quasipolynomial(gf_normalize(_load_gf(args.gf)))
    prof = smooth_asymptotics(q)
    if prof.is_zero:
        _emit(args, "asymp.txt", "partial sums vanish\n")
    else:
        _emit(args, "asymp.txt", f"d = {prof.exponent}; c = {_frac(prof.constant)}\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", metavar="DIR", help="also write outputs into DIR")
    common.add_argument("--format", choices=("text", "csv"), default="text")
    common.add_argument("--cap-points", type=_positive, default=DEFAULT_POINT_CAP,
                        help=f"lattice points per slice or face (default {DEFAULT_POINT_CAP})")
    common.add_argument("--cap-disks", type=_positive, default=DEFAULT_DISK_CAP,
                        help=f"normal disks per surface (default {DEFAULT_DISK_CAP})")
    common.add_argument("--threads", type=_positive, help="worker processes (sets SURFCOUNT_THREADS)")

    p = argparse.ArgumentParser(prog="surfcount", description="Count normal surfaces in cusped 3-manifolds.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="group", required=True)

    tri = sub.add_parser("tri", help="triangulation reports").add_subparsers(dest="cmd", required=True)
    for name, fn, text in (("info", cmd_tri_info, "summary"), ("homology", cmd_tri_homology, "H1"),
                           ("angles", cmd_tri_angles, "angle structure")):
        s = tri.add_parser(name, parents=[common], help=text)
        s.add_argument("source", help="isosig, gluing file, or path")
        s.set_defaults(func=fn)
        if name == "angles":
            s.add_argument("--flat", action="store_true", help="allow zero angles")

    s = sub.add_parser("surfaces", parents=[common], help="census of connected closed normal surfaces")
    s.add_argument("source")
    s.add_argument("--max-euler", type=int, required=True, metavar="-2k",
                   help="lowest Euler characteristic to include")
    s.set_defaults(func=cmd_surfaces)

    cones = sub.add_parser("cones", help="solution cone").add_subparsers(dest="cmd", required=True)
    for name, fn in (("vertices", cmd_cones_vertices), ("faces", cmd_cones_faces)):
        s = cones.add_parser(name, parents=[common])
        s.add_argument("source")
        s.add_argument("--coords", choices=(STD, QUAD), default=QUAD,
                       help="standard coordinates, or quad coordinates of closed surfaces (default)")
        s.set_defaults(func=fn)

    count = sub.add_parser("count", help="counts from an LW complex").add_subparsers(dest="cmd", required=True)
    s = count.add_parser("bm", parents=[common], help="b(-2n) and its generating function")
    s.add_argument("lw")
    s.add_argument("--terms", type=_positive, default=20)
    s.set_defaults(func=cmd_count_bm)
    s = count.add_parser("ag", parents=[common], help="connected surfaces by genus")
    s.add_argument("lw")
    s.add_argument("--max-genus", type=_positive, default=11)
    s.set_defaults(func=cmd_count_ag)

    an = sub.add_parser("analyze", help="series analysis").add_subparsers(dest="cmd", required=True)
    s = an.add_parser("genus", parents=[common], help="regularity, Lambert series and growth of a~")
    s.add_argument("series", help="CSV n,a with n from 1")
    s.add_argument("--guard", type=_positive, default=10)
    s.add_argument("--burn-in", type=int)
    s.set_defaults(func=cmd_analyze_genus)

    gf = sub.add_parser("gf", help="generating function utilities").add_subparsers(dest="cmd", required=True)
    s = gf.add_parser("expand", parents=[common])
    s.add_argument("gf", help="'P = [..]; Q = [(b,m),..]' or a file holding it")
    s.add_argument("--terms", type=_positive, default=20)
    s.set_defaults(func=cmd_gf_expand)
    s = gf.add_parser("fit", parents=[common])
    s.add_argument("series", help="CSV n,value")
    s.add_argument("--guard", type=_positive, default=10)
    s.set_defaults(func=cmd_gf_fit)
    for name, fn in (("quasipoly", cmd_gf_quasipoly), ("asymp", cmd_gf_asymp)):
        s = gf.add_parser(name, parents=[common])
        s.add_argument("gf")
        s.set_defaults(func=fn)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "threads", None):
        os.environ["SURFCOUNT_THREADS"] = str(args.threads)
    try:
        return args.func(args)
    except CAP_ERRORS as e:
        print(f"surfcount: resource cap reached: {e}", file=sys.stderr)
        return EXIT_CAP
    except (ValueError, OSError) as e:
        print(f"surfcount: {e}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())

from fractions import Fraction

import pytest

from conftest import DATA, FIGURE_EIGHT, K13N585
from surfcount.cli import main
from surfcount.genus import read_series_csv


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_tri_info_figure_eight(capsys):
    code, out, _ = run(capsys, "tri", "info", FIGURE_EIGHT)
    assert code == 0
    assert "2 tetrahedra; 2 edges valence 6,6; 1 cusp, link χ=0" in out
    assert "strict angle structure: yes; F₂ check: pass" in out


def test_tri_info_k13n585(capsys):
    code, out, _ = run(capsys, "tri", "info", K13N585)
    assert code == 0 and "13 tetrahedra; strict angle structure: yes; F₂ check: pass" in out


def test_tri_info_garbage(capsys):
    code, _, err = run(capsys, "tri", "info", "garbage!!")
    assert code == 2 and "invalid character" in err


def test_tri_homology_and_angles(capsys):
    assert run(capsys, "tri", "homology", FIGURE_EIGHT)[1].startswith("H1 = Z\n")
    out = run(capsys, "tri", "angles", FIGURE_EIGHT)[1]
    assert "tet 0: 1/3 1/3 1/3" in out


def test_surfaces_links_only(capsys):
    code, out, _ = run(capsys, "surfaces", FIGURE_EIGHT, "--max-euler", "0")
    assert code == 0
    assert "total (excluding vertex links): 0" in out
    assert "total (including vertex links): 1" in out


def test_surfaces_csv(capsys):
    code, out, _ = run(capsys, "surfaces", FIGURE_EIGHT, "--max-euler", "-2", "--format", "csv")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "euler,orientable,genus,vertex_link,vector"
    assert lines[1].startswith("0,1,1,1,")


def test_cones(capsys):
    out = run(capsys, "cones", "vertices", FIGURE_EIGHT, "--coords", "std7t")[1]
    assert out.splitlines()[0] == "1 admissible vertex rays (std7t)"
    out = run(capsys, "cones", "faces", K13N585)[1]
    assert out.splitlines()[0] == "27 maximal admissible faces over 24 vertex rays (quad3t)"


def test_count_bm_csv_and_gf(capsys, tmp_path):
    code, out, _ = run(capsys, "count", "bm", str(DATA / "edge_gcd.lw"), "--terms", "40",
                       "--format", "csv", "--out", str(tmp_path))
    assert code == 0
    assert read_series_csv(out) == [n + 1 for n in range(1, 41)]
    assert (tmp_path / "bm_gf.txt").read_text() == "GF: P = [0,2,-1]; Q = [(1,2)]\n"


def test_count_bm_text(capsys):
    out = run(capsys, "count", "bm", str(DATA / "k13n585.lw"), "--terms", "6")[1]
    assert "GF: no fit within budget" in out and "2, 3, 4, 5, 6, 7" in out


def test_count_ag_and_analyze_roundtrip(capsys, tmp_path):
    code, out, _ = run(capsys, "count", "ag", str(DATA / "edge_gcd.lw"), "--max-genus", "31",
                       "--format", "csv", "--out", str(tmp_path))
    assert code == 0
    assert read_series_csv(out)[:5] == [2, 1, 2, 2, 4]
    code, out, _ = run(capsys, "analyze", "genus", str(tmp_path / "ag.csv"), "--out", str(tmp_path))
    assert code == 0
    assert "summary: regular; p(n)=n+1; Lambert short; s=2" in out
    for name in ("abar.csv", "loglog.csv", "loglog.svg", "analysis.txt"):
        assert (tmp_path / name).exists()


def test_count_ag_refuses_w(capsys):
    code, _, err = run(capsys, "count", "ag", str(DATA / "k13n585.lw"), "--max-genus", "3")
    assert code == 2 and "W" in err


def test_gf_commands(capsys, tmp_path):
    s = "P = [0,6,2,-2,3,-1]; Q = [(2,1),(1,3)]"
    assert run(capsys, "gf", "expand", s, "--terms", "4")[1] == "6, 20, 46, 89\n"
    out = run(capsys, "gf", "quasipoly", s)[1]
    assert "period: 2" in out and "n = 1 mod 2: (2/3)n^3 + (9/4)n^2 + (7/3)n + 3/4" in out
    assert run(capsys, "gf", "asymp", "P = [1]; Q = [(2,2)]")[1] == "d = 2; c = 1/8\n"
    rows = ["n,b"] + [f"{n},{Fraction(2, 3) * n ** 3 + Fraction(9, 4) * n ** 2 + Fraction(7, 3) * n + Fraction(7 + (-1) ** n, 8)}"
                      for n in range(1, 41)]
    path = tmp_path / "conway.csv"
    path.write_text("\n".join(rows) + "\n")
    assert run(capsys, "gf", "fit", str(path))[1].startswith("GF: P = [0,6,2,-2,3,-1]; Q = [(1,3),(2,1)]\n")


def test_gf_errors(capsys):
    assert run(capsys, "gf", "expand", "P = [1; Q")[0] == 2
    assert run(capsys, "gf", "fit", "n,a\n1,1\n2,2\n")[0] == 2


def test_caps(capsys):
    code, _, err = run(capsys, "count", "bm", str(DATA / "edge_gcd.lw"), "--terms", "10", "--cap-points", "2")
    assert code == 3 and "cap" in err
    code, _, _ = run(capsys, "count", "ag", str(DATA / "edge_gcd.lw"), "--max-genus", "4", "--cap-disks", "10")
    assert code == 3


def test_missing_file(capsys):
    assert run(capsys, "count", "bm", "/nonexistent.lw")[0] == 2


def test_argparse_usage_errors(capsys):
    with pytest.raises(SystemExit) as e:
        main(["count", "bm"])
    assert e.value.code == 2
    with pytest.raises(SystemExit):
        main(["count", "bm", "x.lw", "--terms", "0"])


def test_output_independent_of_threads(capsys, monkeypatch):
    monkeypatch.setenv("SURFCOUNT_THREADS", "1")
    a = run(capsys, "count", "bm", str(DATA / "edge_gcd.lw"), "--terms", "8")[1]
    b = run(capsys, "count", "bm", str(DATA / "edge_gcd.lw"), "--terms", "8", "--threads", "2")[1]
    assert a == b

import pytest

from mlpit.cli import main
from mlpit.formula import to_text
from mlpit.hitting import read_points
from mlpit.oracle import build_corpus


def run(capsys, *argv):
    code = main(list(map(str, argv)))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def d3_points(tmp_path, capsys):
    path = tmp_path / "h.txt"
    code, out, _ = run(capsys, "gen-hs", "--class", "d3", "--n", 6, "--delta", 0.25, "--out", path)
    assert code == 0 and out.startswith("wrote ")
    return path


def test_pit_zero_formula(tmp_path, capsys, d3_points):
    f = tmp_path / "zero.txt"
    f.write_text("# class=d3 n=6\n(x1)*(x2) + (-1*x1)*(x2)\n")
    code, out, _ = run(capsys, "pit", "--formula", f, "--hs", d3_points)
    assert code == 0
    assert out.splitlines()[0] == "zero-on-H"


def test_pit_nonzero_corpus_formula(tmp_path, capsys, d3_points):
    item = build_corpus("d3", {"n": 6, "M_max": 3, "nonzero_only": True}, 1, seed=4).items[0]
    f = tmp_path / "f.txt"
    f.write_text(to_text(item.formula) + "\n")
    code, out, _ = run(capsys, "pit", "--formula", f, "--hs", d3_points, "--jobs", 1)
    assert code == 0
    first = out.splitlines()[0]
    assert first.startswith("nonzero witness=")
    witness = tuple(int(v) for v in first.split()[1].split("=")[1].split(","))
    assert witness in set(read_points(d3_points).points)
    assert item.formula.eval(witness) != 0


def test_gen_hs_is_reproducible(tmp_path, capsys):
    outs = []
    for name in ("a.txt", "b.txt"):
        run(capsys, "gen-hs", "--class", "d3", "--n", 5, "--delta", 0.4, "--out", tmp_path / name)
        outs.append((tmp_path / name).read_bytes())
    assert outs[0] == outs[1]
    assert outs[0].startswith(b"n=5 ") and b"# mlpit" in outs[0]


def test_gen_hs_stdout_matches_file(tmp_path, capsys):
    run(capsys, "gen-hs", "--class", "d4", "--n", 4, "--M", 1, "--S", 2, "--lenient", "--out", tmp_path / "x")
    code, out, _ = run(capsys, "gen-hs", "--class", "d4", "--n", 4, "--M", 1, "--S", 2, "--lenient")
    assert code == 0 and out == (tmp_path / "x").read_text()


def test_gen_hs_regular(capsys):
    code, out, _ = run(capsys, "gen-hs", "--class", "regular", "--n", 4, "--d", 2, "--delta", 0.005, "--S", 16)
    assert code == 0 and out.startswith("n=4 ")
    code, _, err = run(capsys, "gen-hs", "--class", "regular", "--n", 4, "--d", 2, "--delta", 0.4)
    assert code == 1 and "delta" in err


def test_lowerbound_rejects_large_sets(tmp_path, capsys):
    H = tmp_path / "cube.txt"
    run(capsys, "gen-hs", "--class", "d3", "--n", 3, "--delta", 0.4, "--out", H)
    assert len(read_points(H)) >= 8
    code, _, err = run(capsys, "lowerbound", "--hs", H)
    assert code == 1 and "2^n" in err


def test_lowerbound_small_set(tmp_path, capsys):
    H = tmp_path / "h.txt"
    H.write_text("n=3 p=7\n0,0,0\n1,2,3\n")
    code, out, _ = run(capsys, "lowerbound", "--hs", H, "--engine", "python")
    assert code == 0
    assert "# n=3 |H|=2" in out


def test_reduce_outputs(tmp_path, capsys):
    f = tmp_path / "f.txt"
    f.write_text("(x1*x2 + x3)*(x4)\n")
    code, out, _ = run(capsys, "reduce", "--formula", f, "--class", "d4", "--tau", 2)
    assert code == 0
    assert "derive x1: delta 2 -> 0" in out
    code, out, _ = run(capsys, "reduce", "--formula", f, "--class", "d3", "--tau", 2)
    assert code == 1
    g = tmp_path / "g.txt"
    g.write_text("(x1 + x2 + x3)*(x4)\n")
    code, out, _ = run(capsys, "reduce", "--formula", g, "--class", "d3", "--tau", 2)
    assert code == 0 and "(x4)" in out
    code, _, err = run(capsys, "reduce", "--formula", g, "--class", "d3")
    assert code == 2 and "exactly one" in err


def test_reduce_regular(tmp_path, capsys):
    f = tmp_path / "r.txt"
    f.write_text("((x1 + x2)*(x3 + 1)) + ((x2 + 1)*(x4 + x1))\n")
    code, out, _ = run(capsys, "reduce", "--formula", f, "--class", "regular")
    assert code == 0 and "# case=case1 tag=small-degree" in out


def test_roabp_dump(tmp_path, capsys):
    f = tmp_path / "f.txt"
    f.write_text("(x1 + x2)*(x3) + (x4)\n")
    code, out, _ = run(capsys, "roabp", "--formula", f, "--order", "4,3,2,1")
    assert code == 0 and out.strip()
    code, _, err = run(capsys, "roabp", "--formula", f, "--order", "1,2")
    assert code == 1 and "x3" in err


def test_usage_and_domain_errors(tmp_path, capsys):
    assert run(capsys, "gen-hs", "--class", "d5", "--n", 3)[0] == 2
    assert run(capsys, "gen-hs", "--class", "d3", "--n", 3)[0] == 2
    assert run(capsys, "pit", "--formula", tmp_path / "nope", "--hs", tmp_path / "nope")[0] == 1
    assert run(capsys, "gen-hs", "--class", "d3", "--n", 3, "--delta", 0.3, "--p", 9)[0] == 2
    code, _, err = run(capsys, "gen-hs", "--class", "d4", "--n", 4, "--M", 4, "--S", 8)
    assert code == 1 and err.startswith("mlpit: error:")


def test_selftest_subset(capsys):
    code, out, _ = run(capsys, "selftest", "--quick", "--only", "6,8")
    lines = out.splitlines()
    assert code == 0
    assert len(lines) == 3 and all(ln.startswith("PASS") for ln in lines[:2])
    assert lines[-1] == "2 passed, 0 failed, 0 skipped"


def test_selftest_n_max_skips(capsys):
    code, out, _ = run(capsys, "selftest", "--quick", "--only", "1", "--n-max", 1)
    assert code == 0 and out.startswith("SKIP")

import csv
import io

import pytest

from planar_oracles import cli
from planar_oracles.constants import INF
from planar_oracles.generators import generate
from planar_oracles.shortest_paths import apsp_oracle


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture(scope="module")
def graph_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "g.plgr"
    assert cli.main(["gen", "--kind", "grid", "--n", "49", "--seed", "3",
                     "-o", str(path)]) == 0
    return path


def test_gen_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.plgr", tmp_path / "b.plgr"
    for p in (a, b):
        code, _, _ = run(capsys, "gen", "--kind", "delaunay", "--n", "40",
                         "--seed", "7", "-o", str(p))
        assert code == 0
    assert a.read_bytes() == b.read_bytes()


def test_gen_bad_params(tmp_path, capsys):
    code, _, err = run(capsys, "gen", "--kind", "grid", "--n", "40",
                       "--wmin", "5", "--wmax", "2",
                       "-o", str(tmp_path / "x.plgr"))
    assert code == 2
    assert "error:" in err


@pytest.mark.parametrize("oracle,flag,val", [
    ("linear", "--p", "4"), ("fastprep", "--r", "16"),
    ("fastquery", "--r", "16")])
def test_build_query_round_trip(graph_file, tmp_path, capsys,
                                oracle, flag, val):
    ofile = tmp_path / f"{oracle}.plor"
    code, out, _ = run(capsys, "build", "-i", str(graph_file),
                       "--oracle", oracle, flag, val, "-o", str(ofile))
    assert code == 0 and oracle in out

    g = generate("grid", 49, 3)
    truth = apsp_oracle(g)
    pairs = [(0, 0), (0, 48), (17, 5), (33, 33), (48, 0)]
    pfile = tmp_path / "pairs.txt"
    pfile.write_text("# header comment\n"
                     + "".join(f"{u} {v}\n" for u, v in pairs))
    code, out, _ = run(capsys, "query", "-i", str(ofile),
                       "--pairs", str(pfile))
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == len(pairs)
    for (u, v), line in zip(pairs, lines):
        want = truth[u, v]
        assert line == ("inf" if want >= INF else str(want))
    assert lines[0] == "0" and lines[3] == "0"


def test_verify_all_exact(graph_file, capsys):
    for oracle, flag, val in [("linear", "--p", "4"),
                              ("fastprep", "--r", "16"),
                              ("fastquery", "--r", "16")]:
        code, out, err = run(capsys, "verify", "-i", str(graph_file),
                             "--oracle", oracle, flag, val, "--all")
        assert code == 0, err
        assert "2401/2401 pairs exact" in out


def test_verify_detects_mismatch(graph_file, capsys, monkeypatch):
    build, query = cli._ORACLES["linear"]
    monkeypatch.setitem(cli._ORACLES, "linear",
                        (build, lambda o, u, v: query(o, u, v) + 1))
    code, out, err = run(capsys, "verify", "-i", str(graph_file),
                         "--oracle", "linear", "--p", "4", "--count", "20")
    assert code == 1
    assert "MISMATCH" in err


def test_space_flag(graph_file, tmp_path, capsys):
    ofile = tmp_path / "s.plor"
    code, out, _ = run(capsys, "build", "-i", str(graph_file),
                       "--oracle", "fastprep", "--space", "4000",
                       "-o", str(ofile))
    assert code == 0


def test_missing_param(graph_file, tmp_path, capsys):
    with pytest.raises(SystemExit):
        cli.main(["build", "-i", str(graph_file), "--oracle", "fastprep",
                  "-o", str(tmp_path / "x.plor")])


def test_bench_csv(graph_file, capsys):
    code, out, _ = run(capsys, "bench", "-i", str(graph_file),
                       "--space", "6000", "--queries", "40")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["oracle"] for r in rows] == ["linear", "fastprep", "fastquery"]
    for r in rows:
        assert int(r["bytes_stored"]) > 0
        assert float(r["mean_query_touches"]) > 0
        assert float(r["mean_query_us"]) > 0

import subprocess
import sys

import pytest

from pmisolate.cli import main
from pmisolate.generate import parallel_loops, torus_cycle
from pmisolate.psg import load_psg, save_psg


@pytest.fixture
def tc4(tmp_path):
    path = tmp_path / "tc4.psg"
    save_psg(torus_cycle(4), path)
    return str(path)


def test_gen_writes_psg(tmp_path):
    out = tmp_path / "g.psg"
    assert main(["gen", "genus-g-random", "--seed", "7", "--set", "n=12", "-o", str(out)]) == 0
    g = load_psg(out)
    assert g.n == 12 and g.genus == 1


def test_gen_list_parameter(capsys):
    assert main(["gen", "torus-cycle", "--set", "length=6", "--set", "pairs=1,2"]) == 0
    text = capsys.readouterr().out
    assert "cross T1" in text and "cross T2" in text


def test_gen_bad_parameter(capsys):
    assert main(["gen", "planar-grid", "--set", "bogus=1"]) == 2
    assert main(["gen", "planar-grid", "--set", "rows"]) == 2
    assert main(["gen", "torus-cycle", "--set", "length=3"]) == 2
    assert "error" in capsys.readouterr().err


def test_unknown_flag_prints_usage(capsys):
    assert main(["verify", "--bogus"]) == 2
    assert "usage:" in capsys.readouterr().err


def test_missing_subcommand():
    assert main([]) == 2


def test_enumerate(tc4, capsys):
    assert main(["enumerate", tc4]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert [line.split()[3] for line in lines[:2]] == ["sign=10", "sign=00"]
    assert lines[-1] == "# 2 perfect matchings"


def test_weigh_tables(tc4, capsys):
    assert main(["weigh", tc4, "--tight-scale"]) == 0
    out = capsys.readouterr().out
    assert "# w_side\n1 0\n2 0\n3 0\n4 -1\n" in out
    assert "# family mode=oracle-assisted members=1" in out
    assert main(["weigh", tc4, "--mode", "constructive", "--all-members"]) == 0
    assert capsys.readouterr().out.count("# w_p[") > 1


def test_decide(tc4, capsys):
    assert main(["decide", tc4]) == 0
    out = capsys.readouterr().out
    assert "perfect matching: yes" in out and "member p=2 det nonzero" in out


def test_decide_without_perfect_matching(tmp_path, capsys):
    path = tmp_path / "p3.psg"
    path.write_text("psg 1\ngenus 0\nvertices 3\nedge 1 1 2\nedge 2 2 3\n"
                    "rotation 1 1\nrotation 2 1 2\nrotation 3 2\n")
    assert main(["decide", str(path)]) == 0
    assert "no perfect matching" in capsys.readouterr().out


def test_decide_rejects_non_bipartite(k5, tmp_path, capsys):
    path = tmp_path / "k5.psg"
    save_psg(k5, path)
    assert main(["decide", str(path)]) == 2
    assert "not bipartite" in capsys.readouterr().err


def test_parse_error_exit_code(tmp_path, capsys):
    path = tmp_path / "bad.psg"
    path.write_text("psg 1\ngenus 0\nvertices 2\nedge 1 1 x\n")
    assert main(["enumerate", str(path)]) == 2
    assert "line 4" in capsys.readouterr().err
    assert main(["draw", str(tmp_path / "missing.psg")]) == 2


def test_verify_genus0_corpus(capsys):
    assert main(["verify", "--corpus", "genus0"]) == 0
    lines = capsys.readouterr().out.splitlines()
    lemma1 = [line for line in lines if line.split()[1] == "lemma1"]
    assert lemma1 and all(line.split()[2] == "PASS" for line in lemma1)


def test_verify_fail_exit_code(tmp_path, capsys):
    path = tmp_path / "loops.psg"
    save_psg(parallel_loops(2, 2), path)
    assert main(["verify", str(path)]) == 0
    assert main(["verify", "--ablate", str(path)]) == 1
    assert "lemma1-ablated FAIL" in capsys.readouterr().out


def test_verify_usage_errors(tc4):
    assert main(["verify"]) == 2
    assert main(["verify", tc4, "--corpus", "genus0"]) == 2
    assert main(["verify", "--corpus", "nope"]) == 2


def test_draw_formats(tc4, tmp_path, capsys):
    assert main(["draw", tc4, "--format", "dot"]) == 0
    assert capsys.readouterr().out.startswith("graph planar {")
    out = tmp_path / "d.svg"
    assert main(["draw", tc4, "-o", str(out)]) == 0
    assert out.read_text().startswith("<svg")


def test_module_entry_point(tc4):
    res = subprocess.run([sys.executable, "-m", "pmisolate.cli", "decide", tc4], capture_output=True, text=True)
    assert res.returncode == 0 and "perfect matching: yes" in res.stdout

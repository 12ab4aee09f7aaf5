import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from recdom import cli, laws
from recdom.report import LawReport

SAMPLES = Path(__file__).resolve().parent.parent / "samples"


def run(*argv):
    buf = io.StringIO()
    code = cli.main([str(a) for a in argv], buf)
    return code, buf.getvalue()


def test_solve_nat_json_counts():
    code, text = run("solve", SAMPLES / "nat.dom", "--rank", "3", "--format", "json")
    assert code == 0
    doc = json.loads(text)
    (t,) = doc["types"]
    assert t["name"] == "nat" and t["total"] == 7
    assert [(r["rank"], r["count"]) for r in t["ranks"]] == [(0, 1), (1, 2), (2, 2), (3, 2)]
    assert all(e["rank"] == r["rank"] for r in t["ranks"] for e in r["elements"])
    assert doc["laws"] == []


def test_solve_text_and_type_filter():
    code, text = run("solve", SAMPLES / "evenodd.dom", "--rank", "2", "--type", "odd")
    assert code == 0
    assert text.splitlines()[0].startswith("odd: ")
    assert "even:" not in text


def test_solve_mutual_reports_pairing_identity():
    code, text = run("solve", SAMPLES / "evenodd.dom", "--rank", "3", "--format", "json")
    doc = json.loads(text)
    assert code == 0
    assert [l["name"] for l in doc["laws"]] == ["pairing identity"]
    assert doc["laws"][0]["verdict"] == "PASS"


def test_solve_dot():
    code, text = run("solve", SAMPLES / "nat.dom", "--rank", "2", "--format", "dot")
    assert code == 0
    assert text.lstrip().startswith("digraph") and "->" in text


def test_bad_input_exits_1(capsys):
    code, _ = run("solve", SAMPLES / "bad.dom")
    assert code == 1
    assert "unbound variable b at 1:19" in capsys.readouterr().err


def test_missing_file_and_usage_errors_exit_1(tmp_path):
    assert run("solve", tmp_path / "nope.dom")[0] == 1
    assert run("check", "--builtin", "nonsense")[0] == 1
    assert run("frobnicate")[0] == 1
    assert run("check", "--builtin", "bekic", "--rank", "-1")[0] == 1


def test_law_failure_exits_2(monkeypatch):
    def broken(params=(), bound=4):
        rep = LawReport("pairing identity", "even/odd")
        rep.fail("forced")
        return rep
    monkeypatch.setattr(laws, "bekic_report", broken)
    code, text = run("check", "--builtin", "bekic")
    assert code == 2
    assert "FAIL" in text and "forced" in text and "0 passed, 1 failed, 0 skipped" in text


def test_check_json_shape():
    code, text = run("check", "--builtin", "bekic", "--format", "json", "--seed", "5", "--rank", "3")
    assert code == 0
    doc = json.loads(text)
    assert doc["seed"] == 5 and doc["rank"] == 3
    (law,) = doc["laws"]
    assert {"name", "instance", "verdict", "seed"} <= set(law)
    assert law["verdict"] == "PASS" and law["seed"] == 5


def test_check_file_suites():
    code, text = run("check", SAMPLES / "session.dom", "--rank", "2", "--suite", "unfolding")
    assert code == 0
    lines = text.splitlines()
    assert all(l.startswith("PASS") for l in lines[:-1])
    assert all("unfolding" in l for l in lines[:-1])


def test_check_is_deterministic():
    a = run("check", "--builtin", "parameter", "--format", "json", "--seed", "3")
    b = run("check", "--builtin", "parameter", "--format", "json", "--seed", "3")
    assert a == b and a[0] == 0


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "recdom", "solve", str(SAMPLES / "nat.dom"), "--rank", "1"],
                          capture_output=True, text=True, timeout=60)
    assert proc.returncode == 0
    assert proc.stdout.startswith("nat: 3 compact elements at rank <= 1")


@pytest.mark.parametrize("name", ["nat.dom", "evenodd.dom", "session.dom"])
def test_samples_solve(name):
    assert run("solve", SAMPLES / name, "--rank", "2")[0] == 0

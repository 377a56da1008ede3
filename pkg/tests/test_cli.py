import json
import subprocess
import sys

import pytest

from syswork.cli import main, parse_grid


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_cohomology(capsys):
    code, doc = run(capsys, "cohomology", "heisenberg", "--m", "1")
    assert code == 0 and doc["schema"] == 1
    assert doc["betti"] == [1, 2, 2, 1]
    assert doc["cup_zero"]["holds"]


def test_cohomology_torsion(capsys):
    code, doc = run(capsys, "cohomology", "rp2_simplicial")
    assert code == 0 and doc["degrees"][2]["torsion"] == [2]


def test_massey(capsys):
    code, doc = run(capsys, "massey", "heisenberg", "--m", "1")
    assert code == 0 and doc["spanning"]["sufficient"]
    assert sum(t["nontrivial"] for t in doc["triples"]) >= 2


def test_minima(capsys):
    code, doc = run(capsys, "minima", "lattice_halves_l1", "--dual")
    assert code == 0
    assert doc["lambdas"] == [1.0] * 4
    assert all(p >= 1 for p in doc["transference_products"])


def test_systoles(capsys):
    code, doc = run(capsys, "systoles", "heisenberg", "--param", "t=4")
    assert code == 0
    assert abs(doc["stsys"]["2"]["value"] - 2) < 1e-6
    assert abs(doc["iq"]["2"]["value"] - 0.5) < 1e-9


def test_systoles_grid(capsys):
    code, doc = run(capsys, "systoles", "heisenberg", "--grid", "t=1/4,1,4")
    assert code == 0 and len(doc["points"]) == 3


def test_verify_pass(capsys, tmp_path):
    out = tmp_path / "r.json"
    code, _ = run(capsys, "verify", "thm22", "heisenberg", "--seed", "7", "--out", str(out))
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["status"] == "pass" and doc["schema"] == 1


def test_verify_grid(capsys):
    code, doc = run(capsys, "verify", "thm22", "heisenberg", "--grid", "t=-2:2:9")
    assert code == 0 and len(doc["reports"]) == 9
    assert doc["iq_trend"] == "nonincreasing"


@pytest.mark.parametrize("argv", [
    ("verify", "thm22", "torus3"),
    ("verify", "thm222", "heisenberg7"),
    ("verify", "thm22", "no_such_model"),
    ("verify", "thm22", "heisenberg", "--grid", "t"),
    ("verify", "thm22", "heisenberg", "--param", "t=abc"),
    ("systoles", "torus_simplicial"),
])
def test_exit_two(capsys, argv):
    assert main(list(argv)) == 2


def test_unknown_selector(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "thm99", "heisenberg"])
    assert exc.value.code == 2


def test_violation_exit_one(capsys, monkeypatch):
    from syswork import pipeline
    from syswork.geometry import Bracket

    real = pipeline.verify_chain_thm22

    def broken(spec):
        rep = real(spec)
        rep.lines.append(pipeline.Line("forced", Bracket.exact(2.0), Bracket.exact(1.0)))
        rep.status = "pass"
        return rep.finalize()

    monkeypatch.setitem(pipeline._VERIFIERS, "thm22", broken)
    code, doc = run(capsys, "verify", "thm22", "heisenberg")
    assert code == 1 and doc["status"] == "violated"


def test_parse_grid():
    name, vals = parse_grid("t=-2:2:5")
    assert name == "t" and len(vals) == 5 and abs(vals[0] - 0.01) < 1e-15
    assert parse_grid("t=1/4,4")[1] == [0.25, 4]


def test_subprocess_deterministic(tmp_path):
    outs = []
    for i in range(2):
        p = tmp_path / f"{i}.json"
        subprocess.run([sys.executable, "-m", "syswork.cli", "verify", "thm22", "heisenberg",
                        "--seed", "7", "--out", str(p)], check=True)
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]

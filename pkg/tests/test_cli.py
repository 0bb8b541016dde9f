import json

import pytest

from hadiff.cli import main
from hadiff.grid import run_grid, dumps


def run(argv):
    return main([str(a) for a in argv])


@pytest.fixture
def arr351(tmp_path):
    p = tmp_path / "a.json"
    assert run(["gen", "--n", 3, "--r", 5, "--seed", 0, "--out", p]) == 0
    return p


def test_gen_is_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(["gen", "--n", 3, "--r", 6, "--seed", 4, "--out", a])
    run(["gen", "--n", 3, "--r", 6, "--seed", 4, "--out", b])
    assert a.read_bytes() == b.read_bytes()
    assert run(["gen", "--n", 3, "--r", 2]) == 3


def test_check_generic(arr351, capsys):
    assert run(["check-generic", arr351]) == 0
    assert json.loads(capsys.readouterr().out) == {"generic": True}


def test_check_generic_witness(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"n": 2, "forms": [[1, 0], [0, 1], [2, 0]]}))
    assert run(["check-generic", bad]) == 2
    assert json.loads(capsys.readouterr().out) == {"generic": False, "witness": [0, 2]}


def test_basis_and_saito_check(arr351, tmp_path):
    ops = tmp_path / "ops.json"
    assert run(["basis", arr351, "--m", 3, "--out", ops]) == 0
    obj = json.loads(ops.read_text())
    assert obj["case"] == "Free_eq" and obj["exp"] == {"3": 10}
    out = tmp_path / "sh.json"
    assert run(["saito-check", arr351, ops, "--out", out]) == 0
    assert json.loads(out.read_text())["basis"] is True
    assert run(["basis", arr351, "--m", 1]) == 3  # non-free


def test_saito_check_rejects_nonmember(arr351, tmp_path):
    ops = tmp_path / "ops.json"
    run(["basis", arr351, "--m", 3, "--out", ops])
    obj = json.loads(ops.read_text())
    obj["operators"][0] = {"order": 3, "terms": [{"dalpha": [3, 0, 0],
                                                  "poly": {"nvars": 3, "terms": [{"e": [0, 0, 0], "c": "1"}]}}]}
    ops.write_text(json.dumps(obj))
    assert run(["saito-check", arr351, ops]) == 3


def test_resolve_and_report(arr351, tmp_path):
    res = tmp_path / "res.json"
    assert run(["resolve", arr351, "--m", 1, "--verify", "--out", res]) == 0
    obj = json.loads(res.read_text())
    assert obj["ranks"] == [3, 4, 2] and obj["report"]["ok"]
    assert run(["report", res, "--out-dir", tmp_path / "plots"]) == 0
    svgs = sorted(p.name for p in (tmp_path / "plots").iterdir())
    assert svgs == ["res_betti.svg", "res_hilbert.svg"]
    first = (tmp_path / "plots" / "res_betti.svg").read_bytes()
    run(["report", res, "--out-dir", tmp_path / "plots"])
    assert (tmp_path / "plots" / "res_betti.svg").read_bytes() == first
    assert run(["resolve", arr351, "--m", 3]) == 3


def test_jet(arr351, tmp_path):
    out = tmp_path / "jet.json"
    assert run(["jet", arr351, "--m", 1, "--verify", "--out", out]) == 0
    obj = json.loads(out.read_text())
    assert obj["transpose_equal"] and obj["report"]["ok"]
    assert run(["report", out, "--out-dir", tmp_path]) == 0


def test_input_errors(tmp_path):
    assert run(["check-generic", tmp_path / "missing.json"]) == 3
    assert run(["nonsense"]) == 3
    junk = tmp_path / "junk.json"
    junk.write_text("{not json")
    assert run(["basis", junk, "--m", 1]) == 3
    assert run(["grid", junk]) == 3


def test_grid_empty_and_negative_control(tmp_path, capsys):
    cfg = tmp_path / "g.json"
    cfg.write_text(json.dumps({"points": []}))
    assert run(["grid", cfg]) == 0
    cfg.write_text(json.dumps({"points": [
        {"n": 2, "r": 3, "m": 1},
        {"n": 2, "r": 3, "m": 1, "forms": [[1, 0], [0, 1], [3, 0]]}]}))
    out = tmp_path / "rep.json"
    assert run(["grid", cfg, "--out", out]) == 2
    recs = json.loads(out.read_text())["records"]
    assert recs[0]["ok"] and not recs[1]["generic"] and recs[1]["witness"] == [0, 2]
    assert "FAIL" in capsys.readouterr().err


def test_grid_deterministic_across_workers():
    cfg = {"points": [{"n": 2, "r": 4, "m": 2}, {"n": 3, "r": 5, "m": 1, "jet": False},
                      {"n": 3, "r": 4, "m": 3}], "seed": 1}
    assert dumps(run_grid(cfg, workers=1)) == dumps(run_grid(cfg, workers=2))

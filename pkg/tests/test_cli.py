import csv
import io
import json

import pytest

from finite_blt.cli import SWEEP_COLUMNS, main, parse_range


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_range():
    assert parse_range("8..128") == [8, 16, 32, 64, 128]
    assert parse_range("8..32/8") == [8, 16, 24, 32]
    assert parse_range("5,3,5") == [3, 5]
    assert parse_range("4..16,20") == [4, 8, 16, 20]
    assert parse_range(7) == [7]
    for bad in ["", "8..x", "16..8", "0", "4..8/0"]:
        with pytest.raises(ValueError):
            parse_range(bad)


def test_blt_sweep_bcgp(capsys):
    code, out, _ = run(capsys, "blt-sweep", "--family", "bcgp", "--N", "8..32")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert tuple(rows[0]) == SWEEP_COLUMNS
    assert [int(r["N"]) for r in rows] == [8, 16, 32]
    betas = [float(r["beta"]) for r in rows]
    assert betas == sorted(betas)
    for r in rows:
        assert float(r["certificate"]) <= float(r["beta"])


def test_blt_sweep_random_seeds_deterministic(capsys, monkeypatch):
    monkeypatch.setenv("FINITE_BLT_WORKERS", "3")
    _, first, _ = run(capsys, "blt-sweep", "--family", "random", "--seeds", "3", "--N", "8..16")
    monkeypatch.setenv("FINITE_BLT_WORKERS", "1")
    _, second, _ = run(capsys, "blt-sweep", "--family", "random", "--seeds", "3", "--N", "8..16")
    assert first == second
    rows = list(csv.DictReader(io.StringIO(first)))
    assert len(rows) == 6
    assert all(float(r["certificate"]) <= float(r["beta"]) for r in rows)


def test_blt_sweep_gaussian(capsys):
    code, out, _ = run(capsys, "blt-sweep", "--family", "gaussian", "--tau", "0.3", "--N", "8..64")
    rows = list(csv.DictReader(io.StringIO(out)))
    alphas = [float(r["alpha"]) for r in rows]
    assert max(alphas) < 2 * min(alphas)
    assert float(rows[-1]["A"]) < float(rows[0]["A"])


def test_blt_sweep_json_and_rectangular(capsys, tmp_path):
    out = tmp_path / "s.json"
    code, _, _ = run(capsys, "blt-sweep", "--family", "box", "--N", "8", "--M", "4,8", "--format", "json", "--out", str(out))
    assert code == 0
    rows = json.loads(out.read_text())
    assert [(r["M"], r["N"]) for r in rows] == [(4, 8), (8, 8)]
    assert rows[1]["beta"] == pytest.approx(16)


def test_make_generator_and_certify(capsys, tmp_path):
    path = tmp_path / "g.json"
    assert run(capsys, "make-generator", "--family", "bcgp", "--N", "16", "--out", str(path))[0] == 0
    code, out, _ = run(capsys, "certify", "--in", str(path))
    assert code == 0
    rep = json.loads(out)
    assert set(rep) >= {"J", "delta", "certificate", "beta", "ratio"}
    assert rep["certificate"] <= rep["beta"]


def test_certify_rectangular(capsys, tmp_path):
    path = tmp_path / "g.json"
    run(capsys, "make-generator", "--family", "random", "--N", "8", "--M", "24", "--seed", "4", "--out", str(path))
    code, out, _ = run(capsys, "certify", "--in", str(path))
    rep = json.loads(out)
    assert code == 0 and rep["tiles"] == 3 and rep["certificate"] <= rep["beta"]


def test_quantitative_single_and_sweep(capsys):
    code, out, _ = run(capsys, "quantitative", "--family", "bcgp", "--N", "200", "--Q", "1", "--R", "1", "--recenter")
    assert code == 0
    rep = json.loads(out)
    assert rep["recentered"] and rep["jump_set_size"] >= rep["promised_size"]
    code, out, _ = run(capsys, "quantitative", "--N", "200", "--Q", "1,2", "--R", "1", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [int(r["Q"]) for r in rows] == [1, 2]


def test_quantitative_precondition_exit_code(capsys):
    code, _, err = run(capsys, "quantitative", "--N", "200", "--Q", "13")
    assert code == 2 and "Q" in err
    code, _, _ = run(capsys, "quantitative", "--N", "100")
    assert code == 2


def test_config_errors_exit_2(capsys, tmp_path):
    assert run(capsys, "blt-sweep", "--N", "8..x")[0] == 2
    assert run(capsys, "blt-sweep", "--family", "nope", "--N", "8")[0] == 2
    assert run(capsys, "blt-sweep")[0] == 2
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"N": "8", "bogus": 1}))
    code, _, err = run(capsys, "--config", str(cfg), "blt-sweep")
    assert code == 2 and "bogus" in err
    assert run(capsys, "certify", "--in", str(tmp_path / "missing.json"))[0] == 2


def test_config_supplies_defaults(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"family": "box", "N": "4..8"}))
    code, out, _ = run(capsys, "--config", str(cfg), "blt-sweep")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["family"] for r in rows] == ["box", "box"]
    # explicit flags win
    code, out, _ = run(capsys, "--config", str(cfg), "blt-sweep", "--N", "16")
    assert [r["N"] for r in csv.DictReader(io.StringIO(out))] == ["16"]


def test_gaussian_on_grid_zero_rejected(capsys):
    assert run(capsys, "make-generator", "--family", "gaussian", "--N", "4", "--tau", "0.25")[0] == 2


def test_theorem_violation_exit_code(capsys, monkeypatch):
    from finite_blt import cli
    from finite_blt.errors import TheoremViolation

    def boom(*a, **k):
        raise TheoremViolation("forced")

    monkeypatch.setattr(cli, "sandwich_check", boom)
    assert run(capsys, "blt-sweep", "--N", "8")[0] == 3


def test_self_test(capsys):
    code, out, _ = run(capsys, "self-test")
    assert code == 0
    assert "FAIL" not in out and out.count("PASS") >= 8

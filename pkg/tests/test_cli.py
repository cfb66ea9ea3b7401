import csv
import json

import pytest

from univalent_toeplitz.cli import (
    EXIT_OK,
    EXIT_USAGE,
    EXIT_VIOLATION,
    RunManifest,
    UsageError,
    exit_code_for,
    main,
    write_atomic,
)

KOEBE_I = '{"variant": "named", "named_id": "koebe_i"}'

REPORT_KEYS = [
    "experiment_id", "title", "objective", "class_id", "sense", "kind", "domain", "best_value",
    "argmax", "paper_target", "deviation", "samples_used", "runtime", "bound", "violations",
    "label", "witness", "ties", "secondary", "notes",
]


def read_csv(text):
    return list(csv.DictReader(text.splitlines()))


def test_coeffs_rows(capsys):
    assert main(["coeffs", KOEBE_I, "--order", "5"]) == EXIT_OK
    rows = read_csv(capsys.readouterr().out)
    got = [(int(r["n"]), float(r["re"]), float(r["im"])) for r in rows]
    assert got[1:4] == [(2, 0, 2), (3, -3, 0), (4, 0, -4)]


def test_coeffs_identity_and_robertson(capsys, tmp_path):
    main(["coeffs", '{"variant": "named", "named_id": "identity"}', "--order", "4"])
    rows = read_csv(capsys.readouterr().out)
    assert [float(r["re"]) for r in rows] == [1, 0, 0, 0]
    spec = tmp_path / "t.json"
    spec.write_text('{"variant": "typically_real", "atoms": [[1, 0.5]]}')
    main(["coeffs", f"@{spec}", "--order", "4", "--format", "json"])
    payload = json.loads(capsys.readouterr().out)
    assert payload["coeffs"][2] == {"n": 3, "re": pytest.approx(0, abs=1e-15), "im": 0.0}


def test_coeffs_malformed_spec(capsys):
    assert main(["coeffs", "{bad"]) == EXIT_USAGE
    assert main(["coeffs", '{"variant": "named", "named_id": "nope"}']) == EXIT_USAGE
    assert main(["coeffs", '{"variant": "starlike", "atoms": [[0.3, 1.0]]}']) == EXIT_USAGE
    assert "error" in capsys.readouterr().err


def test_toeplitz_outputs(capsys):
    main(["toeplitz", KOEBE_I, "--n", "2", "--q", "3"])
    assert json.loads(capsys.readouterr().out)["abs_value"] == pytest.approx(84)
    main(["toeplitz", '{"variant": "named", "named_id": "identity"}', "--n", "1", "--q", "3"])
    assert json.loads(capsys.readouterr().out)["value_re"] == pytest.approx(1)
    main(["toeplitz", '{"variant": "named", "named_id": "log_map"}', "--n", "2", "--q", "2", "--format", "csv"])
    row = read_csv(capsys.readouterr().out)[0]
    assert float(row["value_re"]) == pytest.approx(1 / 4 - 1 / 9)


def test_run_empty_manifest(tmp_path, capsys):
    manifest = tmp_path / "m.json"
    out = tmp_path / "out" / "run.json"
    manifest.write_text(json.dumps({"experiments": [], "output": str(out)}))
    assert main(["run", "--manifest", str(manifest)]) == EXIT_OK
    payload = json.loads(out.read_text())
    assert payload["experiments"] == []
    assert payload["summary"] == {"count": 0, "violations": 0, "missed_targets": [], "passed": True}


def test_run_unknown_id(tmp_path, capsys):
    assert main(["run", "E99", "--out", str(tmp_path / "r.json")]) == EXIT_USAGE
    assert not (tmp_path / "r.json").exists()


def test_run_bad_manifest(tmp_path, capsys):
    bad = tmp_path / "m.json"
    bad.write_text('{"experiments": ["E1"], "colour": 3}')
    assert main(["run", "--manifest", str(bad)]) == EXIT_USAGE
    bad.write_text("[")
    assert main(["run", "--manifest", str(bad)]) == EXIT_USAGE
    with pytest.raises(UsageError):
        RunManifest(experiments=["E17"])


def test_run_golden_layout(tmp_path, capsys):
    out = tmp_path / "run.json"
    code = main(["run", "E12", "--resolution", "101", "--samples", "200", "--out", str(out), "--format", "csv"])
    assert code == EXIT_OK
    payload = json.loads(out.read_text())
    assert list(payload) == ["schema_version", "seed", "experiments", "summary"]
    assert payload["schema_version"] == 1
    rep = payload["experiments"][0]
    assert list(rep) == REPORT_KEYS
    assert rep["best_value"] == pytest.approx(1.25, abs=1e-8)
    rows = read_csv((tmp_path / "run.csv").read_text())
    assert rows[0]["experiment_id"] == "E12"
    # 17 significant digits survive the round trip
    assert float(rows[0]["best_value"]) == rep["best_value"]
    table = capsys.readouterr().out
    assert "E12" in table and "PASS" in table


def test_exit_code_precedence():
    def payload(violations, missed):
        return {"summary": {"violations": violations, "missed_targets": missed}}

    assert exit_code_for(payload(0, [])) == 0
    assert exit_code_for(payload(0, ["E1"])) == 1
    assert exit_code_for(payload(2, ["E1"])) == 3


def test_region_outputs(tmp_path, capsys):
    base = tmp_path / "a23"
    assert main(["region", "--n", "2", "--m", "3", "--out", str(base)]) == EXIT_OK
    assert "0 escapes out of 1000" in capsys.readouterr().out
    rows = read_csv((tmp_path / "a23.csv").read_text())
    pts = {(float(r["x"]), float(r["y"])) for r in rows}
    assert (-2.0, 3.0) in pts and (2.0, 3.0) in pts
    assert json.loads((tmp_path / "a23.json").read_text())["n"] == 2
    assert main(["region", "--n", "2", "--m", "2", "--out", str(tmp_path / "a22")]) == EXIT_OK
    assert len(read_csv((tmp_path / "a22.csv").read_text())) == 2


def test_verify_lemmas(tmp_path, capsys):
    out = tmp_path / "lemmas.csv"
    code = main(["verify-lemmas", "--samples", "2000", "--format", "csv", "--out", str(out)])
    assert code == EXIT_OK
    rows = read_csv(out.read_text())
    assert {r["oracle"] for r in rows} >= {"janteng", "k_functional"}
    assert all(int(r["violations"]) == 0 for r in rows)


def test_violation_exit_code(monkeypatch, tmp_path, capsys):
    import univalent_toeplitz.cli as cli

    real = cli.sweep

    def broken(name, samples, seed):
        r = real(name, samples, seed)
        r.violations = 1
        return r

    monkeypatch.setattr(cli, "sweep", broken)
    assert main(["verify-lemmas", "--samples", "10"]) == EXIT_VIOLATION


def test_write_atomic_leaves_no_temp_files(tmp_path):
    target = tmp_path / "deep" / "x.txt"
    write_atomic(target, "hello")
    write_atomic(target, "world")
    assert target.read_text() == "world"
    assert [p.name for p in target.parent.iterdir()] == ["x.txt"]

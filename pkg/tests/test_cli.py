import json
import subprocess
import sys

import pytest

from tscc.cli import main


def test_verify_passes(capsys):
    assert main(["verify", "--d", "4"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out
    for name in ("logical_qubits", "hypercycle_decomposition", "schedule_maximal", "maximal_fixed_check_rank"):
        assert f"PASS {name}" in out


def test_verify_reports_bad_distance(capsys):
    assert main(["verify", "--d", "2"]) == 2
    assert "FAIL construction" in capsys.readouterr().out


def test_decode_json(capsys):
    assert main(["decode", "--d", "4", "--mode", "maximal", "--eps", "0", "--trials", "100", "--seed", "1"]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["failures"] == 0 and rec["trials"] == 100 and rec["mode"] == "maximal"


def test_decode_rejects_bad_eps(capsys):
    assert main(["decode", "--d", "4", "--mode", "partial", "--eps", "2", "--trials", "1"]) == 1


@pytest.mark.parametrize("argv", [[], ["frobnicate"], ["decode", "--d", "4"], ["sweep", "--mode", "bogus"]])
def test_usage_errors(argv, capsys):
    assert main(argv) == 1
    assert "usage" in capsys.readouterr().err


def test_sweep_writes_results(tmp_path, capsys):
    out = tmp_path / "s.jsonl"
    csv = tmp_path / "s.csv"
    code = main(["sweep", "--mode", "partial", "--distances", "4", "8", "--eps", "0.1", "0.3",
                 "--max-trials", "100", "--target-failures", "50", "--out", str(out), "--csv", str(csv)])
    assert code == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 4
    assert csv.read_text().startswith("d,eps,trials")
    assert "threshold estimate" in capsys.readouterr().err


def test_sweep_from_config_file(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"mode": "maximal", "distances": [4], "eps_grid": [0.2], "max_trials": 50}))
    assert main(["sweep", "--config", str(cfg), "--quiet"]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["mode"] == "maximal" and rec["trials"] == 50


def test_sweep_rejects_unsorted_grid(capsys):
    assert main(["sweep", "--mode", "partial", "--eps", "0.3", "0.1", "--distances", "4"]) == 1


def test_correctability_subcommand(capsys):
    assert main(["correctability", "--distances", "4", "--eps", "0", "1", "--max-trials", "20", "--quiet"]) == 0
    recs = [json.loads(x) for x in capsys.readouterr().out.splitlines()]
    assert [r["rate"] for r in recs] == [0.0, 1.0]
    assert all(r["trials"] == 20 for r in recs)


def test_export_lattice(tmp_path):
    out = tmp_path / "lat.json"
    assert main(["export-lattice", "--d", "4", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["hypergraph"]["num_qubits"] == 48
    assert main(["export-lattice", "--d", "6"]) == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "tscc", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip()

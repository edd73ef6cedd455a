import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from gmeprob.cli import CSV_HEADER, main
from gmeprob.states import dump_density_matrix, make_ghz, projector


def run(argv):
    out = io.StringIO()
    code = main(argv, out=out)
    return code, out.getvalue()


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def parse_report(text):
    return dict(line.split(": ", 1) for line in text.splitlines() if ": " in line)


def test_eval_ghz_q0():
    code, text = run(["eval", "--state", "ghz", "--n", "3", "--criterion", "q0"])
    report = parse_report(text)
    assert code == 0
    assert float(report["value"]) == pytest.approx(0.5, abs=1e-12)
    assert report["detected"] == "yes"


def test_eval_w_q1():
    code, text = run(["eval", "--state", "w", "--n", "3", "--criterion", "q1"])
    report = parse_report(text)
    assert float(report["value"]) == pytest.approx(1.0, abs=1e-12) and report["detected"] == "yes"


def test_eval_maximally_mixed():
    code, text = run(["eval", "--state", "ghz", "--n", "3", "--q", "1", "--criterion", "q0"])
    report = parse_report(text)
    assert float(report["value"]) == pytest.approx(-0.375, abs=1e-12) and report["detected"] == "no"


def test_eval_verbose_lists_elements():
    code, text = run(["eval", "--state", "ghz", "--n", "2", "--criterion", "q0", "-v", "--format", "json"])
    doc = json.loads(text)
    assert {tuple(e) for e in doc["required_elements"]} == {(0, 3), (1, 1), (2, 2)}


def test_eval_hadamard_basis_dicke():
    code, text = run(["eval", "--state", "dicke", "--n", "4", "--m", "2", "--criterion", "q2", "--basis", "comp"])
    assert float(parse_report(text)["value"]) == pytest.approx(2.0, abs=1e-12)
    code, text = run(["eval", "--state", "ghz", "--n", "3", "--criterion", "q0", "--basis", "hadamard"])
    assert parse_report(text)["detected"] == "no"


def test_eval_file_state(tmp_path):
    path = tmp_path / "ghz.json"
    dump_density_matrix(projector(make_ghz(3)), path)
    code, text = run(["eval", "--state", "file", "--file", str(path), "--criterion", "q0"])
    assert code == 0 and float(parse_report(text)["value"]) == pytest.approx(0.5, abs=1e-12)


def test_exit_code_validation_vs_parse(tmp_path):
    bad_trace = tmp_path / "trace.json"
    dump_density_matrix(0.9 * np.eye(8) / 8, bad_trace)
    assert run(["eval", "--state", "file", "--file", str(bad_trace)])[0] == 2
    garbled = tmp_path / "garbled.json"
    garbled.write_text("{ not json")
    assert run(["eval", "--state", "file", "--file", str(garbled)])[0] == 3
    assert run(["eval", "--state", "file", "--file", str(tmp_path / "missing.json")])[0] == 3


@pytest.mark.parametrize("argv", [
    ["eval", "--state", "ghz", "--criterion", "q0"],
    ["eval", "--state", "ghz", "--n", "3", "--criterion", "q2"],
    ["eval", "--state", "ghz", "--n", "3", "--criterion", "bogus"],
    ["eval", "--state", "dicke", "--n", "4"],
    ["eval", "--state", "ghz", "--n", "3", "--q", "1.5"],
    ["prob", "--state", "ghz", "--n", "3", "--samples", "0"],
    ["prob", "--state", "ghz", "--n", "3", "--bases", "y"],
    ["sweep", "--state", "w", "--n", "3", "--grid", "0.5,0.1", "--samples", "10"],
])
def test_usage_errors_exit_1(argv):
    assert run(argv)[0] == 1


def test_argparse_error_exit_1():
    with pytest.raises(SystemExit) as exc:
        main(["prob", "--state", "qutrit"])
    assert exc.value.code == 1


def test_prob_csv_schema():
    code, text = run(["prob", "--state", "ghz", "--n", "3", "--group", "symmetric", "--criteria", "q0",
                      "--samples", "5000", "--seed", "1"])
    assert code == 0
    assert text.splitlines()[0] == ",".join(CSV_HEADER)
    (row,) = rows(text)
    assert int(row["n_samples"]) == 5000 and int(row["seed"]) == 1
    assert float(row["p_hat"]) == int(row["n_hits"]) / 5000


def test_prob_json_has_reproducibility_fields():
    code, text = run(["prob", "--state", "w", "--n", "3", "--criteria", "q0,q1", "--bases", "comp,hadamard",
                      "--samples", "2000", "--seed", "5", "--format", "json"])
    doc = json.loads(text)
    assert doc["config"]["seed"] == 5 and doc["config"]["threshold"] == 1e-10
    assert doc["results"][0]["n_samples"] == 2000
    assert "version" in doc


def test_samples_env_default(monkeypatch):
    monkeypatch.setenv("GMEPROB_SAMPLES", "1234")
    (row,) = rows(run(["prob", "--state", "ghz", "--n", "3"])[1])
    assert int(row["n_samples"]) == 1234
    monkeypatch.setenv("GMEPROB_SAMPLES", "lots")
    assert run(["prob", "--state", "ghz", "--n", "3"])[0] == 1


def test_sweep_single_point_matches_prob():
    common = ["--state", "ghz", "--n", "3", "--criteria", "q0,q1", "--samples", "3000", "--seed", "8"]
    _, sweep = run(["sweep", *common, "--grid", "0"])
    _, prob = run(["prob", *common])
    assert sweep == prob


def test_sweep_ghz_curve():
    _, text = run(["sweep", "--state", "ghz", "--n", "3", "--group", "product", "--criteria", "q0,q1",
                   "--bases", "comp,hadamard", "--samples", "20000", "--grid", "0,0.3,0.571,0.8"])
    p = [float(r["p_hat"]) for r in rows(text)]
    assert p[0] > 0.5 and p[1] > 0 and p[2] == 0 and p[3] == 0


def test_sweep_linspace_grid():
    _, text = run(["sweep", "--state", "w", "--n", "3", "--samples", "100", "--q-start", "0",
                   "--q-stop", "0.5", "--steps", "6"])
    assert [float(r["q"]) for r in rows(text)] == pytest.approx([0, 0.1, 0.2, 0.3, 0.4, 0.5])


def test_sweep_w3_symmetric_q1_has_cliff_near_0p1():
    _, text = run(["sweep", "--state", "w", "--n", "3", "--group", "symmetric", "--criteria", "q1",
                   "--samples", "100000", "--q-start", "0", "--q-stop", "0.2", "--steps", "21", "--seed", "2"])
    p = np.array([float(r["p_hat"]) for r in rows(text)])
    drops = -np.diff(p)
    # one region of positive Q_1 disappears just below q = 0.1; the rest decays slowly
    assert 0.07 <= 0.01 * np.argmax(drops) <= 0.1
    assert drops.max() > 0.04
    assert np.all(drops[10:] < 0.005)


def test_record_replay_round_trip(tmp_path):
    record = tmp_path / "run.json"
    code, first = run(["sweep", "--state", "w", "--n", "3", "--group", "symmetric", "--criteria", "q0,q1",
                       "--bases", "comp,hadamard", "--samples", "3000", "--seed", "77", "--grid", "0,0.3",
                       "--record", str(record)])
    assert code == 0
    code, again = run(["replay", str(record)])
    assert code == 0 and again == first


def test_replay_detects_tampering(tmp_path):
    record = tmp_path / "run.json"
    run(["prob", "--state", "ghz", "--n", "3", "--samples", "500", "--record", str(record)])
    doc = json.loads(record.read_text())
    doc["results"][0]["n_hits"] += 1
    record.write_text(json.dumps(doc))
    assert run(["replay", str(record)])[0] == 2


def test_replay_file_state(tmp_path):
    path = tmp_path / "ghz.json"
    dump_density_matrix(projector(make_ghz(3)), path)
    record = tmp_path / "run.json"
    code, first = run(["prob", "--state", "file", "--file", str(path), "--q", "0.1", "--samples", "800",
                       "--record", str(record)])
    assert code == 0
    path.unlink()  # the record embeds the matrix
    assert run(["replay", str(record)]) == (0, first)


def test_reference_table():
    code, text = run(["reference"])
    assert code == 0
    table = list(csv.DictReader(line for line in text.splitlines() if not line.startswith("#")))
    values = {(r["state"], r["criteria"]): float(r["value"]) for r in table}
    assert values[("dicke4,2", "q0")] == pytest.approx(1 / np.sqrt(3 + np.sqrt(6)), abs=1e-9)
    assert values[("dicke4,2", "q0")] == pytest.approx(0.4283, abs=1e-4)
    assert values[("w3", "q1")] == pytest.approx(0.2604, abs=1e-4)
    assert values[("dicke4,2", "q0,q1,q2")] == pytest.approx(0.7162, abs=1e-4)
    assert values[("ghz3", "q0")] == pytest.approx(0.52966, abs=5e-6)
    assert values[("w3", "q0")] == pytest.approx(1 / np.sqrt(3), abs=1e-9)


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "gmeprob.cli", "eval", "--state", "ghz", "--n", "3"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "value: 0.5" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "gmeprob.cli", "eval", "--state", "nope"],
                          capture_output=True, text=True)
    assert proc.returncode == 1

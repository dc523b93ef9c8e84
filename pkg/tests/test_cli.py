import csv
import io
import json
import subprocess
import sys

import pytest

from conftest import ROOT
from pho.cli import EXIT_DATA, EXIT_OK, EXIT_RUN, EXIT_USAGE, main

FAST = ["--space", str(ROOT / "configs" / "stumps_100.json"), "--full-budget", "6",
        "--synthetic-rows", "120"]


def test_space_enumerate_csv(tmp_path, capsys):
    path = tmp_path / "s.json"
    path.write_text('[{"name": "a", "values": [1, 2]}, {"name": "b", "values": [0.1, 0.2, 0.3]}]')
    assert main(["space", "enumerate", str(path)]) == EXIT_OK
    rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
    assert rows[0] == ["index", "a", "b"]
    assert rows[1] == ["0", "1", "0.1"] and rows[-1] == ["5", "2", "0.3"]


def test_space_enumerate_json_and_errors(tmp_path, capsys):
    path = tmp_path / "s.json"
    path.write_text('[{"name": "a", "values": [1]}]')
    assert main(["space", "enumerate", str(path), "--format", "json"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out) == [{"index": 0, "a": 1}]
    path.write_text('[\n{"name": "a", "values": []}\n]')
    assert main(["space", "enumerate", str(path)]) == EXIT_DATA
    assert "line 2" in capsys.readouterr().err
    assert main(["space", "enumerate", str(tmp_path / "missing.json")]) == EXIT_DATA


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["tune"])
    assert exc.value.code == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        main(["compare", "--metric", "f1"])
    assert exc.value.code == EXIT_USAGE
    assert main(["compare", "--trials", "0"]) == EXIT_USAGE
    assert main(["tune", "pho", "-n", "60", "-k", "60", *FAST]) == EXIT_USAGE


def test_tune_pho_writes_result_and_figures(tmp_path, capsys):
    out = tmp_path / "pho"
    assert main(["tune", "pho", *FAST, "--seed", "3", "--out", str(out)]) == EXIT_OK
    doc = json.loads((out / "tune_pho.json").read_text())
    assert doc["ledger"]["total_cost_units"] == 10 * 6 + 90 * 2
    assert len(doc["fully_trained"]) == 10
    assert {p.name for p in out.glob("*.csv")} == {"fig1_traces.csv", "fig3_scatter.csv"}
    # plots subcommand regenerates the same files from the JSON
    regen = tmp_path / "regen"
    assert main(["plots", str(out / "tune_pho.json"), "--out", str(regen)]) == EXIT_OK
    for name in ("fig1_traces.csv", "fig3_scatter.csv"):
        assert (regen / name).read_bytes() == (out / name).read_bytes()


def test_tune_random(tmp_path):
    out = tmp_path / "rs"
    assert main(["tune", "random", "--budget", "60", *FAST, "--out", str(out)]) == EXIT_OK
    doc = json.loads((out / "tune_random.json").read_text())
    assert len(doc["fully_trained"]) == 10
    assert main(["tune", "random", "--budget", "-1", *FAST, "--out", str(out)]) == EXIT_USAGE


def test_pool_evaluate(tmp_path):
    out = tmp_path / "pool"
    assert main(["pool", "evaluate", *FAST, "--out", str(out)]) == EXIT_OK
    rows = list(csv.reader((out / "fig2_pool.csv").open()))
    assert rows[0] == ["rank", "final_metric"] and len(rows) == 101
    values = [float(r[1]) for r in rows[1:]]
    assert values == sorted(values)


def test_compare_with_config_file_is_reproducible(tmp_path):
    config = json.loads((ROOT / "configs" / "compare_desk.json").read_text())
    config.update(trials=3, full_budget=6, space_path=str(ROOT / "configs" / "stumps_100.json"))
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(config))
    outs = [tmp_path / "a", tmp_path / "b"]
    for out in outs:
        assert main(["compare", "--config", str(cfg), "--out", str(out)]) == EXIT_OK
    for name in ("report.json", "fig1_traces.csv", "fig2_pool.csv", "fig3_scatter.csv"):
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()


def test_plots_rejects_garbage(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"something": 1}')
    assert main(["plots", str(bad), "--out", str(tmp_path / "o")]) == EXIT_DATA


def test_data_file_errors(tmp_path):
    csv_path = tmp_path / "d.csv"
    csv_path.write_text("a,b\n1,2\n")
    assert main(["tune", "pho", *FAST, "--data", str(csv_path), "--out", str(tmp_path)]) == EXIT_DATA


def test_csv_dataset_end_to_end(tmp_path):
    lines = ["age;job;y"]
    for i in range(120):
        job = ["admin.", "technician", "services"][i % 3]
        lines.append(f"{20 + i % 50};{job};{'yes' if (i % 50) > 30 else 'no'}")
    data = tmp_path / "bank.csv"
    data.write_text("\n".join(lines) + "\n")
    args = ["tune", "pho", *FAST, "--data", str(data), "--delimiter", ";",
            "--label-column", "y", "--positive-label", "yes", "--metric", "auc",
            "--out", str(tmp_path / "o")]
    assert main(args) == EXIT_OK


def test_module_entry_point(tmp_path):
    path = tmp_path / "s.json"
    path.write_text('[{"name": "a", "values": [1, 2]}]')
    proc = subprocess.run([sys.executable, "-m", "pho.cli", "space", "enumerate", str(path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.splitlines() == ["index,a", "0,1", "1,2"]


def test_run_failure_exit_code(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "space_path": str(ROOT / "configs" / "stumps_100.json"), "metric": "auc", "trials": 2,
        "full_budget": 4,
        "synthetic": {"rows": 40, "features": 2, "separation": 1.0, "positive_rate": 0.0, "seed": 0},
    }))
    assert main(["compare", "--config", str(cfg), "--out", str(tmp_path / "o")]) == EXIT_RUN

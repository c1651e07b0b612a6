import csv
import io
import json
import os
import subprocess
import sys

import pytest

from ndsplit.cli import main, parse_bandwidth, parse_bytes
from ndsplit.profiles import load_builtin, profile_to_dict


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_bandwidth_suffixes():
    assert parse_bandwidth("1e9") == 125e6
    assert parse_bandwidth("1Gbps") == 125e6
    assert parse_bandwidth("500Mbps") == 62.5e6
    assert parse_bytes("16GiB") == 16 * 2**30
    assert parse_bytes("2GB") == 2 * 10**9


def test_split_prints_index(capsys):
    code, out, _ = run_cli(capsys, "split", "--profile", "alexnet.json", "--batch", "3000", "--bandwidth", "1e9")
    assert code == 0 and out == "13\n"


def test_split_json(capsys):
    code, out, _ = run_cli(capsys, "split", "--profile", "alexnet", "--batch", "4000", "--bandwidth", "1Gbps",
                           "--json")
    doc = json.loads(out)
    assert code == 0 and doc["split_index"] == 16 and doc["bytes_per_iteration"] == 62_600_000
    assert list(doc) == sorted(doc)


def test_profile_env_dir(capsys, tmp_path, monkeypatch):
    doc = profile_to_dict(load_builtin("alexnet"))
    doc["name"] = "mynet"
    (tmp_path / "mynet.json").write_text(json.dumps(doc))
    monkeypatch.setenv("NDS_PROFILE_DIR", str(tmp_path))
    code, out, _ = run_cli(capsys, "split", "--profile", "mynet", "--batch", "3000", "--bandwidth", "1e9")
    assert code == 0 and out == "13\n"


def test_missing_profile_is_validation_error(capsys):
    code, _, err = run_cli(capsys, "split", "--profile", "nope.json", "--batch", "1", "--bandwidth", "1e9")
    assert code == 2 and err


def test_bad_flag_exit_2(capsys):
    code, _, _ = run_cli(capsys, "split", "--profile", "alexnet", "--batch", "-4", "--bandwidth", "1e9")
    assert code == 2


def test_adapt_json(capsys, tmp_path):
    reqs = {"available_bytes": 1000,
            "requests": [{"id": 1, "mem_model_bytes": 100, "mem_data_bytes_per_sample": 1, "b_min": 25, "b_max": 1000},
                         {"id": 2, "mem_model_bytes": 100, "mem_data_bytes_per_sample": 1, "b_min": 25, "b_max": 1000}]}
    p = tmp_path / "r.json"
    p.write_text(json.dumps(reqs))
    code, out, _ = run_cli(capsys, "adapt", "--requests", str(p))
    doc = json.loads(out)
    assert code == 0 and doc["memory_used_bytes"] <= 1000 and doc["deferred"] == []
    assert set(doc["assigned"]) == {"1", "2"}


def test_malformed_json_exit_2(capsys, tmp_path):
    p = tmp_path / "r.json"
    p.write_text("{not json")
    code, _, err = run_cli(capsys, "adapt", "--requests", str(p))
    assert code == 2 and err


def test_cost_optimize(capsys, tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"c11": 1e-9, "c12": 1e-3, "c21": 1e-9, "c22": 1e-3,
                             "bandwidth_bytes_per_sec": 125e6, "dataset_size": 10000,
                             "gpu_mem_bytes": 14 * 2**30, "bounds": {"b_cos_max": 200}}))
    code, out, _ = run_cli(capsys, "cost", "--profile", "alexnet", "--params", str(p), "--plan", "13,100,100",
                           "--optimize")
    doc = json.loads(out)
    assert code == 0 and doc["feasible"] is True and doc["optimum"]["feasible"] is True
    assert doc["epoch_time"] == pytest.approx(doc["cos_time"] + doc["transfer_time"] + doc["client_time"])


def test_simulate_zero_tenants(capsys):
    code, out, _ = run_cli(capsys, "simulate", "--scenario", "fig10-scalability", "--tenants", "0")
    doc = json.loads(out)
    assert code == 0 and doc["jobs"] == [] and doc["oom_events"] == 0


def test_unknown_scenario(capsys):
    code, _, err = run_cli(capsys, "sweep", "--scenario", "fig99")
    assert code == 2 and "fig99" in err


def test_table4_sweep(capsys):
    code, out, _ = run_cli(capsys, "sweep", "--scenario", "table4-split-index")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 9
    assert [int(r["split_index"]) for r in rows] == [17, 17, 17, 17, 16, 5, 5, 5, 5]


def test_sweep_out_file_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        assert main(["sweep", "--scenario", "fig9-batch-sweep", "--values", "1000,2000", "--seed", "3",
                     "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text().splitlines()[0].startswith("scenario,mode,model,batch")


def test_console_script_entry():
    proc = subprocess.run([sys.executable, "-m", "ndsplit.cli", "split", "--profile", "alexnet",
                           "--batch", "3000", "--bandwidth", "1e9"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "13"

import csv
import io
import json
import math
import os

import pytest

from qrmix import ExperimentConfig, ConfigError, build_group, character_degrees, emit_plot_data, run_sweep
from qrmix.cli import main
from qrmix.sweep import RESULT_COLUMNS, write_results


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


# ---------------------------------------------------------------------------
# degrees


def test_degrees_json_output(capsys):
    code, out, _ = run_cli(capsys, "degrees", "-g", "psl2:5")
    assert code == 0
    data = json.loads(out)
    G = build_group("psl2:5")
    assert data == {"group": "psl2:5", "order": 60, "classes": 5,
                    "degrees": list(character_degrees(G).degrees), "D": 3}


def test_degrees_trivial_group_reports_inf(capsys):
    code, out, _ = run_cli(capsys, "degrees", "-g", "cyclic:1")
    assert code == 0
    assert json.loads(out)["D"] == "inf"


def test_bad_descriptor_exits_2(capsys):
    code, _, err = run_cli(capsys, "degrees", "-g", "nosuch:4")
    assert code == 2
    assert "error" in err


# ---------------------------------------------------------------------------
# mixing / recurrence / vdc CSV


def _parse_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_mixing_csv_schema_and_determinism(capsys):
    code, out1, _ = run_cli(capsys, "mixing", "-g", "symmetric:4",
                            "--trials", "3", "--seed", "11")
    assert code == 0
    rows = _parse_csv(out1)
    assert len(rows) == 3
    assert list(rows[0]) == ["group", "order", "action", "D", "trial",
                             "bound", "measured", "ci", "pass"]
    assert all(r["pass"] == "true" for r in rows)
    _, out2, _ = run_cli(capsys, "mixing", "-g", "symmetric:4",
                         "--trials", "3", "--seed", "11")
    assert out1 == out2


def test_mixing_float_fields_roundtrip(capsys):
    _, out, _ = run_cli(capsys, "mixing", "-g", "cyclic:8", "--trials", "2",
                        "--seed", "1")
    for row in _parse_csv(out):
        measured = float(row["measured"])
        assert "%.17g" % measured == row["measured"]    # 17-digit round trip
        assert measured <= float(row["bound"]) + 1e-9


def test_recurrence_csv(capsys):
    code, out, _ = run_cli(capsys, "recurrence", "-g", "sl2:5",
                           "--trials", "2", "--seed", "1")
    assert code == 0
    rows = _parse_csv(out)
    assert list(rows[0]) == ["group", "order", "D", "epsilon",
                             "bound_case_i", "measured_case_i",
                             "bound_case_ii", "measured_case_ii",
                             "bound_total", "measured_total", "pass"]
    for r in rows:
        assert float(r["measured_total"]) <= float(r["bound_total"]) + 1e-9
        assert r["pass"] == "true"


def test_vdc_csv(capsys):
    code, out, _ = run_cli(capsys, "vdc", "-g", "symmetric:3",
                           "--trials", "2", "--seed", "1")
    assert code == 0
    for r in _parse_csv(out):
        assert float(r["measured_total"]) <= float(r["bound_total"]) + 1e-9


# ---------------------------------------------------------------------------
# sweep


def _config(tmp_path, **overrides):
    data = {"groups": ["cyclic:8", "symmetric:4"],
            "experiments": ["degrees", "mixing"],
            "trials": 2, "master_seed": 5,
            "out_dir": str(tmp_path / "out")}
    data.update(overrides)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(data))
    return str(path)


def test_sweep_writes_outputs_and_passes(tmp_path, capsys):
    code, out, _ = run_cli(capsys, "sweep", "--config", _config(tmp_path))
    assert code == 0
    out_dir = tmp_path / "out"
    rows = list(csv.DictReader(open(out_dir / "results.csv")))
    assert rows and list(rows[0]) == RESULT_COLUMNS
    # 2 groups x (1 degrees row + 3 actions x 2 mixing trials)
    assert len(rows) == 2 * (1 + 6)
    summary = json.loads((out_dir / "summary.json").read_text())
    assert summary["all_pass"] is True
    assert summary["groups"]["cyclic:8"]["D"] == 1


def test_sweep_byte_identical_across_runs(tmp_path, capsys):
    cfg = _config(tmp_path)
    run_cli(capsys, "sweep", "--config", cfg)
    first = (tmp_path / "out" / "results.csv").read_bytes()
    first_summary = (tmp_path / "out" / "summary.json").read_bytes()
    run_cli(capsys, "sweep", "--config", cfg)
    assert (tmp_path / "out" / "results.csv").read_bytes() == first
    assert (tmp_path / "out" / "summary.json").read_bytes() == first_summary


def test_sweep_rejects_unknown_config_key(tmp_path, capsys):
    cfg = _config(tmp_path, bogus_knob=3)
    code, _, err = run_cli(capsys, "sweep", "--config", cfg)
    assert code == 2 and "bogus_knob" in err


def test_sweep_rejects_bad_descriptor(tmp_path, capsys):
    cfg = _config(tmp_path, groups=["cyclic:8", "frobnitz:9"])
    code, _, _ = run_cli(capsys, "sweep", "--config", cfg)
    assert code == 2


def test_sweep_reports_group_construction_failure(tmp_path, capsys):
    # parses but cannot be built: order 0 cyclic group
    cfg = _config(tmp_path, groups=["cyclic:0"], experiments=["degrees"])
    code, _, _ = run_cli(capsys, "sweep", "--config", cfg)
    assert code == 1
    summary = json.loads((tmp_path / "out" / "summary.json").read_text())
    assert summary["groups"]["cyclic:0"]["error"]
    assert summary["all_pass"] is False


def test_config_invariants():
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"groups": ["cyclic:4"],
                                    "experiments": ["mixing"], "trials": 0})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"groups": ["cyclic:4"],
                                    "experiments": ["nope"]})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"experiments": ["mixing"]})


# ---------------------------------------------------------------------------
# plotdata


def test_plotdata_empty_results(tmp_path, capsys):
    path = tmp_path / "results.csv"
    write_results(str(path), [])
    code, out, _ = run_cli(capsys, "plotdata", "--results", str(path))
    assert code == 0
    assert out.splitlines() == ["group,order,D,bound,measured_max,measured_mean"]


def test_plotdata_single_trial_max_equals_mean(tmp_path, capsys):
    cfg = _config(tmp_path, trials=1, experiments=["mixing"], actions=["left"])
    run_cli(capsys, "sweep", "--config", cfg)
    code, out, _ = run_cli(capsys, "plotdata", "--results",
                           str(tmp_path / "out" / "results.csv"))
    assert code == 0
    rows = _parse_csv(out)
    assert len(rows) == 2
    for r in rows:
        assert r["measured_max"] == r["measured_mean"]


def test_plotdata_sorted_by_degree(tmp_path, capsys):
    cfg = _config(tmp_path, groups=["psl2:5", "cyclic:8", "sl2:5"],
                  experiments=["mixing"], actions=["left"], trials=1)
    run_cli(capsys, "sweep", "--config", cfg)
    _, out, _ = run_cli(capsys, "plotdata", "--results",
                        str(tmp_path / "out" / "results.csv"))
    ds = [float(r["D"]) for r in _parse_csv(out)]
    assert ds == sorted(ds)


def test_plotdata_missing_file_exits_2(tmp_path, capsys):
    code, _, _ = run_cli(capsys, "plotdata", "--results",
                         str(tmp_path / "nope.csv"))
    assert code == 2


# ---------------------------------------------------------------------------
# verify


def test_verify_quick_passes_and_writes(tmp_path, capsys):
    code, out, _ = run_cli(capsys, "verify", "--profile", "quick",
                           "--out", str(tmp_path), "--seed", "8")
    assert code == 0
    assert out.count("PASS") == 10 and "FAIL" not in out
    assert (tmp_path / "verify_results.csv").exists()
    assert (tmp_path / "verify_summary.json").exists()


def test_verify_inflated_degree_fails(tmp_path, capsys):
    code, out, _ = run_cli(capsys, "verify", "--profile", "quick",
                           "--out", str(tmp_path), "--seed", "8",
                           "--inflate-d", "1")
    assert code == 1
    assert "FAIL" in out

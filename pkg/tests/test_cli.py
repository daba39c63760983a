"""End-to-end CLI behaviour: artifacts, determinism, exit codes."""

import filecmp
import json

import pytest

from astrocore import report
from astrocore.cli import main


def write_cfg(tmp_path, payload, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return path


# Reduced workloads so the suite stays fast; acceptance tests exercise the
# full default protocols.
SELFREPAIR_SMALL = {"selfrepair": {"duration_s": 30.0, "fault_time_s": 15.0,
                                   "n_seeds": 2}}
PWL_SMALL = {"pwl": {"steps": 4000, "segment_sweep": [8, 16]}}
FAULTS_SMALL = {"faults": {
    "toy": {"layer_sizes": [4, 4, 2]},
    "harness": {"duration_s": 0.1, "samples": 8},
    "synthesis": {"n_r": 4, "max_astro_per_layer": 1},
    "error_rates_pct": [0.0, 10.0],
    "n_seeds": 2,
}}


def assert_tree_identical(dir_a, dir_b):
    names_a = sorted(p.name for p in dir_a.iterdir())
    names_b = sorted(p.name for p in dir_b.iterdir())
    assert names_a == names_b
    match, mismatch, errors = filecmp.cmpfiles(dir_a, dir_b, names_a,
                                               shallow=False)
    assert not mismatch and not errors, (mismatch, errors)


def test_format_cell():
    assert report.format_cell(True) == "yes"
    assert report.format_cell(False) == "no"
    assert report.format_cell(42) == "42"
    assert report.format_cell(0.5) == "0.5"
    assert report.format_cell(1 / 3) == "0.3333333333"
    assert report.format_cell("ubrain") == "ubrain"


def test_write_csv(tmp_path):
    path = tmp_path / "t.csv"
    report.write_csv(path, ["a", "b"], [[1, 2.5], ["x", True]])
    assert path.read_text() == "a,b\n1,2.5\nx,yes\n"


def test_clusters_writes_artifacts_and_checks_pass(tmp_path, capsys):
    out = tmp_path / "out"
    rc = main(["clusters", "--out", str(out), "--check"])
    captured = capsys.readouterr()
    assert rc == 0
    assert "check ok" in captured.out
    assert "FAILED" not in captured.out
    csv = (out / "clusters.csv").read_text().splitlines()
    assert csv[0].startswith("model,")
    assert len(csv) == 15  # header + 14 reference networks
    svg = (out / "clusters.svg").read_text()
    assert svg.lstrip().startswith("<?xml")
    assert "clusters:" in (out / "summary.txt").read_text()


@pytest.mark.parametrize("command", ["reliability", "area", "power"])
def test_fast_subcommands_pass_their_checks(command, tmp_path, capsys):
    rc = main([command, "--out", str(tmp_path / command), "--check"])
    captured = capsys.readouterr()
    assert rc == 0
    assert "FAILED" not in captured.out


def test_selfrepair_deterministic_and_seed_sensitive(tmp_path):
    cfg = write_cfg(tmp_path, SELFREPAIR_SMALL)
    d1, d2, d3, d4 = (tmp_path / n for n in "abcd")
    assert main(["selfrepair", "--config", str(cfg), "--out", str(d1)]) == 0
    assert main(["selfrepair", "--config", str(cfg), "--out", str(d2)]) == 0
    assert_tree_identical(d1, d2)
    # A different base seed must change the Monte-Carlo rate table.
    assert main(["selfrepair", "--config", str(cfg), "--out", str(d3),
                 "--seed", "5"]) == 0
    assert ((d1 / "selfrepair_rates.csv").read_text()
            != (d3 / "selfrepair_rates.csv").read_text())
    # Threaded execution reproduces the serial artifacts byte for byte.
    assert main(["selfrepair", "--config", str(cfg), "--out", str(d4),
                 "--jobs", "3"]) == 0
    assert_tree_identical(d1, d4)


def test_pwl_parallel_matches_serial(tmp_path):
    cfg = write_cfg(tmp_path, PWL_SMALL)
    serial, parallel = tmp_path / "serial", tmp_path / "parallel"
    assert main(["pwl", "--config", str(cfg), "--out", str(serial)]) == 0
    assert main(["pwl", "--config", str(cfg), "--out", str(parallel),
                 "--jobs", "2"]) == 0
    assert_tree_identical(serial, parallel)
    errors = (serial / "pwl_errors.csv").read_text().splitlines()
    assert errors[0] == "segments,exp_table_max_error,pr_max_deviation"
    assert len(errors) == 3


def test_faults_deterministic_and_incomplete_sweep_fails_check(tmp_path,
                                                               capsys):
    cfg = write_cfg(tmp_path, FAULTS_SMALL)
    d1, d2 = tmp_path / "f1", tmp_path / "f2"
    assert main(["faults", "--config", str(cfg), "--out", str(d1)]) == 0
    assert main(["faults", "--config", str(cfg), "--out", str(d2)]) == 0
    assert_tree_identical(d1, d2)
    # The acceptance sweep needs 0/10/20/50%; this config lacks 20 and 50.
    rc = main(["faults", "--config", str(cfg), "--out", str(tmp_path / "f3"),
               "--check"])
    captured = capsys.readouterr()
    assert rc == 1
    assert "check FAILED: sweep covers 0/10/20/50%" in captured.out


def test_malformed_config_exits_2_without_outputs(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    out = tmp_path / "never"
    rc = main(["area", "--config", str(bad), "--out", str(out)])
    captured = capsys.readouterr()
    assert rc == 2
    assert "error:" in captured.err
    assert not out.exists()


def test_unknown_config_key_exits_2(tmp_path, capsys):
    cfg = write_cfg(tmp_path, {"selfrepair": {"astro": {"tau_qq": 1.0}}})
    out = tmp_path / "never"
    rc = main(["selfrepair", "--config", str(cfg), "--out", str(out)])
    captured = capsys.readouterr()
    assert rc == 2
    assert "selfrepair.astro.tau_qq" in captured.err
    assert not out.exists()


def test_invalid_parameter_value_exits_2(tmp_path, capsys):
    cfg = write_cfg(tmp_path, {"selfrepair": {"astro": {"tau_ag": -1.0}}})
    out = tmp_path / "never"
    rc = main(["selfrepair", "--config", str(cfg), "--out", str(out)])
    captured = capsys.readouterr()
    assert rc == 2
    assert "invalid configuration" in captured.err
    assert not out.exists()


def test_unknown_core_name_exits_2(tmp_path, capsys):
    cfg = write_cfg(tmp_path, {"synthesize": {"core": "hexagon"}})
    out = tmp_path / "never"
    rc = main(["synthesize", "--config", str(cfg), "--out", str(out)])
    captured = capsys.readouterr()
    assert rc == 2
    assert "hexagon" in captured.err
    assert not out.exists()


def test_jobs_must_be_positive(tmp_path, capsys):
    rc = main(["area", "--out", str(tmp_path / "never"), "--jobs", "0"])
    captured = capsys.readouterr()
    assert rc == 2
    assert "--jobs" in captured.err


def test_summary_accumulates_one_sorted_line_per_subcommand(tmp_path):
    out = tmp_path / "out"
    for command in ["power", "area", "clusters"]:
        assert main([command, "--out", str(out)]) == 0
    lines = (out / "summary.txt").read_text().splitlines()
    assert [ln.split(":")[0] for ln in lines] == ["area", "clusters", "power"]
    # Re-running a subcommand replaces its line instead of appending.
    assert main(["area", "--out", str(out)]) == 0
    assert (out / "summary.txt").read_text().splitlines() == lines

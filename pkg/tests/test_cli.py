"""End-to-end tests of the command-line surface: files, determinism, exit codes."""

from __future__ import annotations

import csv
import subprocess
import sys
from dataclasses import replace
from pathlib import Path

import pytest

from chargedamp import (
    ExponentialMass,
    ValidationError,
    gaas_scenario,
    save_scenario,
    with_mass_model,
)
from chargedamp.cli import RunRequest, RunReport, main, run
from chargedamp.verify import CheckResult, variable_field_scenario


def _read_csv(path: Path):
    with open(path, newline="") as handle:
        rows = list(csv.reader(handle))
    return rows[0], rows[1:]


def test_run_request_rejects_unknown_command():
    with pytest.raises(ValidationError):
        RunRequest(command="simulate-everything")


def test_run_report_passed_property():
    good = CheckResult(name="x", passed=True, measured=0.0, tolerance=1.0, seconds=0.1, budget=1.0)
    bad = CheckResult(name="y", passed=False, measured=2.0, tolerance=1.0, seconds=0.1, budget=1.0)
    assert RunReport(command="verify", wall_time=0.1, outputs=(), checks=(good,)).passed
    assert not RunReport(command="verify", wall_time=0.1, outputs=(), checks=(good, bad)).passed


def test_usage_errors_exit_1(capsys):
    assert main([]) == 1
    assert main(["simulate-everything"]) == 1
    assert main(["simulate-classical", "--model", "relativistic"]) == 1
    capsys.readouterr()


def test_simulate_classical_writes_trajectory(tmp_path, capsys):
    code = main(["simulate-classical", "gaas", "--model", "newtonian",
                 "--output-dir", str(tmp_path)])
    assert code == 0
    header, rows = _read_csv(tmp_path / "classical_newtonian.csv")
    assert header == ["t", "x", "y", "vx", "vy"]
    assert len(rows) == 2001  # 10 ns window at 5 ps stride
    first = [float(cell) for cell in rows[0]]
    assert first == [0.0, 0.0, 0.0, 0.0, 3.7e3]
    out = capsys.readouterr().out
    assert "classical_newtonian.csv" in out
    assert "completed" in out


def test_simulate_classical_is_byte_deterministic(tmp_path):
    args = ["simulate-classical", "gaas", "--model", "variable-mass"]
    assert main(args + ["--output-dir", str(tmp_path / "a")]) == 0
    assert main(args + ["--output-dir", str(tmp_path / "b")]) == 0
    name = "classical_variable_mass.csv"
    assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_overrides_change_the_run(tmp_path):
    code = main(["simulate-classical", "gaas", "--model", "variable-mass",
                 "--set", "integration.t_end=1e-10", "--set", "integration.output_stride=1e-11",
                 "--output-dir", str(tmp_path)])
    assert code == 0
    _, rows = _read_csv(tmp_path / "classical_variable_mass.csv")
    assert len(rows) == 11


def test_override_unknown_section_exits_1(tmp_path, capsys):
    code = main(["simulate-classical", "gaas", "--set", "plasma.density=1e20",
                 "--output-dir", str(tmp_path)])
    assert code == 1
    assert "plasma" in capsys.readouterr().err


def test_simulate_canonical_outputs(tmp_path):
    code = main(["simulate-canonical", "gaas", "--set", "integration.t_end=1e-10",
                 "--set", "integration.output_stride=1e-12", "--dump-maps",
                 "--output-dir", str(tmp_path)])
    assert code == 0
    header, rows = _read_csv(tmp_path / "canonical_parameters.csv")
    assert header == ["t", "theta", "lambda_x", "lambda_y", "pi_x", "pi_y",
                      "S", "beta", "eta", "delta", "gamma", "Delta"]
    assert len(rows) == 101
    header, rows = _read_csv(tmp_path / "canonical_maps.csv")
    assert header[:2] == ["t", "m11"]
    assert len(header) == 21  # t + 16 matrix entries + 4 translation entries
    assert (tmp_path / "canonical_trajectory.csv").exists()


def test_simulate_packet_norms(tmp_path):
    code = main(["simulate-packet", "gaas", "--times", "0,6e-12",
                 "--grid-halfwidth", "3e-6", "--grid-points", "201",
                 "--output-dir", str(tmp_path)])
    assert code == 0
    header, rows = _read_csv(tmp_path / "packet_summary.csv")
    assert header == ["t", "norm", "sigma"]
    assert len(rows) == 2
    for row in rows:
        assert float(row[1]) == pytest.approx(1.0, abs=1e-6)
    # sigma column starts at the launch width
    assert float(rows[0][2]) == 5e-8
    assert (tmp_path / "density_00.csv").exists()
    assert (tmp_path / "density_01.csv").exists()


def test_green_check_command(tmp_path, capsys):
    code = main(["green-check", "gaas", "--times", "3e-12",
                 "--grid-halfwidth", "9e-7", "--grid-points", "129",
                 "--output-dir", str(tmp_path)])
    assert code == 0
    out = capsys.readouterr().out
    assert "green-vs-closed-t00" in out
    header, rows = _read_csv(tmp_path / "green_check.csv")
    assert header == ["t", "max_rel_deviation", "tolerance"]
    assert float(rows[0][1]) < float(rows[0][2])


def test_compare_command_produces_figure_data(tmp_path):
    report = run(RunRequest(command="compare", output_dir=tmp_path))
    assert report.passed
    names = {Path(p).name for p in report.outputs}
    assert {"fig1_trajectories.csv", "fig2_velocity_hodograph.csv",
            "fig3_newtonian_velocity.csv", "fig4_linear_mass_velocity.csv",
            "compare_summary.csv"} <= names
    assert {c.name for c in report.checks} == {
        "stationary-agreement-newtonian", "stationary-agreement-linear-mass",
        "canonical-vs-direct",
    }
    assert all(c.passed for c in report.checks)
    header, _ = _read_csv(tmp_path / "fig2_velocity_hodograph.csv")
    assert "packet_vx" in header and "packet_vy" in header


def test_compare_requires_linear_mass_law(tmp_path, capsys):
    base = gaas_scenario()
    exponential = with_mass_model(
        base, ExponentialMass(m0=base.mass_model.m0, tau=base.mass_model.tau)
    )
    path = tmp_path / "exponential.ini"
    save_scenario(exponential, path)
    code = main(["compare", str(path), "--output-dir", str(tmp_path)])
    assert code == 1
    assert "linear" in capsys.readouterr().err


def test_verify_single_check(tmp_path, capsys):
    code = main(["verify", "--only", "mass-asymptotics", "--output-dir", str(tmp_path)])
    assert code == 0
    out = capsys.readouterr().out
    assert "PASS" in out and "mass-model-asymptotics" in out
    header, rows = _read_csv(tmp_path / "verification_report.csv")
    assert header[0] == "name"
    assert len(rows) == 1


def test_verify_unknown_check_exits_1(tmp_path, capsys):
    assert main(["verify", "--only", "perpetual-motion", "--output-dir", str(tmp_path)]) == 1
    capsys.readouterr()


def test_solver_failure_exits_2(tmp_path, capsys):
    doomed = replace(variable_field_scenario(), t_end=1e-10)
    path = tmp_path / "doomed.ini"
    save_scenario(doomed, path)
    code = main(["simulate-canonical", str(path), "--output-dir", str(tmp_path)])
    assert code == 2
    assert "caustic" in capsys.readouterr().err


def test_scenario_file_not_found_exits_1(tmp_path, capsys):
    code = main(["simulate-classical", str(tmp_path / "ghost.ini"),
                 "--output-dir", str(tmp_path)])
    assert code == 1
    capsys.readouterr()


def test_output_dir_env_fallback(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("CHARGEDAMP_OUTPUT_DIR", str(tmp_path / "from_env"))
    code = main(["simulate-classical", "gaas", "--model", "newtonian",
                 "--set", "integration.t_end=1e-10"])
    assert code == 0
    assert (tmp_path / "from_env" / "classical_newtonian.csv").exists()
    capsys.readouterr()


def test_thread_env_validation(monkeypatch, tmp_path, capsys):
    monkeypatch.setenv("CHARGEDAMP_THREADS", "0")
    code = main(["compare", "gaas", "--output-dir", str(tmp_path)])
    assert code == 1
    assert "CHARGEDAMP_THREADS" in capsys.readouterr().err


def test_module_entry_point_shows_usage():
    proc = subprocess.run([sys.executable, "-m", "chargedamp"],
                          capture_output=True, text=True, timeout=120)
    assert proc.returncode == 1
    combined = proc.stdout + proc.stderr
    assert "usage" in combined.lower()

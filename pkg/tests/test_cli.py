"""Command-line behavior: exit codes, config layering, reproducible output."""
from __future__ import annotations

import numpy as np
import pytest

from reqsim.cli import BLOCH_COLUMNS, EXIT_CONFIG, EXIT_IO, EXIT_NUMERICAL, EXIT_OK, OPTIMIZE_COLUMNS, main
from reqsim.sweeps import SINGLE_COLUMNS


def _read_csv(path):
    with open(path) as fh:
        lines = fh.read().splitlines()
    return lines[0].split(","), lines[1:]


# --------------------------------------------------------------- happy paths


def test_sweep_writes_csv_and_meta(tmp_path):
    out = tmp_path / "profile.csv"
    code = main(["sweep", "--pulse", "gauss-opt", "--min", "-0.4", "--max", "0.4",
                 "--points", "3", "-o", str(out)])
    assert code == EXIT_OK
    header, rows = _read_csv(out)
    assert tuple(header) == SINGLE_COLUMNS
    assert len(rows) == 3
    meta = (tmp_path / "profile.csv.meta").read_text()
    assert "command = sweep" in meta
    assert "pulse = gauss-opt" in meta
    assert "points = 3" in meta


def test_sweep_reruns_are_byte_identical(tmp_path):
    argv = ["sweep", "--pulse", "sech-default", "--min", "-1", "--max", "1",
            "--points", "3", "-o", None]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    argv[-1] = str(a)
    assert main(list(argv)) == EXIT_OK
    argv[-1] = str(b)
    assert main(list(argv)) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_cnot_sweep_csv_has_phase_columns(tmp_path):
    out = tmp_path / "cnot.csv"
    code = main(["cnot", "--pulses", "gauss-opt", "--min", "-0.2", "--max", "0.2",
                 "--points", "2", "-o", str(out)])
    assert code == EXIT_OK
    header, rows = _read_csv(out)
    assert header == ["detuning_mhz", "p00", "p01", "p10", "p11", "leak_e",
                      "phase01_deg", "phase10_deg", "phase11_deg"]
    assert len(rows) == 2


def test_cnot_2d_mode_emits_two_axis_columns(tmp_path):
    out = tmp_path / "grid.csv"
    code = main(["cnot", "--mode", "2d", "--min", "-0.1", "--max", "0.1",
                 "--points", "2", "-o", str(out)])
    assert code == EXIT_OK
    header, rows = _read_csv(out)
    assert header[:2] == ["dc_mhz", "dt_mhz"]
    assert len(rows) == 4


def test_optimize_writes_trace_and_summary(tmp_path, capsys):
    out = tmp_path / "trace.csv"
    code = main(["optimize", "--max-evals", "8", "--restarts", "0", "-o", str(out)])
    assert code == EXIT_OK
    header, rows = _read_csv(out)
    assert tuple(header) == OPTIMIZE_COLUMNS
    assert len(rows) >= 1
    text = capsys.readouterr().out
    assert "best score" in text
    assert "budget exhausted" in text


def test_bloch_writes_time_series(tmp_path):
    out = tmp_path / "bloch.csv"
    code = main(["bloch", "--pulse", "rect90-180-90", "--samples", "5", "-o", str(out)])
    assert code == EXIT_OK
    header, rows = _read_csv(out)
    assert tuple(header) == BLOCH_COLUMNS
    assert len(rows) == 5
    first = [float(v) for v in rows[0].split(",")]
    assert first[3] == pytest.approx(-1.0, abs=1e-12)


def test_program_listing_prints_all_steps(capsys):
    assert main(["program", "--gate", "cnot", "--pulses", "gauss-opt"]) == EXIT_OK
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 13
    assert lines[-1] == "total duration 18 us (12 steps)"
    assert lines[0].lstrip().startswith("1  control")


def test_catalog_lists_every_named_pulse(capsys):
    assert main(["catalog"]) == EXIT_OK
    text = capsys.readouterr().out
    for name in ("rect90-180-90", "rect90-180-90-alt", "gauss-naive",
                 "gauss-naive-alt", "gauss-opt", "sech-default"):
        assert name in text
    assert len(text.strip().splitlines()) == 6


# ------------------------------------------------------------ config layers


def test_config_file_supplies_defaults(tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[sweep]\npulse = sech-default\nmin = -1\nmax = 1\npoints = 4\n")
    out = tmp_path / "out.csv"
    code = main(["sweep", "--config", str(cfg), "-o", str(out)])
    assert code == EXIT_OK
    _, rows = _read_csv(out)
    assert len(rows) == 4
    assert "pulse = sech-default" in (tmp_path / "out.csv.meta").read_text()


def test_flags_override_the_config_file(tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[sweep]\nmin = -1\nmax = 1\npoints = 9\n")
    out = tmp_path / "out.csv"
    code = main(["sweep", "--config", str(cfg), "--points", "3", "-o", str(out)])
    assert code == EXIT_OK
    _, rows = _read_csv(out)
    assert len(rows) == 3


def test_config_via_environment_variable(tmp_path, monkeypatch):
    cfg = tmp_path / "env.ini"
    cfg.write_text("[common]\noutput = %s\n[sweep]\nmin = -1\nmax = 1\npoints = 3\n"
                   % (tmp_path / "env_out.csv"))
    monkeypatch.setenv("REQSIM_CONFIG", str(cfg))
    assert main(["sweep"]) == EXIT_OK
    assert (tmp_path / "env_out.csv").exists()


def test_unknown_config_section_is_rejected(tmp_path):
    cfg = tmp_path / "bad.ini"
    cfg.write_text("[sweeep]\npoints = 3\n")
    assert main(["sweep", "--config", str(cfg), "-o", "x.csv"]) == EXIT_CONFIG


def test_unknown_config_key_is_rejected(tmp_path):
    cfg = tmp_path / "bad.ini"
    cfg.write_text("[sweep]\npoint = 3\n")
    assert main(["sweep", "--config", str(cfg), "-o", "x.csv"]) == EXIT_CONFIG


# ----------------------------------------------------------------- failures


def test_unknown_pulse_is_a_config_error(tmp_path):
    code = main(["sweep", "--pulse", "gauss-best", "-o", str(tmp_path / "x.csv")])
    assert code == EXIT_CONFIG


def test_missing_output_is_a_config_error():
    assert main(["sweep", "--points", "3", "--min", "-1", "--max", "1"]) == EXIT_CONFIG


def test_underflowing_tolerances_exit_numerical(tmp_path):
    code = main(["sweep", "--min", "-0.1", "--max", "0.1", "--points", "2",
                 "--rel-tol", "1e-30", "--abs-tol", "1e-32",
                 "-o", str(tmp_path / "x.csv")])
    assert code == EXIT_NUMERICAL


def test_unwritable_output_exits_io():
    code = main(["sweep", "--min", "-0.1", "--max", "0.1", "--points", "2",
                 "-o", "/nonexistent-dir/x.csv"])
    assert code == EXIT_IO


def test_bad_samples_count_is_a_config_error(tmp_path):
    assert main(["bloch", "--samples", "1", "-o", str(tmp_path / "x.csv")]) == EXIT_CONFIG


def test_bad_gate_name_is_a_config_error():
    assert main(["program", "--gate", "swap"]) == EXIT_CONFIG

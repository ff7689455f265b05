import subprocess
import sys

import pytest

from nhgauss import cli
from nhgauss.config import ConfigError, load_config, parse_lines
from nhgauss.csvio import Table, format_cell, parse_csv, read_csv, render, rows_close


def run(tmp_path, *argv, name="out.csv"):
    out = tmp_path / name
    code = cli.main([*argv, "--out", str(out), "--workers", "1"])
    return code, (read_csv(out) if out.exists() else None)


def test_ep_schema(tmp_path):
    code, table = run(tmp_path, "ep")
    assert code == 0
    assert table.header == ["topology", "K_over_Gamma", "J_star_over_Gamma"]
    assert table.rows == [("binary", 1.0, pytest.approx(1.11803398875))]


def test_spectrum_schema(tmp_path):
    code, table = run(tmp_path, "spectrum", "--set", "topology=ternary", "--set", "axis1=J:0.5:3:6")
    assert code == 0
    assert table.header[-2:] == ["Re_omega_0", "Im_omega_0"]
    assert len(table.rows) == 6
    first = dict(zip(table.header, table.rows[0]))
    assert first["Re_omega_plus"] == 0 and first["Im_omega_plus"] > 0


def test_evolve_with_covariance(tmp_path):
    code, table = run(tmp_path, "evolve", "--set", "t_end=0.01", "--set", "dt=1e-3",
                      "--set", "include_covariance=on")
    assert code == 0
    assert table.header[:2] == ["Gamma_t", "E_N"]
    assert len(table.header) == 2 + 10
    assert len(table.rows) == 11
    assert table.rows[0][1] == pytest.approx(2.0, abs=1e-9)


def test_sweep_grid(tmp_path):
    code, table = run(tmp_path, "sweep", "--set", "axis1=J:1.5:3:2", "--set", "axis2=t:0:0.2:2",
                      "--set", "dt=1e-3")
    assert code == 0
    assert table.header == ["J_over_Gamma", "Gamma_t", "E_N"]
    assert [row[:2] for row in table.rows] == [(1.5, 0.0), (1.5, 0.2), (3.0, 0.0), (3.0, 0.2)]


def test_sweep_over_temperature_and_coupling(tmp_path):
    code, table = run(tmp_path, "sweep", "--set", "axis1=n_th:0:10:2", "--set", "axis2=J:1.5:3:3",
                      "--set", "dt=1e-3", "--set", "t=0.1")
    assert code == 0 and len(table.rows) == 6
    assert table.header[:2] == ["n_th", "J_over_Gamma"]


def test_wigner_grid(tmp_path):
    code, table = run(tmp_path, "wigner", "--set", "t=0", "--set", "x_grid=-1:1:3", "--set", "y_grid=-1:1:3")
    assert code == 0
    assert table.header == ["q1", "q2", "W"]
    assert len(table.rows) == 9
    assert any("fixed at 0: p1, p2" in c for c in table.comments)


def test_ternary_one_vs_rest_column(tmp_path):
    code, table = run(tmp_path, "evolve", "--set", "topology=ternary", "--set", "t_end=0.01",
                      "--set", "dt=1e-3", "--set", "measure=EN_prime,S", "--set", "mode=3")
    assert code == 0
    assert table.header == ["Gamma_t", "E_N_prime_mode3", "S"]


def test_abort_exit_code(tmp_path):
    # uncoupled, the gain mode grows like exp(Gamma t) and overflows
    code, table = run(tmp_path, "evolve", "--set", "J=0", "--set", "K=0", "--set", "t_end=2000",
                      "--set", "dt=0.1", "--set", "stride=100")
    assert code == cli.EXIT_ABORT
    assert table.comments and table.comments[0].startswith("integration aborted")
    assert len(table.rows) >= 1


def test_partial_sweep_exit_code(tmp_path):
    code, table = run(tmp_path, "sweep", "--set", "J=0", "--set", "K=0", "--set", "dt=0.1",
                      "--set", "axis1=n_th:0:1:2", "--set", "axis2=t:1:1500:2")
    assert code == cli.EXIT_PARTIAL
    assert any(row[2] is None for row in table.rows)
    assert any(c.startswith("failed points") for c in table.comments)


@pytest.mark.parametrize("overrides", [
    ["J=-1"],
    ["dt=0"],
    ["bogus=1"],
    ["topology=quaternary"],
    ["measure=EN", "topology=ternary"],
    ["axis1=J:0:1:1"],
])
def test_config_errors_exit_2(tmp_path, capsys, overrides):
    argv = ["sweep" if overrides[0].startswith("axis") else "evolve"]
    for o in overrides:
        argv += ["--set", o]
    code, _ = run(tmp_path, *argv)
    assert code == cli.EXIT_CONFIG
    assert "config error" in capsys.readouterr().err


def test_config_error_names_line(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("topology = binary\n# comment\nJ = fast\n")
    with pytest.raises(ConfigError) as info:
        load_config("evolve", cfg)
    assert "run.cfg:3" in str(info.value) and "'J'" in str(info.value)


def test_overrides_win_over_file(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("J = 2.3\nr = 0.5\n")
    loaded = load_config("evolve", cfg, ["J=3"])
    assert loaded.J == 3.0 and loaded.r == 0.5


def test_parse_lines_rejects_garbage():
    with pytest.raises(ConfigError):
        parse_lines(["just words"])


def test_workers_from_environment(monkeypatch):
    monkeypatch.setenv("SIM_WORKERS", "3")
    assert cli.default_workers() == 3
    monkeypatch.setenv("SIM_WORKERS", "many")
    assert cli.default_workers() >= 1


def test_csv_round_trip():
    table = Table(["a", "b", "c"], [(0.0, 1 / 3, None), (1e-20, -2.5, "x")], ["note"])
    text = render(table)
    assert text.splitlines()[1] == "0,0.333333333333,"
    back = parse_csv(text)
    assert back.header == table.header and back.comments == ["note"]
    assert all(rows_close(a, b, rel=1e-11) for a, b in zip(back.rows, table.rows))
    assert format_cell(float("nan")) == ""


def test_console_entry_point(tmp_path):
    out = tmp_path / "ep.csv"
    proc = subprocess.run([sys.executable, "-m", "nhgauss.cli", "ep", "--set", "topology=ternary",
                           "--out", str(out)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert out.read_text().splitlines()[1].startswith("ternary,1,1.06066017178")


def test_svg_output(tmp_path):
    pytest.importorskip("matplotlib")
    code, _ = run(tmp_path, "spectrum", "--set", "axis1=J:0.5:3:5", "--format", "csv+svg", name="s.csv")
    assert code == 0
    assert (tmp_path / "s.svg").read_text().lstrip().startswith("<?xml")

import configparser
import csv
import subprocess
import sys

import pytest

from wishart_edge import __version__
from wishart_edge.cli import main, parse_config


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def err_line(capsys):
    lines = capsys.readouterr().err.strip().splitlines()
    assert len(lines) == 1
    return lines[0]


def test_tw_table(tmp_path):
    out = tmp_path / "tw"
    assert main(["--output", str(out), "tw-table", "--grid", "-6:4:0.05"]) == 0
    table = rows(out / "tw_table.csv")
    assert table[0] == ["s", "q", "F1", "F2", "f1", "f2"]
    assert len(table) == 202
    assert float(table[1][0]) == -6.0 and float(table[-1][0]) == 4.0
    assert (out / "VERSION").read_text().strip() == f"wishart-edge {__version__}"
    cfg = configparser.ConfigParser()
    cfg.read(out / "config.ini")
    assert cfg["tw-table"]["grid"] == "-6:4:0.05"
    assert b"\r" not in (out / "tw_table.csv").read_bytes()


def test_paths_catalan_row(tmp_path):
    assert main(["--output", str(tmp_path), "paths", "--mmax", "20"]) == 0
    table = rows(tmp_path / "g_coefficients.csv")
    row5 = next(r for r in table[1:] if r[0] == "5")
    assert sum(int(v) for v in row5[1:]) == 42
    assert "hold" in (tmp_path / "functional_equation.txt").read_text()
    assert main(["--output", str(tmp_path), "paths", "--which", "gprime", "--mmax", "6", "--check", "0"]) == 0
    assert (tmp_path / "gprime_coefficients.csv").exists()


def test_invalid_family(tmp_path, capsys):
    code = main(["--output", str(tmp_path), "edge-exp", "--n", "5", "--p", "5", "--family", "cauchy"])
    assert code != 0 and code == 1
    line = err_line(capsys)
    assert line.startswith("error kind=config key=family ")


def test_replicas_negative_in_file(tmp_path, capsys):
    ini = tmp_path / "run.ini"
    ini.write_text("[edge-exp]\nn = 5\np = 5\nreplicas = -5\n")
    assert main(["--config", str(ini), "--output", str(tmp_path / "o"), "edge-exp"]) == 1
    line = err_line(capsys)
    assert "key=replicas" in line and "run.ini:4 [edge-exp]" in line


def test_empty_file_plus_required_flags(tmp_path):
    ini = tmp_path / "empty.ini"
    ini.write_text("")
    command, values, _, _ = parse_config(["--config", str(ini), "sample", "--n", "4", "--p", "3"])
    assert command == "sample"
    assert values["family"] == "gaussian_real" and values["seed"] == 0 and values["top"] == 10


def test_precedence(tmp_path):
    ini = tmp_path / "c.ini"
    ini.write_text("[moments]\nn = 10\np = 10\nreplicas = 7\nworkers = 3\n")
    _, values, _, _ = parse_config(["--config", str(ini), "moments"])
    assert values["replicas"] == 7 and values["workers"] == 3
    _, values, _, _ = parse_config(["--config", str(ini), "moments", "--replicas", "9"])
    assert values["replicas"] == 9
    _, values, _, _ = parse_config(["--config", str(ini), "--workers", "2", "moments"])
    assert values["workers"] == 2
    _, values, _, _ = parse_config(["--config", str(ini), "--workers", "2", "moments", "--workers", "4"])
    assert values["workers"] == 4


@pytest.mark.parametrize("text,key,fragment", [
    ("[sample]\nn = 4\ncolour = red\n", "colour", "unknown key"),
    ("[sample]\nn = four\n", "n", "c.ini"),
    ("[bogus]\nn = 4\n", "-", "unknown section"),
])
def test_config_errors(tmp_path, capsys, text, key, fragment):
    ini = tmp_path / "c.ini"
    ini.write_text(text)
    assert main(["--config", str(ini), "--output", str(tmp_path / "o"), "sample", "--p", "3"]) == 1
    line = err_line(capsys)
    assert f"key={key} " in line and fragment in line


def test_missing_required(tmp_path, capsys):
    assert main(["--output", str(tmp_path), "sample", "--n", "4"]) == 1
    assert "key=p " in err_line(capsys)


def test_unknown_flag(tmp_path, capsys):
    assert main(["--output", str(tmp_path), "sample", "--n", "4", "--p", "4", "--bogus", "1"]) == 1
    assert err_line(capsys).startswith("error kind=usage")


def test_env_output_root(tmp_path, monkeypatch):
    monkeypatch.setenv("WISHART_EDGE_OUTPUT", str(tmp_path))
    assert main(["sample", "--n", "6", "--p", "4", "--top", "2"]) == 0
    table = rows(tmp_path / "sample" / "eigenvalues.csv")
    assert table[0] == ["index", "lambda", "rescaled"] and len(table) == 3


def test_edge_exp_report_roundtrip(tmp_path, capsys):
    out = tmp_path / "e"
    args = ["--output", str(out), "edge-exp", "--n", "20", "--p", "20", "--replicas", "40", "--seed", "3"]
    assert main(args) == 0
    first = (out / "records.csv").read_bytes()
    assert main(args) == 0
    assert (out / "records.csv").read_bytes() == first
    assert main(["--output", str(tmp_path / "r"), "report", "--input", str(out)]) == 0
    assert "recomputed ks_tracy_widom" in capsys.readouterr().out

    summary = out / "summary.txt"
    text = summary.read_text()
    summary.write_text("\n".join(l if not l.startswith("ks_tracy_widom") else "ks_tracy_widom = 0.999"
                                 for l in text.splitlines()) + "\n")
    assert main(["--output", str(tmp_path / "r"), "report", "--input", str(out)]) == 2
    assert "kind=numerical" in err_line(capsys)


def test_edge_exp_tolerance(tmp_path, capsys):
    out = tmp_path / "t"
    code = main(["--output", str(out), "edge-exp", "--n", "5", "--p", "5", "--replicas", "20",
                 "--tolerance", "0.001"])
    assert code == 3
    assert "kind=tolerance" in err_line(capsys)
    assert "passed = false" in (out / "summary.txt").read_text()
    assert main(["--output", str(tmp_path / "r"), "report", "--input", str(out)]) == 3


def test_report_missing_input(tmp_path, capsys):
    assert main(["--output", str(tmp_path / "r"), "report", "--input", str(tmp_path / "nothing")]) == 1
    assert "key=input" in err_line(capsys)


@pytest.mark.parametrize("mode,header", [
    ("gap", ["s", "fredholm", "painleve", "difference"]),
    ("counts", ["s", "P0", "P1", "P2"]),
    ("real", ["s", "density"]),
    ("laguerre", ["s1", "s2", "laguerre", "airy", "difference"]),
])
def test_kernel_modes(tmp_path, mode, header):
    args = ["--output", str(tmp_path), "kernel", "--mode", mode, "--grid", "-2,0,1", "--k-max", "2",
            "--p", "50"]
    assert main(args) == 0
    table = rows(tmp_path / f"kernel_{mode}.csv")
    assert table[0] == header
    if mode == "gap":
        assert all(abs(float(r[3])) < 1e-8 for r in table[1:])


def test_kernel_bad_mode(tmp_path, capsys):
    assert main(["--output", str(tmp_path), "kernel", "--mode", "wigner"]) == 1
    assert "key=mode" in err_line(capsys)


def test_numerical_failure_exit_code(tmp_path, capsys, monkeypatch):
    from wishart_edge import cli
    from wishart_edge.airy_kernel import FredholmConvergenceError

    def fail(s, m_nodes=60):
        raise FredholmConvergenceError("node doubling changed the determinant")
    monkeypatch.setattr(cli, "fredholm_gap", fail)
    assert main(["--output", str(tmp_path), "kernel", "--grid", "0"]) == 2
    assert err_line(capsys).startswith("error kind=numerical")


def test_grid_range_error(tmp_path, capsys):
    assert main(["--output", str(tmp_path), "tw-table", "--grid", "-14:0:1"]) == 1
    assert "key=grid" in err_line(capsys)


def test_moments(tmp_path):
    assert main(["--output", str(tmp_path), "moments", "--n", "12", "--p", "10", "--replicas", "30",
                 "--m", "1,3"]) == 0
    table = rows(tmp_path / "moments.csv")
    assert [r[0] for r in table[1:]] == ["1", "3"]


def test_validate_quick(tmp_path):
    assert main(["--output", str(tmp_path), "validate", "--quick", "true"]) == 0
    table = rows(tmp_path / "acceptance.csv")
    assert [r[0] for r in table[1:]] == ["1", "2", "3", "4", "5", "7"]
    assert all(r[2] == "true" for r in table[1:])
    assert len((tmp_path / "acceptance.txt").read_text().splitlines()) == 6


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "wishart_edge", "--output", str(tmp_path),
                           "paths", "--mmax", "3"], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    proc = subprocess.run([sys.executable, "-m", "wishart_edge", "--version"], capture_output=True, text=True)
    assert __version__ in proc.stdout

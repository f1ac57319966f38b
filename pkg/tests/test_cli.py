"""Command-line interface, exit codes, file round trips."""

import numpy as np
import pytest

from scatquad.cli import (EXIT_CONFIG, EXIT_OK, EXIT_RUNTIME, EXIT_VALIDATION,
                          main)
from scatquad.geometry import Rectangle
from scatquad.rules import gauss_legendre_product, save_rule


def run(args):
    return main(args)


def test_points_dump(tmp_path):
    out = tmp_path / "pts.txt"
    assert run(["points", "--n", "5", "--out", str(out)]) == EXIT_OK
    lines = out.read_text().strip().splitlines()
    assert len(lines) == 5
    assert lines[0].split() == ["0.5", "0.33333333333333331"]


def test_points_filtered_to_disk(tmp_path):
    out = tmp_path / "pts.txt"
    assert run(["points", "--n", "200", "--domain", "disk:0.5,0.5,0.5",
                "--out", str(out)]) == EXIT_OK
    data = np.loadtxt(out)
    assert len(data) < 200
    assert np.all(np.hypot(data[:, 0] - 0.5, data[:, 1] - 0.5) <= 0.5)


def test_integrate_exactf_f2(tmp_path, capsys):
    out = tmp_path / "res.csv"
    code = run(["integrate", "--domain", "rect:-1,1,-1,1", "--function", "f2",
                "--method", "exactf", "--rule", "gauss:60", "--degree", "60",
                "--out", str(out)])
    assert code == EXIT_OK
    rows = out.read_text().splitlines()
    vals = rows[1].split(",")
    integral = float(vals[4])
    assert abs(integral - (np.pi / 2) ** 2) <= 1e-12 * (np.pi / 2) ** 2


def test_convergence_deterministic_bytes(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["convergence", "--points", "halton:120", "--function", "f1",
            "--method", "lscf", "--degrees", "2:4:14"]
    assert run(args + ["--out", str(a)]) == EXIT_OK
    assert run(args + ["--out", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_convergence_disc_small(tmp_path):
    out = tmp_path / "disc.csv"
    code = run(["convergence", "--points", "halton:150", "--function", "f1",
                "--method", "disc", "--degrees", "2:4:10", "--out", str(out)])
    assert code == EXIT_OK
    lines = out.read_text().splitlines()
    assert len(lines) == 4
    errors = [float(row.split(",")[6]) for row in lines[1:]]
    assert errors[0] > errors[-1]


def test_rulecheck_round_trip(tmp_path, capsys):
    rule = gauss_legendre_product(Rectangle(0, 1, 0, 1), 12)
    path = tmp_path / "r12.txt"
    save_rule(rule, path)
    code = run(["rulecheck", "--rule", f"file:{path}", "--domain", "rect:0,1,0,1"])
    captured = capsys.readouterr().out
    assert code == EXIT_OK
    assert "positivity: true" in captured
    assert "interiority: true" in captured
    residual = float(captured.split("max_relative_moment_residual: ")[1].split()[0])
    assert residual <= 1e-13


def test_rulecheck_tampered_weight(tmp_path, capsys):
    path = tmp_path / "bad.txt"
    path.write_text("dim 2\ndegree 1\ncount 2\n0.25 0.5 0.5\n0.75 0.5 -0.1\n")
    code = run(["rulecheck", "--rule", f"file:{path}", "--domain", "rect:0,1,0,1"])
    assert code == EXIT_VALIDATION
    assert "positivity: false" in capsys.readouterr().out


def test_rulecheck_outside_node(tmp_path, capsys):
    path = tmp_path / "outside.txt"
    path.write_text("dim 2\ndegree 0\ncount 2\n0.5 0.5 0.5\n2.0 0.5 0.5\n")
    code = run(["rulecheck", "--rule", f"file:{path}", "--domain", "rect:0,1,0,1"])
    assert code == EXIT_VALIDATION
    assert "interiority: false" in capsys.readouterr().out


def test_rulecheck_parse_error(tmp_path, capsys):
    path = tmp_path / "broken.txt"
    path.write_text("dim 2\ndegree nope\n")
    code = run(["rulecheck", "--rule", f"file:{path}"])
    assert code == EXIT_VALIDATION


def test_bad_domain_is_config_error(capsys):
    code = run(["integrate", "--domain", "blob:1", "--degree", "4"])
    assert code == EXIT_CONFIG


def test_bad_degrees_is_config_error(capsys):
    code = run(["convergence", "--degrees", "10:0:2"])
    assert code == EXIT_CONFIG


def test_missing_rule_file_is_runtime_or_config(tmp_path, capsys):
    code = run(["integrate", "--points", "halton:50", "--function", "f1",
                "--method", "exactf", "--rule", "file:/nonexistent.txt",
                "--degree", "4"])
    assert code in (EXIT_CONFIG, EXIT_RUNTIME)


def test_pointwise_csv(tmp_path):
    out = tmp_path / "pw.csv"
    code = run(["pointwise", "--points", "halton:200", "--function", "f1",
                "--method", "disc", "--test-points", "25", "--out", str(out)])
    assert code == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == "index,error,estimate,mean_error,mean_estimate"
    assert len(lines) == 26


def test_values_file_route(tmp_path):
    vals = tmp_path / "vals.txt"
    from scatquad.geometry import halton
    pts = halton(80)
    vals.write_text("".join(f"{float(x)!r} {float(y)!r} 1.5\n" for x, y in pts.points))
    out = tmp_path / "out.csv"
    code = run(["integrate", "--function", f"file:{vals}", "--method", "lscf",
                "--degree", "2", "--out", str(out)])
    assert code == EXIT_OK
    integral = float(out.read_text().splitlines()[1].split(",")[4])
    assert integral == pytest.approx(1.5, rel=1e-12)

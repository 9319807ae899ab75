import os
import subprocess
import sys

import numpy as np
import pytest

from planelast import generate_cook_mesh, read_mesh, write_mesh
from planelast.cli import main, parse_config


def run_cli(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_alpha_subcommand(capsys):
    code, out, err = run_cli(
        ["alpha", "--h", "2.57881", "--lambda", "7.5e6",
         "--d-omega", "76.8375"], capsys)
    assert code == 0
    assert float(out.strip()) == pytest.approx(0.214, abs=0.002)


def test_alpha_full_precision(capsys):
    code, out, _ = run_cli(
        ["alpha", "--h", "0.5", "--lambda", "1e4", "--d-omega", "4.0",
         "--full-precision"], capsys)
    assert code == 0
    value = float(out.strip())
    assert out.strip() == repr(value)


def test_unknown_subcommand_exits_1(capsys):
    code, _, err = run_cli(["frobnicate"], capsys)
    assert code == 1
    assert "usage" in err.lower()


def test_missing_subcommand_exits_1(capsys):
    code, _, err = run_cli([], capsys)
    assert code == 1


def test_unknown_flag_exits_1(capsys):
    code, _, err = run_cli(["alpha", "--h", "1", "--lambda", "10",
                            "--d-omega", "4", "--bogus"], capsys)
    assert code == 1


def test_example1_two_levels(tmp_path, capsys):
    code, _, _ = run_cli(
        ["example1", "--lambda", "1000", "--levels", "2", "--n0", "4",
         "--outdir", str(tmp_path)], capsys)
    assert code == 0
    for pol in ("one", "star"):
        for norm in ("l2", "h1"):
            path = tmp_path / "example1" / ("lambda1000_alpha%s_%s.csv"
                                            % (pol, norm))
            assert path.exists()
            lines = path.read_text().strip().split("\n")
            assert len(lines) == 3


def test_example1_single_policy_flag(tmp_path, capsys):
    code, _, _ = run_cli(
        ["example1", "--lambda", "1000", "--levels", "2", "--n0", "4",
         "--alpha", "star", "--outdir", str(tmp_path)], capsys)
    assert code == 0
    files = sorted(os.listdir(tmp_path / "example1"))
    assert files == ["lambda1000_alphastar_h1.csv",
                     "lambda1000_alphastar_l2.csv"]


def test_idempotent_outputs(tmp_path, capsys):
    argv = ["example1", "--lambda", "1000", "--levels", "2", "--n0", "4",
            "--outdir", str(tmp_path)]
    assert run_cli(argv, capsys)[0] == 0
    first = (tmp_path / "example1" / "lambda1000_alphastar_l2.csv").read_bytes()
    assert run_cli(argv, capsys)[0] == 0
    second = (tmp_path / "example1" / "lambda1000_alphastar_l2.csv").read_bytes()
    assert first == second


def test_alpha_one_equals_star_when_uncapped(tmp_path, capsys):
    # lambda=2 <= d_omega/h on the n0=4 square: identical solutions
    base = ["example1", "--lambda", "2", "--levels", "2", "--n0", "4"]
    run_cli(base + ["--alpha", "one", "--outdir", str(tmp_path / "one")],
            capsys)
    run_cli(base + ["--alpha", "star", "--outdir", str(tmp_path / "star")],
            capsys)
    a = (tmp_path / "one" / "example1" / "lambda2_alphaone_l2.csv").read_text()
    b = (tmp_path / "star" / "example1" / "lambda2_alphastar_l2.csv").read_text()
    assert a == b


def test_cook_smoke(tmp_path, capsys):
    code, _, _ = run_cli(
        ["cook", "--levels", "2", "--n0", "2", "--alpha", "star",
         "--outdir", str(tmp_path)], capsys)
    assert code == 0
    assert (tmp_path / "cook" / "tip_displacement_star.csv").exists()
    assert (tmp_path / "cook" / "deformed_star_lvl1.vtk").exists()


def test_solve_square_config(tmp_path, capsys):
    cfg = tmp_path / "square.cfg"
    cfg.write_text("domain=square\nn0=4\nrefinements=1\nlambda=1000\n"
                   "alpha=star\n")
    code, out, _ = run_cli(["solve", "--config", str(cfg)], capsys)
    assert code == 0
    values = dict(line.split(" = ") for line in out.strip().split("\n"))
    assert int(values["Nh"]) == 18
    assert 0.0 < float(values["alpha"]) <= 1.0
    assert "l2_error" in values


def test_solve_cook_config(tmp_path, capsys):
    cfg = tmp_path / "cook.cfg"
    cfg.write_text("domain=cook\nn0=2\nrefinements=2\nalpha=star\n")
    code, out, _ = run_cli(["solve", "--config", str(cfg)], capsys)
    assert code == 0
    assert "u2(48,52)" in out


def test_solve_no_dirichlet_exits_2(tmp_path, capsys):
    # a cook domain whose clamped edge was re-tagged as traction-free
    mesh = generate_cook_mesh(2)
    tags = mesh.boundary_tags.copy()
    tags[tags == 1] = 3
    from planelast.mesh import Mesh
    broken = Mesh(mesh.nodes, mesh.triangles, mesh.boundary_edges, tags)
    path = tmp_path / "broken.mesh"
    write_mesh(broken, path)

    cfg = tmp_path / "broken.cfg"
    cfg.write_text("domain=cook\nmesh=%s\n" % path)
    code, _, err = run_cli(["solve", "--config", str(cfg)], capsys)
    assert code == 2
    assert "dirichlet" in err.lower() or "numerical failure" in err.lower()


def test_solve_missing_config_exits_1(tmp_path, capsys):
    code, _, _ = run_cli(["solve", "--config", str(tmp_path / "nope.cfg")],
                         capsys)
    assert code == 1


def test_study_rejects_mesh_key(tmp_path, capsys):
    mesh = generate_cook_mesh(2)
    path = tmp_path / "m.mesh"
    write_mesh(mesh, path)
    cfg = tmp_path / "c.cfg"
    cfg.write_text("domain=cook\nmesh=%s\n" % path)
    code, _, err = run_cli(["cook", "--config", str(cfg), "--levels", "2"],
                           capsys)
    assert code == 1
    assert "mesh" in err


def test_config_rejects_unknown_key(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("domain=square\nwibble=3\n")
    from planelast.cli import UsageError
    with pytest.raises(UsageError):
        parse_config(str(cfg))


def test_config_rejects_bad_domain(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("domain=triangle\n")
    from planelast.cli import UsageError
    with pytest.raises(UsageError):
        parse_config(str(cfg))


def test_refine_mesh_roundtrip(tmp_path, capsys):
    mesh = generate_cook_mesh(2)
    src = tmp_path / "in.mesh"
    dst = tmp_path / "out.mesh"
    write_mesh(mesh, src)
    code, _, _ = run_cli(["refine-mesh", str(src), str(dst), "--times", "2"],
                         capsys)
    assert code == 0
    refined = read_mesh(dst)
    assert refined.n_triangles == 16 * mesh.n_triangles
    assert refined.h == pytest.approx(mesh.h / 4, rel=1e-14)


def test_refine_mesh_bad_file_exits_1(tmp_path, capsys):
    src = tmp_path / "bad.mesh"
    src.write_text("mesh3d 1\n")
    code, _, err = run_cli(["refine-mesh", str(src), str(tmp_path / "o")],
                           capsys)
    assert code == 1
    assert "format" in err.lower()


def test_console_entry_point():
    result = subprocess.run(
        [sys.executable, "-m", "planelast", "alpha", "--h", "0.239",
         "--lambda", "1000", "--d-omega", "4.442882938158366"],
        capture_output=True, text=True)
    assert result.returncode == 0
    assert float(result.stdout.strip()) == pytest.approx(0.423, abs=0.002)

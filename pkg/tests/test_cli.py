import subprocess
import sys

import numpy as np
import pytest

from lorentz_capillary import cli, files

S2 = np.sqrt(2.0)


@pytest.fixture
def run(tmp_path, monkeypatch, capsys):
    monkeypatch.delenv(files.OUTPUT_ENV, raising=False)

    def _run(*argv):
        code = cli.main(["--out", str(tmp_path), *argv])
        out = capsys.readouterr()
        return code, out.out, out.err

    _run.dir = tmp_path
    return _run


def _values(line):
    return dict(kv.split("=", 1) for kv in line.split())


def test_gen_cap_prints_closed_form(run):
    code, out, _ = run("gen", "cap", "r=1", f"c={-S2:.17g}", "res=128")
    assert code == 0
    v = _values(out.strip().splitlines()[-1])
    assert float(v["closed_form_area"]) == pytest.approx(2 * np.pi * (S2 - 1), rel=1e-11)
    assert float(v["area"]) == pytest.approx(2 * np.pi * (S2 - 1), rel=1e-3)
    assert float(v["volume"]) == pytest.approx(float(v["closed_form_volume"]), rel=1e-3)
    obj = (run.dir / "gen_cap.obj").read_text()
    assert obj.startswith("# [gen]")
    assert (run.dir / "gen_cap_vertices.csv").exists()


def test_gen_disc_area(run):
    code, out, _ = run("gen", "disc", "h=0", "res=64")
    assert code == 0
    assert float(_values(out.strip().splitlines()[-1])["area"]) == pytest.approx(np.pi, rel=1e-3)


def test_gen_rotprofile_is_an_annulus(run):
    code, _, _ = run("gen", "rotprofile", "H=1", "c=0.5", "res=16")
    assert code == 0
    assert "# inner_boundary" in (run.dir / "gen_rotprofile.obj").read_text()


def test_gen_rejects_unknown_surface_and_low_resolution(run):
    assert run("gen", "torus")[0] == 1
    code, _, err = run("gen", "cap", "res=4")
    assert code == 1 and "minimum resolution" in err


def test_solve_perturbed_cap(run):
    code, out, _ = run("solve", "support=pseudosphere", "lambda=1", "seed=7", "amplitude=0.02", "res=24")
    assert code == 0
    assert "classification=HyperbolicCap" in out
    for name in ("solve_trace.csv", "solve_mesh.obj", "solve_report.csv", "solve_summary.txt"):
        assert (run.dir / name).read_text().startswith("# [solve]")


def test_solve_waist_disc_fixed_point(run):
    code, out, _ = run("solve", "lambda=0", "init=waist-disc", "res=16")
    assert code == 0
    assert "iterations=0" in out and "classification=PlanarDisc" in out


def test_solve_inadmissible_plane_lambda(run):
    code, _, err = run("solve", "support=plane", "lambda=-0.5")
    assert code == 1
    assert "inadmissible lambda for spacelike support" in err


def test_solve_without_iterations_exits_two(run):
    code, out, _ = run("solve", "lambda=1", "seed=3", "amplitude=0.02", "res=16", "max_iters=0")
    assert code == 2
    assert "converged=false" in out


def test_solve_trace_is_reproducible(run, tmp_path):
    args = ("solve", "lambda=1", "seed=5", "amplitude=0.02", "res=16")
    run(*args)
    first = (run.dir / "solve_trace.csv").read_bytes()
    run(*args)
    assert (run.dir / "solve_trace.csv").read_bytes() == first


def test_config_file_and_overrides(run, tmp_path):
    ini = tmp_path / "run.ini"
    ini.write_text("[solve]\nlambda = 0\ninit = waist-disc\nres = 12\n\n[support]\nkind = pseudosphere\n")
    code, out, _ = cli.main(["--config", str(ini), "--out", str(run.dir), "solve", "res=10"]), None, None
    assert code == 0
    assert "# [solve] res=10" in (run.dir / "solve_summary.txt").read_text()


def test_bad_override_syntax(run):
    code, _, err = run("solve", "lambda")
    assert code == 1 and "key=value" in err
    assert run("solve", "lambda=abc")[0] == 1


def test_verify_unknown_suite(run):
    code, _, err = run("verify", "nosuch")
    assert code == 1 and "unknown suite" in err


def test_verify_covering(run):
    code, out, _ = run("verify", "covering")
    assert code == 0
    assert "suite=covering result=pass" in out
    assert (run.dir / "verify_covering.txt").exists()


def test_hopf_command(run):
    code, out, _ = run("hopf", "surface=cap", "n_r=32", "n_theta=64")
    assert code == 0
    v = _values(out.splitlines()[0])
    assert float(v["max_phi"]) < 1e-4
    assert (run.dir / "hopf_cap.csv").read_text().startswith("# [hopf]")
    assert run("hopf", "surface=torus", "n_r=16")[0] == 1


def test_export_and_report(run):
    run("gen", "cap", "res=16")
    mesh_path = str(run.dir / "gen_cap.obj")
    assert run("export", f"mesh={mesh_path}", "name=again")[0] == 0
    assert (run.dir / "again_vertices.csv").exists()
    code, out, _ = run("report", f"mesh={mesh_path}")
    assert code == 0 and "classification=HyperbolicCap" in out
    assert run("report", "mesh=/nonexistent.obj")[0] == 1
    assert run("export")[0] == 1


def test_missing_subcommand_is_a_usage_error(run):
    assert run()[0] == 1


def test_output_dir_from_environment(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(files.OUTPUT_ENV, str(tmp_path / "envout"))
    assert cli.main(["gen", "disc", "res=8"]) == 0
    assert (tmp_path / "envout" / "gen_disc.obj").exists()


def test_console_script(tmp_path):
    out = subprocess.run([sys.executable, "-m", "lorentz_capillary.cli", "--out", str(tmp_path), "verify", "nosuch"],
                         capture_output=True, text=True)
    assert out.returncode == 1

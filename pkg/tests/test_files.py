import numpy as np
import pytest

from lorentz_capillary import files, flow, mesh


def test_config_round_trip(tmp_path):
    p = tmp_path / "run.ini"
    p.write_text("[solve]\nlambda = 1\nres = 16\n\n[support]\nkind = pseudosphere\n")
    cfg = files.load_config(p)
    assert cfg == {"solve": {"lambda": "1", "res": "16"}, "support": {"kind": "pseudosphere"}}
    merged = files.merge(cfg, "solve", {"lambda": "2", "seed": "3"})
    assert merged["solve"] == {"lambda": "2", "res": "16", "seed": "3"}
    assert cfg["solve"]["lambda"] == "1"


def test_echo_header_is_sorted_and_commented():
    h = files.echo_header({"b": {"y": "2", "x": "1"}, "a": {"k": "v"}})
    assert h.splitlines() == ["# [a] k=v", "# [b] x=1", "# [b] y=2"]
    assert files.echo_header({}) == ""


def test_output_dir_precedence(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv(files.OUTPUT_ENV, raising=False)
    assert files.output_dir() == tmp_path.joinpath("out").relative_to(tmp_path)
    assert files.output_dir(config={"output": {"dir": "cfg"}}).name == "cfg"
    monkeypatch.setenv(files.OUTPUT_ENV, str(tmp_path / "env"))
    assert files.output_dir(config={"output": {"dir": "cfg"}}) == tmp_path / "env"
    assert files.output_dir(str(tmp_path / "flag")) == tmp_path / "flag"
    assert (tmp_path / "flag").is_dir()


@pytest.mark.parametrize("make", [
    lambda: flow.analytic_cap(-np.sqrt(2), 1.0, 8),
    lambda: flow.perturb(flow.analytic_disc(0.2, 8), 0.01, 4),
    lambda: flow.revolve_profile(flow.rotational_cmc_profile(1.0, 0.5, (0.3, 1.2), 9)),
])
def test_obj_round_trip_is_exact(tmp_path, make):
    g = make()
    path = files.write_obj(g, tmp_path / "m.obj", "# header\n")
    h = files.read_obj(path)
    np.testing.assert_array_equal(h.points, g.points)
    np.testing.assert_array_equal(h.triangles, g.triangles)
    np.testing.assert_array_equal(h.boundary, g.boundary)
    assert h.layout is not None and h.layout.kind == g.layout.kind
    assert path.read_text().startswith("# header\n")


def test_obj_without_layout_keeps_boundary(tmp_path):
    g = flow.analytic_cap(-np.sqrt(2), 1.0, 6)
    text = "\n".join(l for l in files.obj_text(g).splitlines() if not l.startswith("# layout")) + "\n"
    (tmp_path / "m.obj").write_text(text)
    h = files.read_obj(tmp_path / "m.obj")
    assert h.layout is None
    np.testing.assert_array_equal(h.boundary, g.boundary)
    assert mesh.area(h) == mesh.area(g)


def test_obj_without_boundary_is_rejected(tmp_path):
    (tmp_path / "m.obj").write_text("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n")
    with pytest.raises(ValueError):
        files.read_obj(tmp_path / "m.obj")


def test_vertex_table():
    g = flow.analytic_disc(0.0, 4)
    lines = files.vertex_table(g).splitlines()
    assert lines[0] == "vertex_id,x,y,z,H,boundary"
    assert len(lines) == g.n_vertices + 1
    assert sum(l.endswith(",1") for l in lines[1:]) == len(g.boundary)


def test_outputs_are_byte_stable(tmp_path):
    g = flow.analytic_cap(-np.sqrt(2), 1.0, 8)
    a = files.write_obj(g, tmp_path / "a.obj").read_bytes()
    b = files.write_obj(files.read_obj(tmp_path / "a.obj"), tmp_path / "b.obj").read_bytes()
    assert a == b

"""Run configuration and plain-text outputs (OBJ meshes, CSV tables, verdicts).

Configuration is INI-style: ``[section]`` headers with ``key = value`` lines.
Every file written here starts with ``#`` lines echoing the resolved
configuration, so outputs carry their provenance and stay byte-identical for
identical inputs.
"""
from __future__ import annotations

import configparser
import os
from pathlib import Path

import numpy as np

from . import mesh, variational
from .mesh import SpacelikeGraph

OUTPUT_ENV = "LORENTZ_CAPILLARY_OUTPUT_DIR"


def load_config(path) -> dict:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    with open(path) as fh:
        cp.read_file(fh)
    return {s: dict(cp[s]) for s in cp.sections()}


def merge(config: dict, section: str, overrides: dict) -> dict:
    out = {s: dict(v) for s, v in config.items()}
    out.setdefault(section, {}).update(overrides)
    return out


def echo_header(config: dict) -> str:
    lines = []
    for s in sorted(config):
        for k in sorted(config[s]):
            lines.append(f"# [{s}] {k}={config[s][k]}")
    return "\n".join(lines) + ("\n" if lines else "")


def output_dir(flag=None, config: dict | None = None) -> Path:
    """--out flag, then the environment override, then [output] dir, then ./out."""
    if flag:
        d = flag
    elif os.environ.get(OUTPUT_ENV):
        d = os.environ[OUTPUT_ENV]
    elif config and "output" in config and config["output"].get("dir"):
        d = config["output"]["dir"]
    else:
        d = "out"
    p = Path(d)
    p.mkdir(parents=True, exist_ok=True)
    if not os.access(p, os.W_OK):
        raise PermissionError(f"output directory {p} is not writable")
    return p


def write_text(path, header: str, body: str) -> Path:
    path = Path(path)
    with open(path, "w", newline="\n") as fh:
        fh.write(header)
        fh.write(body)
    return path


def _f(v: float) -> str:
    return f"{v:.17g}"


def obj_text(g: SpacelikeGraph) -> str:
    lines = []
    lay = g.layout
    if lay is not None:
        ang = "single" if np.allclose(lay.angles, 2 * np.pi * np.arange(lay.n_sectors) / lay.n_sectors) else "custom"
        lines.append(
            f"# layout kind={lay.kind} rings={lay.n_rings} sectors={lay.n_sectors} "
            f"center={_f(lay.center[0])},{_f(lay.center[1])} angles={ang}"
        )
    lines.append("# boundary " + " ".join(map(str, g.boundary)))
    if g.inner_boundary is not None:
        lines.append("# inner_boundary " + " ".join(map(str, g.inner_boundary)))
    for x in g.points:
        lines.append(f"v {_f(x[0])} {_f(x[1])} {_f(x[2])}")
    for t in g.triangles:
        lines.append(f"f {t[0] + 1} {t[1] + 1} {t[2] + 1}")
    return "\n".join(lines) + "\n"


def write_obj(g: SpacelikeGraph, path, header: str = "") -> Path:
    return write_text(path, header, obj_text(g))


def read_obj(path) -> SpacelikeGraph:
    """Read a mesh written by :func:`write_obj`.  Polar layouts are rebuilt from
    the layout comment; other meshes keep their boundary list."""
    pts, tri, layout, boundary, inner = [], [], None, None, None
    with open(path) as fh:
        for line in fh:
            if line.startswith("v "):
                pts.append([float(t) for t in line.split()[1:4]])
            elif line.startswith("f "):
                tri.append([int(t.split("/")[0]) - 1 for t in line.split()[1:4]])
            elif line.startswith("# layout"):
                layout = dict(kv.split("=", 1) for kv in line.split()[2:])
            elif line.startswith("# boundary"):
                boundary = np.array(line.split()[2:], dtype=np.int64)
            elif line.startswith("# inner_boundary"):
                inner = np.array(line.split()[2:], dtype=np.int64)
    P = np.array(pts, dtype=float)
    T = np.array(tri, dtype=np.int64)
    if layout is not None and layout.get("angles") == "single":
        n, m = int(layout["rings"]), int(layout["sectors"])
        c = tuple(float(v) for v in layout["center"].split(","))
        if layout["kind"] == "disc":
            xy, t2, lay = mesh.polar_disc(1.0, n, m, c)
        else:
            d = P[:m, :2] - np.array(c)
            r_in = float(np.hypot(d[0, 0], d[0, 1]))
            xy, t2, lay = mesh.polar_annulus(r_in, 2 * r_in + 1.0, n, m, c)
        if len(xy) == len(P) and np.array_equal(t2, T):
            g = mesh.build_graph((xy, t2, lay), np.zeros(len(P)))
            return g.with_points(P)
    if boundary is None:
        raise ValueError("mesh file has no boundary record")
    return SpacelikeGraph(P, T, boundary, inner)


def vertex_table(g: SpacelikeGraph) -> str:
    """Per-vertex x, y, z and H; boundary H is extrapolated along the rays."""
    H = variational.vertex_mean_curvature(g)
    flag = np.zeros(g.n_vertices, dtype=int)
    flag[g.boundary] = 1
    lines = ["vertex_id,x,y,z,H,boundary"]
    for i, (x, h) in enumerate(zip(g.points, H)):
        lines.append(f"{i},{_f(x[0])},{_f(x[1])},{_f(x[2])},{_f(h)},{flag[i]}")
    return "\n".join(lines) + "\n"

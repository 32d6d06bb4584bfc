"""Command line front end.

    lorentz-capillary gen cap r=1 c=-1.4142135623730951 res=128
    lorentz-capillary solve support=pseudosphere lambda=1 seed=7
    lorentz-capillary verify covering
    lorentz-capillary hopf surface=annulus H=1 c=0.5
    lorentz-capillary export mesh=out/solve_mesh.obj
    lorentz-capillary report mesh=out/solve_mesh.obj support=pseudosphere

Parameters come from an INI file (``--config``; one section per command plus
``[support]`` and ``[output]``) and are overridden by ``key=value`` arguments.
Keys prefixed ``support.`` go to the support section, and ``support=KIND`` sets
its kind.  Exit codes: 0 success, 1 usage or validation error, 2 solver did
not converge.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import files, flow, hopf, mesh, suites, umbilic, variational
from .flow import SolverError
from .mesh import DegenerateMesh, SpacelikeViolation

MIN_RES = 8
EXIT_OK, EXIT_USAGE, EXIT_NOCONV = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


# -- parameter access --------------------------------------------------------------


class Params:
    """Typed view of one config section."""

    def __init__(self, section: dict):
        self.raw = section

    def _get(self, key, default):
        if key in self.raw:
            return self.raw[key]
        if default is _REQUIRED:
            raise UsageError(f"missing parameter {key!r}")
        return default

    def float(self, key, default=None):
        v = self._get(key, default)
        if v is None:
            return None
        try:
            return float(v)
        except (TypeError, ValueError):
            raise UsageError(f"{key}={v!r} is not a number") from None

    def int(self, key, default=None):
        v = self._get(key, default)
        try:
            return int(v)
        except (TypeError, ValueError):
            raise UsageError(f"{key}={v!r} is not an integer") from None

    def str(self, key, default=None):
        v = self._get(key, default)
        return None if v is None else str(v)

    def vec(self, key, default):
        v = self._get(key, default)
        if isinstance(v, str):
            try:
                v = [float(t) for t in v.replace(" ", "").split(",")]
            except ValueError:
                raise UsageError(f"{key}={v!r} is not a comma separated vector") from None
        return np.asarray(v, dtype=float)

    def res(self, key="res", default=32):
        n = self.int(key, default)
        if n < MIN_RES:
            raise UsageError(f"{key}={n} is below the minimum resolution {MIN_RES}")
        return n


_REQUIRED = object()


def parse_overrides(items):
    cmd, sup = {}, {}
    for it in items:
        if "=" not in it:
            raise UsageError(f"expected key=value, got {it!r}")
        k, v = it.split("=", 1)
        k = k.strip()
        if not k:
            raise UsageError(f"empty key in {it!r}")
        if k == "support":
            sup["kind"] = v
        elif k.startswith("support."):
            sup[k[len("support."):]] = v
        else:
            cmd[k] = v
    return cmd, sup


def resolve(args, section: str, overrides):
    config = files.load_config(args.config) if args.config else {}
    cmd, sup = parse_overrides(overrides)
    config = files.merge(config, section, cmd)
    if sup or "support" in config:
        config = files.merge(config, "support", sup)
    return config


def build_support(config, default="pseudosphere"):
    s = dict(config.get("support", {}))
    s.setdefault("kind", default)
    p = Params(s)
    kind = p.str("kind").lower()
    center = p.vec("center", [0.0, 0.0, 0.0])
    if kind == "plane":
        if "normal" in s:
            return umbilic.SpacelikePlane(center, p.vec("normal", None))
        return umbilic.plane_through(p.float("height", center[2]), p.vec("slope", [0.0, 0.0]))
    if kind == "hyperbolic":
        return umbilic.HyperbolicPlane(center, p.float("radius", 1.0), p.int("branch", 1))
    if kind == "pseudosphere":
        return umbilic.Pseudosphere(center, p.float("radius", 1.0))
    raise UsageError(f"unknown support kind {kind!r}")


def _write(out, name, header, body):
    path = out / name
    files.write_text(path, header, body)
    print(f"wrote {path}")
    return path


def _fmt(v):
    return f"{v:.12g}"


# -- gen -------------------------------------------------------------------------------


def cap_closed_forms(c, r):
    """Area and enclosed volume of the cap H^2((0,0,c), r) cut by the unit pseudosphere."""
    z = umbilic.cap_boundary_height(c, r)
    rho2 = 1.0 + z * z
    area = 2 * np.pi * r * (np.sqrt(r * r + rho2) - r)
    branch = 1 if z >= c else -1
    column = c * rho2 / 2 + branch * ((r * r + rho2) ** 1.5 - r**3) / 3
    return area, 2 * np.pi * column - 2 * np.pi * z**3 / 3


def disc_closed_forms(h):
    return np.pi * (1 + h * h), np.pi * (h + h**3 / 3)


def cmd_gen(args) -> int:
    config = resolve(args, "gen", [f"surface={args.surface}"] + args.overrides)
    p = Params(config["gen"])
    kind = p.str("surface")
    n = p.res()
    S = umbilic.Pseudosphere()
    closed = None
    if kind == "cap":
        c, r = p.float("c", -np.sqrt(2)), p.float("r", 1.0)
        g = flow.analytic_cap(c, r, n)
        closed = cap_closed_forms(c, r)
    elif kind == "disc":
        h = p.float("h", 0.0)
        g = flow.analytic_disc(h, n)
        closed = disc_closed_forms(h)
    elif kind == "rotprofile":
        H, c = p.float("H", 1.0), p.float("c", 0.5)
        lo, hi = p.float("rho_min", 0.5 if c != 0 else 0.0), p.float("rho_max", 1.0)
        prof = flow.rotational_cmc_profile(H, c, [lo, hi], n + 1)
        g = flow.revolve_profile(prof)
        S = None
    else:
        raise UsageError(f"unknown surface {kind!r} (cap, disc, rotprofile)")
    out = files.output_dir(args.out, config)
    header = files.echo_header(config)
    _write(out, f"gen_{kind}.obj", header, files.obj_text(g))
    _write(out, f"gen_{kind}_vertices.csv", header, files.vertex_table(g))
    line = f"area={_fmt(mesh.area(g))}"
    if closed is not None:
        line += f" closed_form_area={_fmt(closed[0])}"
        line += f" volume={_fmt(mesh.enclosed_volume(g, S))} closed_form_volume={_fmt(closed[1])}"
    print(line)
    return EXIT_OK


# -- solve -----------------------------------------------------------------------------


def _initial_graph(p: Params, S, lam, H, n):
    init = p.str("init", "auto")
    if init == "auto":
        return flow.initial_guess(S, lam, H, n)
    if init in ("waist-disc", "disc"):
        return flow.analytic_disc(p.float("h", 0.0 if init == "waist-disc" else -lam), n, S=S)
    if init == "cap":
        return flow.analytic_cap(p.float("c", -np.sqrt(2)), p.float("r", 1.0), n, S=S)
    if init == "support-piece":
        return flow.support_piece(S, p.float("a0", 1.0), n)
    if init.endswith(".obj"):
        return files.read_obj(init)
    raise UsageError(f"unknown init {init!r} (auto, waist-disc, disc, cap, support-piece or an .obj path)")


def solve_from_config(config):
    p = Params(config["solve"])
    S = build_support(config)
    lam = p.float("lambda", 0.0)
    flow.check_lambda(S, lam)
    vol = p.float("volume", None)
    H = p.float("H", None)
    if H is None and vol is None:
        H = 1.0 if (S.kind == "pseudosphere" and lam > 0) else 0.0
    n = p.res()
    g = _initial_graph(p, S, lam, H, n)
    amp = p.float("amplitude", 0.0)
    if amp:
        g = flow.perturb(g, amp, p.int("seed", 0))
    opts = flow.SolveOptions(
        lam=lam, H_target=H, volume_target=vol, max_iters=p.int("max_iters", 50),
        step0=p.float("step0", 0.25), residual_tol=p.float("residual_tol", 1e-6),
        kkt_tol=p.float("kkt_tol", None), seed=p.int("seed", 0),
    )
    return S, flow.solve_stationary(S, opts, g)


def summary_text(result, cls) -> str:
    rep = result.report
    lines = [
        f"converged={str(result.converged).lower()} iterations={result.iterations} multiplier={_fmt(result.multiplier)}",
        rep.summary(),
        f"classification={cls.kind} rms_fit={cls.rms_fit:.6e} plane_rms={cls.plane_rms:.6e} "
        f"quadric_rms={cls.quadric_rms:.6e}",
    ]
    for k in sorted(cls.params):
        lines.append(f"param {k}={cls.params[k]}")
    return "\n".join(lines) + "\n"


def cmd_solve(args) -> int:
    config = resolve(args, "solve", args.overrides)
    config.setdefault("support", {}).setdefault("kind", "pseudosphere")
    S, result = solve_from_config(config)
    out = files.output_dir(args.out, config)
    header = files.echo_header(config)
    cls = flow.classify(result.graph)
    _write(out, "solve_trace.csv", header, result.trace.to_csv())
    _write(out, "solve_mesh.obj", header, files.obj_text(result.graph))
    _write(out, "solve_report.csv", header, result.report.to_csv())
    text = summary_text(result, cls)
    _write(out, "solve_summary.txt", header, text)
    sys.stdout.write(text)
    return EXIT_OK if result.converged else EXIT_NOCONV


# -- verify ----------------------------------------------------------------------------


def cmd_verify(args) -> int:
    name = args.suite
    if name not in suites.SUITES + ("all",):
        raise UsageError(f"unknown suite {name!r} (choose from {', '.join(suites.SUITES + ('all',))})")
    config = resolve(args, "verify", [f"suite={name}"] + args.overrides)
    res = suites.run_suite(name)
    text = res.text()
    print(text)
    out = files.output_dir(args.out, config)
    _write(out, f"verify_{name}.txt", files.echo_header(config), text + "\n")
    return EXIT_OK if res.ok else EXIT_USAGE


# -- hopf ------------------------------------------------------------------------------


def _hopf_profile(p: Params):
    kind = p.str("surface", "cap")
    if kind == "cap":
        return flow.cap_profile(p.float("c", -np.sqrt(2)), p.float("r", 1.0))
    if kind == "disc":
        return flow.disc_profile(p.float("h", 0.0), p.float("rho_max", 1.0))
    if kind == "annulus":
        return flow.rotational_cmc_profile(
            p.float("H", 1.0), p.float("c", 0.5), [p.float("rho_min", 0.3), p.float("rho_max", 1.2)], 257
        )
    raise UsageError(f"unknown surface {kind!r} (cap, disc, annulus)")


def cmd_hopf(args) -> int:
    config = resolve(args, "hopf", args.overrides)
    p = Params(config["hopf"])
    n_r = p.res("n_r", 128)
    n_theta = p.res("n_theta", 2 * n_r)
    patch = hopf.conformal_parametrize_rotational(_hopf_profile(p), n_r, n_theta)
    F = hopf.hopf_differential(patch)
    b = float(np.max(np.abs(hopf.boundary_imz2phi(F))))
    print(
        f"conformality={patch.conformality_residual():.6e} max_phi={F.max_abs():.6e} "
        f"holomorphicity={hopf.holomorphicity_residual(F):.6e} max_boundary_imz2phi={b:.6e}"
    )
    table = hopf.umbilicity_report(F)
    print(table.rsplit("\n", 1)[-1])
    out = files.output_dir(args.out, config)
    kind = p.str("surface", "cap")
    header = files.echo_header(config)
    _write(out, f"hopf_{kind}.csv", header, F.to_csv())
    _write(out, f"hopf_{kind}_umbilicity.csv", header, table + "\n")
    return EXIT_OK


# -- export and report -------------------------------------------------------------------


def _mesh_arg(p: Params):
    path = p.str("mesh", _REQUIRED)
    try:
        return files.read_obj(path)
    except OSError as exc:
        raise UsageError(f"cannot read mesh {path!r}: {exc.strerror}") from None


def cmd_export(args) -> int:
    config = resolve(args, "export", args.overrides)
    p = Params(config["export"])
    g = _mesh_arg(p)
    out = files.output_dir(args.out, config)
    stem = p.str("name", "export")
    header = files.echo_header(config)
    _write(out, f"{stem}.obj", header, files.obj_text(g))
    _write(out, f"{stem}_vertices.csv", header, files.vertex_table(g))
    return EXIT_OK


def cmd_report(args) -> int:
    config = resolve(args, "report", args.overrides)
    config.setdefault("support", {}).setdefault("kind", "pseudosphere")
    p = Params(config["report"])
    g = _mesh_arg(p)
    S = build_support(config)
    rep = variational.stationarity_report(g, S)
    cls = flow.classify(g)
    text = rep.summary() + "\n" + f"classification={cls.kind} rms_fit={cls.rms_fit:.6e}\n"
    sys.stdout.write(text)
    out = files.output_dir(args.out, config)
    header = files.echo_header(config)
    _write(out, "report.csv", header, rep.to_csv())
    _write(out, "report.txt", header, text)
    return EXIT_OK


# -- entry point ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="lorentz-capillary", description="Spacelike capillary surfaces in Lorentz-Minkowski space.")
    ap.add_argument("--config", help="INI file with [gen], [solve], [verify], [hopf], [export], [report], "
                                     "[support] and [output] sections")
    ap.add_argument("--out", help="output directory (default: $%s, then [output] dir, then ./out)" % files.OUTPUT_ENV)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)
    g = sub.add_parser("gen", help="analytic surface meshes with closed-form area and volume")
    g.add_argument("surface", help="cap, disc or rotprofile")
    g.add_argument("overrides", nargs="*", metavar="key=value")
    g.set_defaults(func=cmd_gen)
    s = sub.add_parser("solve", help="stationary capillary surface")
    s.add_argument("overrides", nargs="*", metavar="key=value")
    s.set_defaults(func=cmd_solve)
    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", help=", ".join(suites.SUITES + ("all",)))
    v.add_argument("overrides", nargs="*", metavar="key=value")
    v.set_defaults(func=cmd_verify)
    h = sub.add_parser("hopf", help="Hopf differential of a rotational patch")
    h.add_argument("overrides", nargs="*", metavar="key=value")
    h.set_defaults(func=cmd_hopf)
    e = sub.add_parser("export", help="re-export a mesh with its vertex table")
    e.add_argument("overrides", nargs="*", metavar="key=value")
    e.set_defaults(func=cmd_export)
    r = sub.add_parser("report", help="stationarity report and classification of a mesh")
    r.add_argument("overrides", nargs="*", metavar="key=value")
    r.set_defaults(func=cmd_report)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SolverError as exc:
        print(f"error: solver failed: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, SpacelikeViolation, DegenerateMesh, PermissionError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

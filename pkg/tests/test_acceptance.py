"""Acceptance criteria.  Each test prints one ``ACCEPTANCE`` line with the
measured quantities, then asserts the same condition."""
import subprocess
import sys
import time

import numpy as np
import pytest

from lorentz_capillary import flow, mesh, suites
from lorentz_capillary.flow import SolveOptions
from lorentz_capillary.lorentz_core import minkowski_inner, normalize
from lorentz_capillary.umbilic import (HyperbolicPlane, Pseudosphere, SpacelikePlane, analytic_contact_angle,
                                       sample_intersection)

S = Pseudosphere()
S2 = np.sqrt(2.0)


@pytest.fixture
def report(capsys):
    def _report(n, title, ok, **detail):
        parts = " ".join(f"{k}={v:.3g}" if isinstance(v, float) else f"{k}={v}" for k, v in detail.items())
        with capsys.disabled():
            print(f"\nACCEPTANCE {n} {'PASS' if ok else 'FAIL'} {title} {parts}")
        assert ok, f"criterion {n} failed: {parts}"

    return _report


def test_c1_umbilical_curvature(report):
    t0 = time.perf_counter()
    worst_err, worst_order = 0.0, np.inf
    for c, r in ((-S2, 1.0), (-1.2, 1.0), (-1.0, 0.5)):
        errs = [np.max(np.abs(mesh.mean_curvature(flow.analytic_cap(c, r, n)) * r - 1.0)) for n in (32, 64, 128)]
        worst_err = max(worst_err, errs[-1])
        worst_order = min(worst_order, np.log2(errs[0] / errs[1]), np.log2(errs[1] / errs[2]))
    dt = time.perf_counter() - t0
    ok = worst_err < 1e-3 and worst_order >= 1.8 and dt < 10
    report(1, "umbilical-curvature", ok, rel_err_128=worst_err, min_order=worst_order, seconds=dt)


def test_c2_contact_angle(report):
    worst = 0.0
    # discrete frames on analytic meshes with 1024 boundary vertices
    for c, r in ((-S2, 1.0), (-1.2, 1.0)):
        g = flow.analytic_cap(c, r, 1024, 1024)
        expect = analytic_contact_angle(HyperbolicPlane(np.array([0.0, 0.0, c]), r, 1))
        worst = max(worst, float(np.max(np.abs(mesh.boundary_frames(g, S).contact - expect))))
    ref = float(np.mean(mesh.boundary_frames(flow.analytic_cap(-S2, 1.0, 1024, 1024), S).contact))
    for h in (0.0, 0.5, -0.8):
        g = flow.analytic_disc(h, 64, 1024)
        expect = analytic_contact_angle(SpacelikePlane(np.array([0.0, 0.0, h])))
        worst = max(worst, float(np.max(np.abs(mesh.boundary_frames(g, S).contact - expect))))
    # off-axis supports: sampled boundary curve with the surfaces' own normals
    v = normalize(np.array([0.3, -0.2, 1.0]))
    for M in (SpacelikePlane(np.array([0.1, 0.2, 0.3]), v), HyperbolicPlane(np.array([0.2, -0.1, -1.6]), 1.1, 1)):
        X, _ = sample_intersection(M, 1024)
        val = minkowski_inner(M.normal(X), S.normal(X))
        worst = max(worst, float(np.max(np.abs(val - analytic_contact_angle(M)))))
    ok = worst < 1e-6 and abs(ref - 1.0) < 1e-6
    report(2, "contact-angle", ok, max_error=worst, reference_cap=ref)


def test_c3_gradient_check(report):
    t0 = time.perf_counter()
    gc = suites.gradient_check(n_rings=96, n_fields=50)
    dt = time.perf_counter() - t0
    e, v = float(gc.energy_errors.max()), float(gc.volume_errors.max())
    ok = e < 1e-3 and v < 1e-3 and dt < 30 and len(gc.energy_errors) == 50
    report(3, "first-variation-gradients", ok, energy_rel_err=e, volume_rel_err=v, seconds=dt)


def test_c4_classification_end_to_end(report):
    t0 = time.perf_counter()
    runs = []
    cap = flow.analytic_cap(-S2, 1.0, 64)
    disc = flow.analytic_disc(0.3, 64)
    for seed in range(5):
        runs.append(("cap", seed, flow.perturb(cap, 0.02, seed), SolveOptions(lam=1.0, H_target=1.0)))
        runs.append(("disc", seed, flow.perturb(disc, 0.05, seed), SolveOptions(lam=-0.3, H_target=0.0)))
    bad, worst_res, worst_rms = [], 0.0, 0.0
    for name, seed, init, opts in runs:
        res = flow.solve_stationary(S, opts, init)
        cls = flow.classify(res.graph)
        rms = cls.rms_fit / res.graph.diameter()
        worst_res, worst_rms = max(worst_res, res.report.residual), max(worst_rms, rms)
        expected = flow.HYPERBOLIC_CAP if name == "cap" else flow.PLANAR_DISC
        if not (res.converged and res.report.residual < 1e-6 and cls.kind == expected and rms < 1e-4):
            bad.append(f"{name}{seed}")
    dt = time.perf_counter() - t0
    ok = not bad and dt < 300
    report(4, "classification-end-to-end", ok, runs=len(runs), failed=",".join(bad) or "-",
           max_residual=worst_res, max_rms_over_diam=worst_rms, seconds=dt)


def test_c5_hopf_suite(report):
    res = suites.hopf_suite()
    report(5, "hopf-suite", res.ok, passed=f"{sum(res.passed)}/{len(res.passed)}")


def test_c6_covering(report):
    res = suites.covering_suite()
    report(6, "covering", res.ok, passed=f"{sum(res.passed)}/{len(res.passed)}")


def test_c7_one_side(report):
    res = suites.one_side_suite()
    report(7, "one-side", res.ok, passed=f"{sum(res.passed)}/{len(res.passed)}")


def test_c8_wetted_area(report):
    errs = []
    for h in (0.1, 0.5, 1.0):
        g = flow.analytic_disc(h, 16, 4096)
        errs.append(abs(mesh.wetted_area(g, S) / (2 * np.pi * h) - 1.0))
    report(8, "wetted-area", max(errs) < 1e-6, max_rel_error=max(errs))


def test_c9_determinism(report, tmp_path):
    traces = []
    for k in range(2):
        out = tmp_path / f"run{k}"
        proc = subprocess.run(
            [sys.executable, "-m", "lorentz_capillary.cli", "--out", str(out), "solve",
             "support=pseudosphere", "lambda=1", "seed=7", "amplitude=0.02", "res=32"],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0, proc.stderr
        traces.append((out / "solve_trace.csv").read_bytes())
    same = traces[0] == traces[1]
    report(9, "determinism", same, trace_bytes=len(traces[0]), identical=str(same).lower())

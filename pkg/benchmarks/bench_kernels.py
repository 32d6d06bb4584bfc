"""Time the numba and numpy kernel backends on cap meshes.

    python3 benchmarks/bench_kernels.py [--rings 32 64 128] [--repeat 5]

Each kernel is called once per backend before timing (numba compiles on the
first call).  Reported times are the best of ``--repeat`` runs; the last
column checks that both backends agree.
"""
import argparse
import time

import numpy as np

from lorentz_capillary import flow, kernels


def _best(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cases(g):
    P, T = g.points, g.triangles
    xy, u = P[:, :2], P[:, 2]
    return {
        "graph_area_terms": lambda: kernels.graph_area_terms(xy, u, T, True)[1],
        "lorentz_area_grad": lambda: kernels.lorentz_area_grad(P, T)[1],
        "volume_grad": lambda: kernels.volume_grad(P, T)[1],
        "face_normal_sum": lambda: kernels.face_normal_sum(P, T, len(P)),
        "count_crossings": lambda: np.array(kernels.count_crossings(P[g.boundary, :2])[0], dtype=float),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rings", type=int, nargs="+", default=[32, 64, 128])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    start = kernels.get_backend()
    print(f"{'kernel':<20} {'rings':>5} {'triangles':>9} {'numba [ms]':>11} {'numpy [ms]':>11} {'speedup':>8} {'max diff':>9}")
    try:
        for n in args.rings:
            g = flow.analytic_cap(-np.sqrt(2), 1.0, n)
            for name, fn in cases(g).items():
                out, times = {}, {}
                for backend in ("numba", "numpy"):
                    kernels.set_backend(backend)
                    out[backend] = np.asarray(fn())
                    times[backend] = _best(fn, args.repeat)
                diff = float(np.max(np.abs(out["numba"] - out["numpy"])))
                print(f"{name:<20} {n:>5} {len(g.triangles):>9} {1e3 * times['numba']:>11.3f} "
                      f"{1e3 * times['numpy']:>11.3f} {times['numpy'] / times['numba']:>8.1f} {diff:>9.1e}")
    finally:
        kernels.set_backend(start)


if __name__ == "__main__":
    main()

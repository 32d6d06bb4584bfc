"""Per-triangle assembly kernels.

Every public function here dispatches to a numba loop implementation or a
vectorised numpy implementation; see :mod:`lorentz_capillary._backend`.
Both produce the same numbers up to rounding; ``tests/test_kernels.py``
checks that.

Triangles are index triples into a vertex array; coordinates are
``(x1, x2, x3)`` with x3 the timelike coordinate (the graph height).
"""
from __future__ import annotations

import numpy as np

from ._backend import njit, requested_backend

_BACKEND = requested_backend()


def get_backend() -> str:
    return _BACKEND


def set_backend(name: str) -> None:
    global _BACKEND
    if name not in ("numba", "numpy"):
        raise ValueError(name)
    _BACKEND = name


# -- numpy implementations ---------------------------------------------------


def _np_shape_gradients(xy, tri):
    p0, p1, p2 = xy[tri[:, 0]], xy[tri[:, 1]], xy[tri[:, 2]]
    e1, e2 = p1 - p0, p2 - p0
    twice = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
    area = 0.5 * twice
    # grad phi_a = rot90(opposite edge) / (2 area)
    g = np.empty((len(tri), 3, 2))
    for a, (b, c) in enumerate(((1, 2), (2, 0), (0, 1))):
        d = xy[tri[:, c]] - xy[tri[:, b]]
        g[:, a, 0] = -d[:, 1] / twice
        g[:, a, 1] = d[:, 0] / twice
    return area, g


def _np_graph_area_terms(xy, u, tri, want_hessian):
    area, g = _np_shape_gradients(xy, tri)
    grad_u = np.einsum("ta,tak->tk", u[tri], g)
    s2 = np.sum(grad_u * grad_u, axis=1)
    w = np.sqrt(np.maximum(1.0 - s2, 0.0))
    total = float(np.sum(area * w))
    dots = np.einsum("tk,tak->ta", grad_u, g)
    local_grad = -(area / w)[:, None] * dots
    grad = np.zeros(len(u))
    np.add.at(grad, tri.ravel(), local_grad.ravel())
    if not want_hessian:
        return total, grad, None, None, None, s2
    gg = np.einsum("tak,tbk->tab", g, g)
    hloc = -(area / w)[:, None, None] * gg - (area / w**3)[:, None, None] * dots[:, :, None] * dots[:, None, :]
    rows = np.repeat(tri, 3, axis=1).ravel()
    cols = np.tile(tri, (1, 3)).ravel()
    return total, grad, rows, cols, hloc.ravel(), s2


def _np_lorentz_area_grad(X, tri):
    x0, x1, x2 = X[tri[:, 0]], X[tri[:, 1]], X[tri[:, 2]]
    e1, e2 = x1 - x0, x2 - x0

    def ip(a, b):
        return a[:, 0] * b[:, 0] + a[:, 1] * b[:, 1] - a[:, 2] * b[:, 2]

    g11, g22, g12 = ip(e1, e1), ip(e2, e2), ip(e1, e2)
    G = g11 * g22 - g12 * g12
    A = 0.5 * np.sqrt(np.maximum(G, 0.0))
    scale = 1.0 / (8.0 * np.where(A > 0, A, np.inf))
    d1 = 2.0 * (g22[:, None] * e1 - g12[:, None] * e2)
    d2 = 2.0 * (g11[:, None] * e2 - g12[:, None] * e1)
    d1[:, 2] *= -1.0
    d2[:, 2] *= -1.0
    d1 *= scale[:, None]
    d2 *= scale[:, None]
    grad = np.zeros_like(X)
    np.add.at(grad, tri[:, 1], d1)
    np.add.at(grad, tri[:, 2], d2)
    np.add.at(grad, tri[:, 0], -(d1 + d2))
    return A, grad, G


def _np_volume_grad(X, tri):
    x0, x1, x2 = X[tri[:, 0]], X[tri[:, 1]], X[tri[:, 2]]
    twice = (x1[:, 0] - x0[:, 0]) * (x2[:, 1] - x0[:, 1]) - (x2[:, 0] - x0[:, 0]) * (x1[:, 1] - x0[:, 1])
    mean_u = (x0[:, 2] + x1[:, 2] + x2[:, 2]) / 3.0
    vol = float(np.sum(0.5 * twice * mean_u))
    grad = np.zeros_like(X)
    for a, (b, c) in enumerate(((1, 2), (2, 0), (0, 1))):
        xb, xc = X[tri[:, b]], X[tri[:, c]]
        # d(twice)/d(x_a) = y_b - y_c ; d(twice)/d(y_a) = x_c - x_b
        np.add.at(grad[:, 0], tri[:, a], 0.5 * (xb[:, 1] - xc[:, 1]) * mean_u)
        np.add.at(grad[:, 1], tri[:, a], 0.5 * (xc[:, 0] - xb[:, 0]) * mean_u)
        np.add.at(grad[:, 2], tri[:, a], twice / 6.0)
    return vol, grad


def _np_face_normal_sum(X, tri, n_vertices):
    x0, x1, x2 = X[tri[:, 0]], X[tri[:, 1]], X[tri[:, 2]]
    e1, e2 = x1 - x0, x2 - x0
    # future-directed Lorentz normal: -(metric flip of the Euclidean cross product)
    c = np.cross(e1, e2)
    c[:, :2] *= -1.0
    acc = np.zeros((n_vertices, 3))
    for a in range(3):
        np.add.at(acc, tri[:, a], c)
    return acc


def _np_count_crossings(P):
    n = len(P)
    a = P
    b = np.roll(P, -1, axis=0)
    i, j = np.triu_indices(n, k=2)
    keep = ~((i == 0) & (j == n - 1))
    i, j = i[keep], j[keep]

    def orient(p, q, r):
        return (q[:, 0] - p[:, 0]) * (r[:, 1] - p[:, 1]) - (q[:, 1] - p[:, 1]) * (r[:, 0] - p[:, 0])

    o1 = orient(a[i], b[i], a[j])
    o2 = orient(a[i], b[i], b[j])
    o3 = orient(a[j], b[j], a[i])
    o4 = orient(a[j], b[j], b[i])
    hit = (o1 * o2 < 0) & (o3 * o4 < 0)
    return int(np.count_nonzero(hit)), (int(i[hit][0]), int(j[hit][0])) if hit.any() else (-1, -1)


# -- numba implementations ---------------------------------------------------


@njit(cache=True)
def _nb_graph_area_terms(xy, u, tri, want_hessian):
    nt = tri.shape[0]
    grad = np.zeros(u.shape[0])
    s2_all = np.empty(nt)
    nh = 9 * nt if want_hessian else 0
    rows = np.empty(nh, dtype=np.int64)
    cols = np.empty(nh, dtype=np.int64)
    vals = np.empty(nh)
    total = 0.0
    g = np.empty((3, 2))
    dots = np.empty(3)
    for t in range(nt):
        i0, i1, i2 = tri[t, 0], tri[t, 1], tri[t, 2]
        ex1 = xy[i1, 0] - xy[i0, 0]
        ey1 = xy[i1, 1] - xy[i0, 1]
        ex2 = xy[i2, 0] - xy[i0, 0]
        ey2 = xy[i2, 1] - xy[i0, 1]
        twice = ex1 * ey2 - ey1 * ex2
        area = 0.5 * twice
        idx = (i0, i1, i2)
        for a in range(3):
            b = idx[(a + 1) % 3]
            c = idx[(a + 2) % 3]
            dx = xy[c, 0] - xy[b, 0]
            dy = xy[c, 1] - xy[b, 1]
            g[a, 0] = -dy / twice
            g[a, 1] = dx / twice
        gx = u[i0] * g[0, 0] + u[i1] * g[1, 0] + u[i2] * g[2, 0]
        gy = u[i0] * g[0, 1] + u[i1] * g[1, 1] + u[i2] * g[2, 1]
        s2 = gx * gx + gy * gy
        s2_all[t] = s2
        w = np.sqrt(max(1.0 - s2, 0.0))
        total += area * w
        for a in range(3):
            dots[a] = gx * g[a, 0] + gy * g[a, 1]
            grad[idx[a]] -= area / w * dots[a]
        if want_hessian:
            k = 9 * t
            for a in range(3):
                for b in range(3):
                    gg = g[a, 0] * g[b, 0] + g[a, 1] * g[b, 1]
                    rows[k] = idx[a]
                    cols[k] = idx[b]
                    vals[k] = -area / w * gg - area / (w * w * w) * dots[a] * dots[b]
                    k += 1
    return total, grad, rows, cols, vals, s2_all


@njit(cache=True)
def _nb_lorentz_area_grad(X, tri):
    nt = tri.shape[0]
    A = np.empty(nt)
    G_all = np.empty(nt)
    grad = np.zeros(X.shape)
    e1 = np.empty(3)
    e2 = np.empty(3)
    for t in range(nt):
        i0, i1, i2 = tri[t, 0], tri[t, 1], tri[t, 2]
        for k in range(3):
            e1[k] = X[i1, k] - X[i0, k]
            e2[k] = X[i2, k] - X[i0, k]
        g11 = e1[0] * e1[0] + e1[1] * e1[1] - e1[2] * e1[2]
        g22 = e2[0] * e2[0] + e2[1] * e2[1] - e2[2] * e2[2]
        g12 = e1[0] * e2[0] + e1[1] * e2[1] - e1[2] * e2[2]
        G = g11 * g22 - g12 * g12
        G_all[t] = G
        a = 0.5 * np.sqrt(max(G, 0.0))
        A[t] = a
        if a <= 0.0:
            continue
        sc = 1.0 / (8.0 * a)
        for k in range(3):
            sgn = -1.0 if k == 2 else 1.0
            d1 = 2.0 * (g22 * e1[k] - g12 * e2[k]) * sgn * sc
            d2 = 2.0 * (g11 * e2[k] - g12 * e1[k]) * sgn * sc
            grad[i1, k] += d1
            grad[i2, k] += d2
            grad[i0, k] -= d1 + d2
    return A, grad, G_all


@njit(cache=True)
def _nb_volume_grad(X, tri):
    vol = 0.0
    grad = np.zeros(X.shape)
    for t in range(tri.shape[0]):
        i0, i1, i2 = tri[t, 0], tri[t, 1], tri[t, 2]
        twice = (X[i1, 0] - X[i0, 0]) * (X[i2, 1] - X[i0, 1]) - (X[i2, 0] - X[i0, 0]) * (X[i1, 1] - X[i0, 1])
        mean_u = (X[i0, 2] + X[i1, 2] + X[i2, 2]) / 3.0
        vol += 0.5 * twice * mean_u
        idx = (i0, i1, i2)
        for a in range(3):
            b = idx[(a + 1) % 3]
            c = idx[(a + 2) % 3]
            ia = idx[a]
            grad[ia, 0] += 0.5 * (X[b, 1] - X[c, 1]) * mean_u
            grad[ia, 1] += 0.5 * (X[c, 0] - X[b, 0]) * mean_u
            grad[ia, 2] += twice / 6.0
    return vol, grad


@njit(cache=True)
def _nb_face_normal_sum(X, tri, n_vertices):
    acc = np.zeros((n_vertices, 3))
    for t in range(tri.shape[0]):
        i0, i1, i2 = tri[t, 0], tri[t, 1], tri[t, 2]
        ax = X[i1, 0] - X[i0, 0]
        ay = X[i1, 1] - X[i0, 1]
        az = X[i1, 2] - X[i0, 2]
        bx = X[i2, 0] - X[i0, 0]
        by = X[i2, 1] - X[i0, 1]
        bz = X[i2, 2] - X[i0, 2]
        cx = -(ay * bz - az * by)
        cy = -(az * bx - ax * bz)
        cz = ax * by - ay * bx
        for i in (i0, i1, i2):
            acc[i, 0] += cx
            acc[i, 1] += cy
            acc[i, 2] += cz
    return acc


@njit(cache=True)
def _nb_count_crossings(P):
    n = P.shape[0]
    count = 0
    first_i = -1
    first_j = -1
    for i in range(n):
        ax, ay = P[i, 0], P[i, 1]
        bx, by = P[(i + 1) % n, 0], P[(i + 1) % n, 1]
        for j in range(i + 2, n):
            if i == 0 and j == n - 1:
                continue
            cx, cy = P[j, 0], P[j, 1]
            dx, dy = P[(j + 1) % n, 0], P[(j + 1) % n, 1]
            o1 = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
            o2 = (bx - ax) * (dy - ay) - (by - ay) * (dx - ax)
            o3 = (dx - cx) * (ay - cy) - (dy - cy) * (ax - cx)
            o4 = (dx - cx) * (by - cy) - (dy - cy) * (bx - cx)
            if o1 * o2 < 0 and o3 * o4 < 0:
                if count == 0:
                    first_i = i
                    first_j = j
                count += 1
    return count, first_i, first_j


# -- dispatch ----------------------------------------------------------------


def _prep(arr, dtype=float):
    return np.ascontiguousarray(arr, dtype=dtype)


def graph_area_terms(xy, u, tri, want_hessian=False):
    """Lorentz area of a height field and its u-gradient (and u-Hessian in COO form).

    Returns ``(area, grad, rows, cols, vals, grad_norm2)``; the last entry is
    |grad u|^2 per triangle, used for the spacelike check.
    """
    xy, u, tri = _prep(xy), _prep(u), _prep(tri, np.int64)
    if _BACKEND == "numba":
        return _nb_graph_area_terms(xy, u, tri, want_hessian)
    return _np_graph_area_terms(xy, u, tri, want_hessian)


def lorentz_area_grad(X, tri):
    """Per-triangle Lorentz areas, coordinate gradient of the total, and Gram determinants."""
    X, tri = _prep(X), _prep(tri, np.int64)
    if _BACKEND == "numba":
        return _nb_lorentz_area_grad(X, tri)
    return _np_lorentz_area_grad(X, tri)


def volume_grad(X, tri):
    """Signed volume between the graph and {x3 = 0}, and its coordinate gradient."""
    X, tri = _prep(X), _prep(tri, np.int64)
    if _BACKEND == "numba":
        return _nb_volume_grad(X, tri)
    return _np_volume_grad(X, tri)


def face_normal_sum(X, tri, n_vertices):
    """Sum over incident triangles of (twice the area) x (unit future normal)."""
    X, tri = _prep(X), _prep(tri, np.int64)
    if _BACKEND == "numba":
        return _nb_face_normal_sum(X, tri, n_vertices)
    return _np_face_normal_sum(X, tri, n_vertices)


def count_crossings(P):
    """Number of properly crossing non-adjacent edge pairs of a closed planar polygon."""
    P = _prep(P)
    if _BACKEND == "numba":
        c, i, j = _nb_count_crossings(P)
        return int(c), (int(i), int(j))
    return _np_count_crossings(P)
